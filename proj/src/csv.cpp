#include "tradespace/csv.hpp"

#include <sstream>

namespace tradespace::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

Reader::Reader(const std::string& p) : path(p), in(p) {
    if (!in.good()) throw DataError("cannot open file: " + p);
}

void Reader::require_header(const std::vector<std::string>& expected) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    ++line_no;
    auto fields = split_line(line);
    if (fields != expected) {
        std::string want;
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ",";
            want += expected[i];
        }
        throw DataError("bad header in " + path + ": expected '" + want + "', got '" + line + "'");
    }
}

bool Reader::next(std::vector<std::string>& fields, size_t& no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        fields = split_line(line);
        no = line_no;
        return true;
    }
    return false;
}

Writer::Writer(const std::string& p) : out(p, std::ios::binary), path(p) {
    if (!out.good()) throw DataError("cannot open file for writing: " + p);
}

void Writer::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

void Writer::close() {
    out.close();
    if (out.fail()) throw DataError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw DataError("cannot open file for writing: " + path);
    out << content;
    out.close();
    if (out.fail()) throw DataError("write failed: " + path);
}

}  // namespace tradespace::csv
