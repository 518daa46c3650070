#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "tradespace/common.hpp"

namespace tradespace::csv {

// Splits one CSV line. The canonical formats carry no embedded commas or
// quotes; quoted fields are still unwrapped so hand-edited inputs survive.
std::vector<std::string> split_line(const std::string& line);

struct Reader {
    explicit Reader(const std::string& path);
    // Header must match exactly (order included).
    void require_header(const std::vector<std::string>& expected);
    // Returns false at EOF; skips blank lines. line_no is 1-based over the file.
    bool next(std::vector<std::string>& fields, size_t& line_no);

    std::string path;
    std::ifstream in;
    size_t line_no = 0;
};

struct Writer {
    explicit Writer(const std::string& path);
    void row(const std::vector<std::string>& fields);
    void close();

    std::ofstream out;
    std::string path;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace tradespace::csv
