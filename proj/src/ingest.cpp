#include "tradespace/ingest.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "tradespace/csv.hpp"

namespace tradespace {

namespace {

constexpr size_t kMaxRecordedErrors = 50;

bool well_formed_location(const std::string& code) {
    if (code.size() < 2 || code.size() > 12) return false;
    for (char c : code)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool valid_hs6(const std::string& hs6) {
    if (hs6.size() != 6) return false;
    for (char c : hs6)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

void record_error(IngestReport& report, size_t line, const std::string& msg) {
    ++report.error_rows;
    if (report.errors.size() < kMaxRecordedErrors)
        report.errors.push_back("line " + std::to_string(line) + ": " + msg);
}

void note_unknown(IngestReport& report, const std::string& code) {
    auto it = std::lower_bound(report.unknown_codes.begin(), report.unknown_codes.end(), code);
    if (it == report.unknown_codes.end() || *it != code) report.unknown_codes.insert(it, code);
}

}  // namespace

std::optional<std::string> LocationNormalizer::normalize(const std::string& raw) const {
    std::string code = raw;
    auto it = aliases.find(code);
    if (it != aliases.end()) code = it->second;
    if (!well_formed_location(code)) return std::nullopt;
    if (!known.empty() && known.count(code) == 0) return std::nullopt;
    return code;
}

LocationNormalizer load_aliases(const std::string& path) {
    LocationNormalizer loc;
    csv::Reader reader(path);
    reader.require_header({"from", "to"});
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        if (fields.size() != 2) throw DataError(path + " line " + std::to_string(line) + ": expected 2 fields");
        loc.aliases[fields[0]] = fields[1];
    }
    return loc;
}

TradeTable load_trade(const std::string& path, const std::string& hs_revision,
                      const LocationNormalizer& loc, IngestReport& report) {
    report.file = path;
    report.hs_revision = hs_revision;

    csv::Reader reader(path);
    reader.require_header({"year", "exporter", "importer", "hs6", "value"});

    std::vector<TradeRecord> parsed;
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        ++report.rows_read;
        if (fields.size() != 5) {
            record_error(report, line, "expected 5 fields, got " + std::to_string(fields.size()));
            continue;
        }
        bool ok = false;
        long year = parse_long(fields[0], ok);
        if (!ok || year < 1900 || year > 2200) {
            record_error(report, line, "bad year '" + fields[0] + "'");
            continue;
        }
        auto exporter = loc.normalize(fields[1]);
        if (!exporter) {
            record_error(report, line, "unknown location code '" + fields[1] + "'");
            note_unknown(report, fields[1]);
            continue;
        }
        auto importer = loc.normalize(fields[2]);
        if (!importer) {
            record_error(report, line, "unknown location code '" + fields[2] + "'");
            note_unknown(report, fields[2]);
            continue;
        }
        if (*exporter == *importer) {
            record_error(report, line, "exporter equals importer ('" + *exporter + "')");
            continue;
        }
        if (!valid_hs6(fields[3])) {
            record_error(report, line, "bad hs6 '" + fields[3] + "'");
            continue;
        }
        double value = parse_double(fields[4], ok);
        if (!ok || std::isnan(value)) {
            record_error(report, line, "bad value '" + fields[4] + "'");
            continue;
        }
        if (value <= 0.0) {
            ++report.nonpositive_dropped;
            continue;
        }
        parsed.push_back({static_cast<int>(year), *exporter, *importer, fields[3], value});
    }

    if (parsed.empty()) throw DataError("no valid trade rows in " + path);

    auto key_less = [](const TradeRecord& a, const TradeRecord& b) {
        return std::tie(a.year, a.exporter, a.importer, a.hs6) < std::tie(b.year, b.exporter, b.importer, b.hs6);
    };
    std::stable_sort(parsed.begin(), parsed.end(), key_less);

    TradeTable table;
    table.hs_revision = hs_revision;
    for (auto& rec : parsed) {
        if (!table.rows.empty() && !key_less(table.rows.back(), rec)) {
            table.rows.back().value += rec.value;
            ++report.duplicates_merged;
        } else {
            table.rows.push_back(std::move(rec));
        }
    }
    report.rows_after_aggregation = table.rows.size();
    return table;
}

void write_trade_csv(const TradeTable& table, const std::string& path) {
    csv::Writer w(path);
    w.row({"year", "exporter", "importer", "hs6", "value"});
    for (const auto& r : table.rows)
        w.row({std::to_string(r.year), r.exporter, r.importer, r.hs6, fmt_double(r.value)});
    w.close();
}

ComponentTaxonomy load_taxonomy(const std::string& path) {
    csv::Reader reader(path);
    reader.require_header({"component_id", "tier1", "tier2", "tier3", "powertrain_class", "hs6_links"});

    ComponentTaxonomy tax;
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        if (fields.size() != 6) throw DataError(path + " line " + std::to_string(line) + ": expected 6 fields");
        Component comp;
        comp.id = fields[0];
        comp.tier1 = fields[1];
        comp.tier2 = fields[2];
        comp.tier3 = fields[3];
        if (comp.id.empty() || comp.tier1.empty() || comp.tier2.empty() || comp.tier3.empty())
            throw DataError(path + " line " + std::to_string(line) + ": empty component id or tier label");
        comp.cls = powertrain_from_string(fields[4]);
        if (!fields[5].empty()) {
            std::string link;
            for (char c : fields[5] + ";") {
                if (c == ';') {
                    if (!link.empty()) {
                        if (!valid_hs6(link))
                            throw DataError(path + " line " + std::to_string(line) + ": bad hs6 link '" + link + "'");
                        comp.hs6_links.push_back(link);
                        link.clear();
                    }
                } else {
                    link += c;
                }
            }
            std::sort(comp.hs6_links.begin(), comp.hs6_links.end());
            comp.hs6_links.erase(std::unique(comp.hs6_links.begin(), comp.hs6_links.end()), comp.hs6_links.end());
        }
        tax.components.push_back(std::move(comp));
    }
    if (tax.components.empty()) throw DataError("empty taxonomy: " + path);

    std::sort(tax.components.begin(), tax.components.end(),
              [](const Component& a, const Component& b) { return a.id < b.id; });
    for (size_t i = 0; i < tax.components.size(); ++i) {
        auto [it, inserted] = tax.by_id.emplace(tax.components[i].id, static_cast<int>(i));
        if (!inserted) throw DataError("duplicate component_id: " + tax.components[i].id);
    }
    return tax;
}

FirmProductTable load_firm_products(const std::string& path, const ComponentTaxonomy& taxonomy,
                                    const LocationNormalizer& loc, IngestReport& report) {
    report.file = path;
    csv::Reader reader(path);
    reader.require_header({"firm_id", "country", "component_id"});

    std::map<std::string, std::string> firm_country;
    std::map<std::string, std::set<int>> firm_components;
    std::vector<std::string> fields;
    size_t line = 0;
    size_t duplicates = 0;
    while (reader.next(fields, line)) {
        ++report.rows_read;
        if (fields.size() != 3) {
            record_error(report, line, "expected 3 fields, got " + std::to_string(fields.size()));
            continue;
        }
        const std::string& firm = fields[0];
        if (firm.empty()) {
            record_error(report, line, "empty firm_id");
            continue;
        }
        auto country = loc.normalize(fields[1]);
        if (!country) {
            record_error(report, line, "unknown location code '" + fields[1] + "'");
            note_unknown(report, fields[1]);
            continue;
        }
        auto comp_it = taxonomy.by_id.find(fields[2]);
        if (comp_it == taxonomy.by_id.end()) {
            record_error(report, line, "unknown component_id '" + fields[2] + "'");
            continue;
        }
        auto [country_it, inserted] = firm_country.emplace(firm, *country);
        if (!inserted && country_it->second != *country)
            throw DataError(path + " line " + std::to_string(line) + ": firm '" + firm +
                            "' listed under two countries ('" + country_it->second + "', '" + *country + "')");
        if (!firm_components[firm].insert(comp_it->second).second) ++duplicates;
    }
    if (firm_components.empty()) throw DataError("no valid firm rows in " + path);

    FirmProductTable out;
    std::vector<std::string> firm_ids;
    for (const auto& [firm, comps] : firm_components)
        if (!comps.empty()) firm_ids.push_back(firm);
    out.firms = Axis(firm_ids);
    std::vector<std::string> comp_ids;
    comp_ids.reserve(taxonomy.components.size());
    for (const auto& c : taxonomy.components) comp_ids.push_back(c.id);
    out.components = Axis(comp_ids);
    out.incidence.resize(out.firms.size());
    out.firm_country.resize(out.firms.size());
    for (size_t f = 0; f < out.firms.size(); ++f) {
        const auto& comps = firm_components[out.firms.label(f)];
        out.incidence[f].assign(comps.begin(), comps.end());
        out.firm_country[f] = firm_country[out.firms.label(f)];
    }
    out.duplicates_merged = duplicates;
    report.duplicates_merged = duplicates;
    report.rows_after_aggregation = report.rows_read - report.error_rows - duplicates;
    return out;
}

HsClassMap classify_hs_codes(const ComponentTaxonomy& taxonomy, size_t* ev_count) {
    struct Counts {
        size_t ev = 0, ice = 0, total = 0;
    };
    std::map<std::string, Counts> tally;
    for (const auto& comp : taxonomy.components) {
        for (const auto& hs6 : comp.hs6_links) {
            auto& c = tally[hs6];
            ++c.total;
            if (comp.cls == PowertrainClass::EV) ++c.ev;
            if (comp.cls == PowertrainClass::ICE) ++c.ice;
        }
    }
    HsClassMap out;
    size_t ev = 0;
    for (const auto& [hs6, c] : tally) {
        PowertrainClass cls = PowertrainClass::UNSPECIFIC;
        if (2 * c.ev > c.total) {
            cls = PowertrainClass::EV;
            ++ev;
        } else if (2 * c.ice > c.total) {
            cls = PowertrainClass::ICE;
        }
        out.emplace(hs6, cls);
    }
    if (ev_count) *ev_count = ev;
    return out;
}

std::string ingest_report_json(const IngestReport& trade, const IngestReport& firms) {
    auto to_json = [](const IngestReport& r) {
        nlohmann::json j;
        j["file"] = r.file;
        if (!r.hs_revision.empty()) j["hs_revision"] = r.hs_revision;
        j["rows_read"] = r.rows_read;
        j["rows_after_aggregation"] = r.rows_after_aggregation;
        j["duplicates_merged"] = r.duplicates_merged;
        j["nonpositive_dropped"] = r.nonpositive_dropped;
        j["error_rows"] = r.error_rows;
        j["errors"] = r.errors;
        j["unknown_codes"] = r.unknown_codes;
        return j;
    };
    nlohmann::json j;
    j["trade"] = to_json(trade);
    j["firms"] = to_json(firms);
    j["ev_hs_codes"] = trade.ev_hs_codes;
    return j.dump(2) + "\n";
}

}  // namespace tradespace
