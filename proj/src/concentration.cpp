#include "tradespace/concentration.hpp"

#include <algorithm>

namespace tradespace {

double hhi_from_values(const std::vector<double>& supplier_values, int* n_suppliers) {
    double total = 0.0;
    int n = 0;
    for (double v : supplier_values)
        if (v > 0.0) {
            total += v;
            ++n;
        }
    if (n_suppliers) *n_suppliers = n;
    if (!(total > 0.0)) throw NumericalError("hhi: zero total import value");
    double hhi = 0.0;
    for (double v : supplier_values)
        if (v > 0.0) {
            const double share = v / total;
            hhi += share * share;
        }
    return hhi;
}

std::optional<double> hhi_single(const TradeTable& trade, int year, const std::string& importer,
                                 const std::string& hs6, int* n_suppliers) {
    std::vector<double> values;
    for (const auto& r : trade.rows)
        if (r.year == year && r.importer == importer && r.hs6 == hs6) values.push_back(r.value);
    if (values.empty()) return std::nullopt;
    return hhi_from_values(values, n_suppliers);
}

std::vector<ConcentrationRow> concentration_table(const TradeTable& trade, const SpecializationSet& ref_set,
                                                  const HsClassMap& class_map, const ConcentrationOptions& options) {
    const std::set<std::string> members(options.eu_members.begin(), options.eu_members.end());
    auto in_filter = [&](const std::string& hs6) {
        return options.product_filter.empty() || options.product_filter.count(hs6) > 0;
    };

    // Group supplier values per (importer, hs6) and, for the pooled single
    // market, per hs6 over external suppliers only. Values are accumulated by
    // exporter so pooled members share suppliers.
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
    std::map<std::string, std::map<std::string, double>> eu_cells;
    for (const auto& r : trade.rows) {
        if (r.year != options.year || !in_filter(r.hs6)) continue;
        cells[{r.importer, r.hs6}][r.exporter] += r.value;
        if (members.count(r.importer) && !members.count(r.exporter)) eu_cells[r.hs6][r.exporter] += r.value;
    }
    if (cells.empty()) throw DataError("no import flows for concentration table");

    auto rca_flag_for = [&](const std::string& location, const std::string& hs6) {
        const int l = ref_set.locations.index_of(location);
        const int p = ref_set.products.index_of(hs6);
        if (l < 0 || p < 0 || !ref_set.defined(l, p)) return 0;
        return ref_set.R(l, p) >= 1.0 ? 1 : 0;
    };

    auto supplier_values = [](const std::map<std::string, double>& by_exporter) {
        std::vector<double> out;
        out.reserve(by_exporter.size());
        for (const auto& [exporter, value] : by_exporter) out.push_back(value);
        return out;
    };

    std::vector<ConcentrationRow> rows;
    double hhi_sum = 0.0;
    size_t hhi_n = 0;
    for (const auto& [key, by_exporter] : cells) {
        ConcentrationRow row;
        row.importer = key.first;
        row.hs6 = key.second;
        auto cls = class_map.find(row.hs6);
        if (cls != class_map.end()) row.cls = to_string(cls->second);
        row.hhi = hhi_from_values(supplier_values(by_exporter), &row.n_suppliers);
        row.rca_flag = rca_flag_for(row.importer, row.hs6);
        hhi_sum += row.hhi;
        ++hhi_n;
        rows.push_back(std::move(row));
    }
    const double global_mean = hhi_sum / static_cast<double>(hhi_n);
    if (!(global_mean > 0.0)) throw NumericalError("zero global mean HHI");

    if (!members.empty()) {
        // Pooled export RCA for the flag: member exports to non-members vs world.
        std::map<std::string, double> eu_exports;
        double eu_total = 0.0, world_total = 0.0;
        std::map<std::string, double> world_product;
        for (const auto& r : trade.rows) {
            if (r.year != options.year) continue;
            world_total += r.value;
            world_product[r.hs6] += r.value;
            if (members.count(r.exporter) && !members.count(r.importer)) {
                eu_exports[r.hs6] += r.value;
                eu_total += r.value;
            }
        }
        for (const auto& [hs6, by_exporter] : eu_cells) {
            ConcentrationRow row;
            row.importer = options.eu_label;
            row.hs6 = hs6;
            auto cls = class_map.find(hs6);
            if (cls != class_map.end()) row.cls = to_string(cls->second);
            row.hhi = hhi_from_values(supplier_values(by_exporter), &row.n_suppliers);
            if (eu_total > 0.0 && world_total > 0.0 && world_product[hs6] > 0.0) {
                const double r_eu = (eu_exports[hs6] / eu_total) / (world_product[hs6] / world_total);
                row.rca_flag = r_eu >= 1.0 ? 1 : 0;
            }
            rows.push_back(std::move(row));
        }
    }

    for (auto& row : rows) row.hhi_rel = row.hhi / global_mean;
    std::sort(rows.begin(), rows.end(), [](const ConcentrationRow& a, const ConcentrationRow& b) {
        return std::tie(a.importer, a.hs6) < std::tie(b.importer, b.hs6);
    });
    return rows;
}

}  // namespace tradespace
