#pragma once

#include "tradespace/specialization.hpp"
#include "tradespace/types.hpp"

namespace tradespace {

// Sum of squared supplier shares; n_suppliers out-param when needed.
double hhi_from_values(const std::vector<double>& supplier_values, int* n_suppliers = nullptr);

// HHI of one importer x product cell in the given year. Returns nullopt when
// no positive import value exists.
std::optional<double> hhi_single(const TradeTable& trade, int year, const std::string& importer,
                                 const std::string& hs6, int* n_suppliers = nullptr);

struct ConcentrationRow {
    std::string importer;
    std::string hs6;
    std::string cls;  // EV/ICE/UNSPECIFIC or empty when unclassified
    double hhi = 0.0;
    double hhi_rel = 0.0;
    int n_suppliers = 0;
    int rca_flag = 0;  // export RCA >= 1 in the reference-year set
};

struct ConcentrationOptions {
    int year = 0;
    std::vector<std::string> eu_members;     // empty: no pooled EU rows
    std::set<std::string> product_filter;    // empty: all products
    std::string eu_label = "EU";
};

// Per-(importer, hs6) HHI table plus pooled single-market rows for the EU
// (member imports pooled, intra-EU flows excluded). hhi_rel divides by the
// global mean over the country-level rows; the pooled rows are normalized by
// the same mean and excluded from it.
std::vector<ConcentrationRow> concentration_table(const TradeTable& trade, const SpecializationSet& ref_set,
                                                  const HsClassMap& class_map, const ConcentrationOptions& options);

}  // namespace tradespace
