#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tradespace/types.hpp"

namespace tradespace {

enum class ScopeKind { Industry, Firm, Sectoral, Subset };

// Which slice of activity the Balassa totals run over. Sectoral restricts to
// one HS chapter; Subset to an explicit product list (e.g. the EV-specific
// codes); totals are always recomputed within the restriction.
struct Scope {
    ScopeKind kind = ScopeKind::Industry;
    std::string chapter;                // Sectoral only
    std::vector<std::string> products;  // Subset only

    static Scope industry() { return {ScopeKind::Industry, "", {}}; }
    static Scope firm() { return {ScopeKind::Firm, "", {}}; }
    static Scope sectoral(std::string ch) { return {ScopeKind::Sectoral, std::move(ch), {}}; }
    static Scope subset(std::vector<std::string> prods) { return {ScopeKind::Subset, "", std::move(prods)}; }

    bool operator==(const Scope&) const = default;
    std::string label() const;
};

// Aligned R / M / sRCA matrices over (location x product). Entries where a
// row or column total is zero are undefined: stored as zero with the defined
// flag cleared, and excluded from downstream sums.
struct SpecializationSet {
    int year = 0;
    Scope scope;
    Axis locations;
    Axis products;
    Eigen::MatrixXd R;
    Eigen::MatrixXd M;  // 0/1
    Eigen::MatrixXd srca;
    std::vector<uint8_t> row_defined;  // location total > 0
    std::vector<uint8_t> col_defined;  // product total > 0

    bool defined(Eigen::Index l, Eigen::Index p) const { return row_defined[l] && col_defined[p]; }
    // Product indices with M = 1 for the location, ascending.
    std::vector<int> advantages(Eigen::Index l) const;
};

// Balassa specialization over export values: R = (X_cp/X_c.)/(X_.p/X_..),
// M = [R >= 1], sRCA = (R-1)/(R+1). Axes may be pinned to an explicit
// universe so sets from different years stay aligned.
SpecializationSet rca_matrix(const TradeTable& table, int year, const Scope& scope,
                             const std::optional<Axis>& locations = std::nullopt,
                             const std::optional<Axis>& products = std::nullopt);

// Same formula applied to the binary firm x component incidence.
SpecializationSet firm_specialization(const FirmProductTable& firms);

// Per-location count of products with M = 1.
std::vector<int> diversity(const SpecializationSet& set);

struct EuSrcaRow {
    std::vector<double> srca;             // aligned with set.products
    std::map<std::string, double> weights;  // member -> export share
};

// Weighted average of member sRCA rows, weights = each member's share of
// total member exports in weights_year. Undefined member entries are
// excluded from the sum.
EuSrcaRow eu_weighted_srca(const SpecializationSet& set, const std::vector<std::string>& members,
                           const TradeTable& weights_table, int weights_year);

}  // namespace tradespace
