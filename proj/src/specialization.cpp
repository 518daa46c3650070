#include "tradespace/specialization.hpp"

#include <algorithm>

namespace tradespace {

std::string Scope::label() const {
    switch (kind) {
        case ScopeKind::Industry: return "industry";
        case ScopeKind::Firm: return "firm";
        case ScopeKind::Sectoral: return "sectoral:" + chapter;
        case ScopeKind::Subset: return "subset:" + std::to_string(products.size());
    }
    return "industry";
}

std::vector<int> SpecializationSet::advantages(Eigen::Index l) const {
    std::vector<int> out;
    for (Eigen::Index p = 0; p < M.cols(); ++p)
        if (M(l, p) > 0.5) out.push_back(static_cast<int>(p));
    return out;
}

namespace {

bool in_scope(const Scope& scope, const std::string& hs6, const std::set<std::string>& subset) {
    switch (scope.kind) {
        case ScopeKind::Industry:
        case ScopeKind::Firm: return true;
        case ScopeKind::Sectoral: return hs_chapter(hs6) == scope.chapter;
        case ScopeKind::Subset: return subset.count(hs6) > 0;
    }
    return true;
}

// Derives R/M/sRCA from a filled activity matrix X.
SpecializationSet from_activity(int year, Scope scope, Axis locations, Axis products, Eigen::MatrixXd X) {
    SpecializationSet set;
    set.year = year;
    set.scope = std::move(scope);
    set.locations = std::move(locations);
    set.products = std::move(products);

    const Eigen::Index n_loc = X.rows();
    const Eigen::Index n_prod = X.cols();
    Eigen::VectorXd row_tot = X.rowwise().sum();
    Eigen::VectorXd col_tot = X.colwise().sum();
    const double grand = row_tot.sum();
    if (!(grand > 0.0)) throw NumericalError("zero world total in scope " + set.scope.label());

    set.R = Eigen::MatrixXd::Zero(n_loc, n_prod);
    set.M = Eigen::MatrixXd::Zero(n_loc, n_prod);
    set.srca = Eigen::MatrixXd::Zero(n_loc, n_prod);
    set.row_defined.assign(static_cast<size_t>(n_loc), 0);
    set.col_defined.assign(static_cast<size_t>(n_prod), 0);
    for (Eigen::Index l = 0; l < n_loc; ++l) set.row_defined[l] = row_tot(l) > 0.0;
    for (Eigen::Index p = 0; p < n_prod; ++p) set.col_defined[p] = col_tot(p) > 0.0;

#pragma omp parallel for schedule(static)
    for (Eigen::Index l = 0; l < n_loc; ++l) {
        if (!set.row_defined[l]) continue;
        for (Eigen::Index p = 0; p < n_prod; ++p) {
            if (!set.col_defined[p]) continue;
            const double r = (X(l, p) / row_tot(l)) / (col_tot(p) / grand);
            set.R(l, p) = r;
            set.M(l, p) = r >= 1.0 ? 1.0 : 0.0;
            set.srca(l, p) = (r - 1.0) / (r + 1.0);
        }
    }
    return set;
}

}  // namespace

SpecializationSet rca_matrix(const TradeTable& table, int year, const Scope& scope,
                             const std::optional<Axis>& locations, const std::optional<Axis>& products) {
    if (!table.has_year(year)) throw DataError("year " + std::to_string(year) + " absent from trade table");
    if (scope.kind == ScopeKind::Firm) throw DataError("firm scope requires firm_specialization");

    std::set<std::string> subset(scope.products.begin(), scope.products.end());

    Axis loc_axis, prod_axis;
    if (locations) {
        loc_axis = *locations;
    } else {
        loc_axis = Axis(table.exporters(year));
    }
    if (products) {
        prod_axis = *products;
    } else {
        std::vector<std::string> prods;
        for (const auto& hs6 : table.products(year))
            if (in_scope(scope, hs6, subset)) prods.push_back(hs6);
        prod_axis = Axis(prods);
    }

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(loc_axis.size()),
                                              static_cast<Eigen::Index>(prod_axis.size()));
    for (const auto& r : table.rows) {
        if (r.year != year) continue;
        if (!in_scope(scope, r.hs6, subset)) continue;
        int l = loc_axis.index_of(r.exporter);
        int p = prod_axis.index_of(r.hs6);
        if (l < 0 || p < 0) continue;
        X(l, p) += r.value;
    }
    return from_activity(year, scope, std::move(loc_axis), std::move(prod_axis), std::move(X));
}

SpecializationSet firm_specialization(const FirmProductTable& firms) {
    if (firms.firms.size() == 0 || firms.components.size() == 0)
        throw DataError("empty firm incidence");
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(firms.firms.size()),
                                              static_cast<Eigen::Index>(firms.components.size()));
    for (size_t f = 0; f < firms.incidence.size(); ++f)
        for (int c : firms.incidence[f]) X(static_cast<Eigen::Index>(f), c) = 1.0;
    return from_activity(0, Scope::firm(), firms.firms, firms.components, std::move(X));
}

std::vector<int> diversity(const SpecializationSet& set) {
    std::vector<int> out(set.locations.size(), 0);
    for (Eigen::Index l = 0; l < set.M.rows(); ++l)
        out[static_cast<size_t>(l)] = static_cast<int>(std::lround(set.M.row(l).sum()));
    return out;
}

EuSrcaRow eu_weighted_srca(const SpecializationSet& set, const std::vector<std::string>& members,
                           const TradeTable& weights_table, int weights_year) {
    if (members.empty()) throw DataError("empty EU member set");

    std::map<std::string, double> totals;
    for (const auto& m : members) {
        if (!set.locations.contains(m))
            throw DataError("EU member '" + m + "' absent from specialization set");
        totals[m] = 0.0;
    }
    for (const auto& r : weights_table.rows)
        if (r.year == weights_year && totals.count(r.exporter)) totals[r.exporter] += r.value;
    double grand = 0.0;
    for (const auto& [m, v] : totals) grand += v;
    if (!(grand > 0.0))
        throw NumericalError("EU members have zero exports in weights year " + std::to_string(weights_year));

    EuSrcaRow out;
    for (const auto& [m, v] : totals) out.weights[m] = v / grand;
    out.srca.assign(set.products.size(), 0.0);
    for (const auto& m : members) {
        const Eigen::Index l = set.locations.index_of(m);
        const double w = out.weights[m];
        for (Eigen::Index p = 0; p < set.srca.cols(); ++p)
            if (set.defined(l, p)) out.srca[static_cast<size_t>(p)] += w * set.srca(l, p);
    }
    return out;
}

}  // namespace tradespace
