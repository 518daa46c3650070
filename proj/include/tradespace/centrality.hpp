#pragma once

#include "tradespace/productspace.hpp"

namespace tradespace {

// Country-induced filter of the product space: an edge (p,q) with phi > 0
// survives iff at least one endpoint is a comparative advantage of the
// country. Edge length is 1/phi, so lengths are finite and >= 1. Isolated
// nodes are retained.
struct CountrySubspace {
    std::string country;
    int n_nodes = 0;
    // CSR adjacency
    std::vector<int> offsets;
    std::vector<int> neighbors;
    std::vector<double> lengths;
    size_t edge_count() const { return neighbors.size() / 2; }
};

CountrySubspace country_subspace(const ProductSpace& space, const SpecializationSet& set,
                                 const std::string& country);

// Single-source shortest paths, linear-scan selection (dense graphs).
// Unreachable nodes carry +inf.
std::vector<double> shortest_paths(const CountrySubspace& sub, int source);

enum class ClosenessVariant {
    // C(i) = (N-1) / sum of shortest-path distances to every reachable node.
    ReachableSum,
    // Mean over the advantage set of inverse distance (unreachable -> 0).
    AdvantageMean,
};

struct ClosenessColumn {
    std::vector<double> closeness;  // per node
    std::vector<int> reachable_n;   // reachable others per node
};

// Closeness of every node of the subspace; sources run in parallel and write
// to disjoint slots, so the result is deterministic.
ClosenessColumn closeness_all(const CountrySubspace& sub, ClosenessVariant variant = ClosenessVariant::ReachableSum,
                              const std::vector<int>& advantage_nodes = {});

// Rows restricted to a target product set; targets must exist in the space.
struct ClosenessTable {
    Axis countries;
    Axis products;
    Eigen::MatrixXd closeness;
    Eigen::MatrixXi reachable_n;
};

ClosenessTable closeness_table(const ProductSpace& space, const SpecializationSet& set,
                               const std::vector<std::string>& countries,
                               ClosenessVariant variant = ClosenessVariant::ReachableSum);

// Mean closeness over the chapter's products whose closeness lies in the top
// `top_quantile` share (ties break on product id for determinism).
double chapter_closeness(const std::vector<double>& closeness, const Axis& products,
                         const std::string& chapter, double top_quantile);

struct ChapterClosenessRow {
    std::string country;
    std::string chapter;
    double value = 0.0;
};

std::vector<ChapterClosenessRow> chapter_closeness_table(const ClosenessTable& table,
                                                         const std::vector<std::string>& chapters,
                                                         double top_quantile);

// Harmonic attribution of a target's closeness mass across chapters: each
// reachable j contributes 1/d(i,j) to chapter(j); shares sum to one per
// target with a nonempty reachable set.
struct DecompositionRow {
    std::string country;
    std::string target;
    std::string chapter;
    double share = 0.0;
};

std::vector<DecompositionRow> contribution_decomposition(const ProductSpace& space, const SpecializationSet& set,
                                                         const std::vector<std::string>& countries,
                                                         const std::vector<std::string>& targets);

}  // namespace tradespace
