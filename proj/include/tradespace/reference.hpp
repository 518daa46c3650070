#pragma once

#include <Eigen/Dense>
#include <vector>

// Straight-from-the-definition serial implementations, kept alongside the
// kernels. The test suites use them as independent oracles and the benchmark
// compares them against the parallel paths. They must not share code with
// the implementations they check.
namespace tradespace::reference {

// Triple loop over locations: co-occurrence / max ubiquity.
Eigen::MatrixXd proximity(const Eigen::MatrixXd& M);

// min(P(g|i), P(i|g)) from explicitly accumulated conditionals.
Eigen::MatrixXd min_conditional_proximity(const Eigen::MatrixXd& M);

// Balassa ratio for one cell with all four totals recomputed on the spot.
double balassa(const Eigen::MatrixXd& X, Eigen::Index location, Eigen::Index product);

// Floyd-Warshall all-pairs distances over an edge-length matrix
// (infinity = no edge, diagonal zero).
Eigen::MatrixXd all_pairs_distances(const Eigen::MatrixXd& lengths);

// (N-1) / sum of finite off-diagonal distances per row; 0 with an empty
// reachable set.
std::vector<double> closeness_from_distances(const Eigen::MatrixXd& dist);

// Two-pass share-of-total accumulation.
double hhi(const std::vector<double>& supplier_values);

}  // namespace tradespace::reference
