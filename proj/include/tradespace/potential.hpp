#pragma once

#include "tradespace/productspace.hpp"

namespace tradespace {

struct PotentialScore {
    Axis locations;
    std::vector<double> raw;
    std::vector<double> z;  // standardized, mean 0 / sd 1 over the scored set
    std::vector<int> n_missing_targets;
    std::vector<uint8_t> flagged;  // empty basket, no missing target, or zero total weight
};

// Mean proximity of product g to the basket. Empty baskets are handled by
// the callers, which flag a zero score.
double basket_proximity(int g, const std::vector<int>& basket, const Eigen::MatrixXd& phi);

// Complexity potential of each location towards the targets it does not hold:
// a proximity-weighted average of phi_gc * pci_norm_g over missing targets,
// with weight phi_gc, then standardized across locations.
PotentialScore complexity_potential(const SpecializationSet& set, const ProductSpace& space,
                                    const std::vector<int>& targets);

struct FirmPotentialOptions {
    size_t min_firms = 150;  // countries at or below the threshold are excluded
};

// Per-firm complexity potential, averaged (unweighted) per country, then
// standardized across the retained countries.
PotentialScore firm_potential_average(const SpecializationSet& firm_set, const ProductSpace& firm_space,
                                      const std::vector<int>& targets, const FirmProductTable& firms,
                                      const FirmPotentialOptions& options);

// Standardize in place over all entries; sd 0 degenerates to all-zero z.
void standardize_scores(PotentialScore& score);

}  // namespace tradespace
