#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tradespace/specialization.hpp"
#include "tradespace/types.hpp"

namespace tradespace {

enum class Layer { Industry, Firm };

struct ProductNode {
    std::string id;
    std::string chapter;  // 2-digit HS prefix (industry layer only)
    std::optional<PowertrainClass> cls;
    double pci = 0.0;
    double pci_norm = 0.0;
    bool pci_in_core = true;  // false when the node sits outside the largest connected block
};

// Symmetric proximity network over products, with zero diagonal by convention.
struct ProductSpace {
    Layer layer = Layer::Industry;
    Axis products;
    std::vector<ProductNode> nodes;
    Eigen::MatrixXd phi;

    size_t edge_count() const;
};

// Co-occurrence proximity: phi[p,q] = sum_c M[c,p] M[c,q] / max(u_p, u_q),
// zero diagonal, zero rows for zero-ubiquity products.
Eigen::MatrixXd proximity(const Eigen::MatrixXd& M);

// Minimum conditional specialization probability:
// phi[g,i] = min(co/u_i, co/u_g). Identical to proximity() on any binary M;
// both routes are kept as an anti-regression anchor.
Eigen::MatrixXd proximity_min_conditional(const Eigen::MatrixXd& M);

struct PciResult {
    Eigen::VectorXd pci;       // standardized (mean 0, sd 1) over the core block; NaN outside
    Eigen::VectorXd pci_norm;  // min-max of pci over the core block; 0 outside
    std::vector<uint8_t> in_core;
    int iterations = 0;
    double eigenvalue = 0.0;  // second-largest of the product transition matrix
};

// Product complexity: eigenvector of the second-largest eigenvalue of the
// row-stochastic product-product transition matrix, computed on the largest
// connected co-occurrence block by deterministic deflated power iteration
// (fixed seed start vector, tolerance 1e-10). Sign is fixed so that PCI
// anti-correlates with ubiquity.
PciResult pci(const Eigen::MatrixXd& M);

struct InterLayerMap {
    // component_id -> sorted hs6 codes, verbatim from the taxonomy
    std::map<std::string, std::vector<std::string>> links;
    size_t total_links() const;
};

struct LayerBuild {
    ProductSpace industry;
    ProductSpace firm;
    InterLayerMap interlayer;
};

// Assembles both layers with node metadata. Nodes are the products observed
// in the underlying activity (set axes); powertrain classes come from the
// HS class map (industry) and the taxonomy (firm).
LayerBuild build_layers(const SpecializationSet& industry_set, const SpecializationSet& firm_set,
                        const ComponentTaxonomy& taxonomy, const HsClassMap& class_map);

// Single-layer variants used by the pipeline.
ProductSpace build_industry_space(const SpecializationSet& set, const HsClassMap& class_map);
ProductSpace build_firm_space(const SpecializationSet& firm_set, const ComponentTaxonomy& taxonomy);

}  // namespace tradespace
