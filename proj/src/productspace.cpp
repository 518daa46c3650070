#include "tradespace/productspace.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace tradespace {

size_t ProductSpace::edge_count() const {
    size_t n = 0;
    for (Eigen::Index p = 0; p < phi.rows(); ++p)
        for (Eigen::Index q = p + 1; q < phi.cols(); ++q)
            if (phi(p, q) > 0.0) ++n;
    return n;
}

size_t InterLayerMap::total_links() const {
    size_t n = 0;
    for (const auto& [comp, codes] : links) n += codes.size();
    return n;
}

namespace {

// Column bitset view of M: one block row per 64 locations.
struct BitColumns {
    Eigen::Index n_loc = 0, n_prod = 0;
    size_t words = 0;
    std::vector<uint64_t> bits;  // column-major: bits[p * words + w]

    explicit BitColumns(const Eigen::MatrixXd& M)
        : n_loc(M.rows()), n_prod(M.cols()), words((static_cast<size_t>(n_loc) + 63) / 64) {
        bits.assign(static_cast<size_t>(n_prod) * words, 0);
        for (Eigen::Index p = 0; p < n_prod; ++p)
            for (Eigen::Index c = 0; c < n_loc; ++c)
                if (M(c, p) > 0.5)
                    bits[static_cast<size_t>(p) * words + static_cast<size_t>(c) / 64] |=
                        uint64_t(1) << (static_cast<size_t>(c) % 64);
    }

    int cooccurrence(Eigen::Index p, Eigen::Index q) const {
        const uint64_t* a = bits.data() + static_cast<size_t>(p) * words;
        const uint64_t* b = bits.data() + static_cast<size_t>(q) * words;
        int n = 0;
        for (size_t w = 0; w < words; ++w) n += __builtin_popcountll(a[w] & b[w]);
        return n;
    }

    int ubiquity(Eigen::Index p) const {
        const uint64_t* a = bits.data() + static_cast<size_t>(p) * words;
        int n = 0;
        for (size_t w = 0; w < words; ++w) n += __builtin_popcountll(a[w]);
        return n;
    }
};

}  // namespace

Eigen::MatrixXd proximity(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.cols();
    BitColumns cols(M);
    std::vector<int> ubiq(static_cast<size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p) ubiq[static_cast<size_t>(p)] = cols.ubiquity(p);

    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index p = 0; p < n; ++p) {
        if (ubiq[static_cast<size_t>(p)] == 0) continue;
        for (Eigen::Index q = p + 1; q < n; ++q) {
            if (ubiq[static_cast<size_t>(q)] == 0) continue;
            const int co = cols.cooccurrence(p, q);
            if (co == 0) continue;
            const double v =
                static_cast<double>(co) /
                static_cast<double>(std::max(ubiq[static_cast<size_t>(p)], ubiq[static_cast<size_t>(q)]));
            phi(p, q) = v;
            phi(q, p) = v;
        }
    }
    return phi;
}

Eigen::MatrixXd proximity_min_conditional(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.cols();
    BitColumns cols(M);
    std::vector<int> ubiq(static_cast<size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p) ubiq[static_cast<size_t>(p)] = cols.ubiquity(p);

    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index g = 0; g < n; ++g) {
        if (ubiq[static_cast<size_t>(g)] == 0) continue;
        for (Eigen::Index i = g + 1; i < n; ++i) {
            if (ubiq[static_cast<size_t>(i)] == 0) continue;
            const int co = cols.cooccurrence(g, i);
            if (co == 0) continue;
            const double p_g_given_i = static_cast<double>(co) / static_cast<double>(ubiq[static_cast<size_t>(i)]);
            const double p_i_given_g = static_cast<double>(co) / static_cast<double>(ubiq[static_cast<size_t>(g)]);
            const double v = std::min(p_g_given_i, p_i_given_g);
            phi(g, i) = v;
            phi(i, g) = v;
        }
    }
    return phi;
}

namespace {

std::vector<int> component_labels(const Eigen::MatrixXd& M, const std::vector<int>& ubiq, int& n_components) {
    // Union-find over products: one set per country product basket.
    const Eigen::Index n = M.cols();
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index c = 0; c < M.rows(); ++c) {
        int first = -1;
        for (Eigen::Index p = 0; p < n; ++p) {
            if (M(c, p) < 0.5) continue;
            if (first < 0) {
                first = static_cast<int>(p);
            } else {
                int a = find(first), b = find(static_cast<int>(p));
                if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    std::vector<int> label(static_cast<size_t>(n), -1);
    std::map<int, int> roots;
    for (Eigen::Index p = 0; p < n; ++p) {
        if (ubiq[static_cast<size_t>(p)] == 0) continue;  // inactive products stay unlabeled
        int root = find(static_cast<int>(p));
        auto [it, inserted] = roots.emplace(root, static_cast<int>(roots.size()));
        label[static_cast<size_t>(p)] = it->second;
    }
    n_components = static_cast<int>(roots.size());
    return label;
}

}  // namespace

PciResult pci(const Eigen::MatrixXd& M) {
    const Eigen::Index n_prod = M.cols();
    const Eigen::Index n_loc = M.rows();
    PciResult out;
    out.pci = Eigen::VectorXd::Constant(n_prod, std::nan(""));
    out.pci_norm = Eigen::VectorXd::Zero(n_prod);
    out.in_core.assign(static_cast<size_t>(n_prod), 0);

    std::vector<int> ubiq(static_cast<size_t>(n_prod), 0);
    std::vector<int> divers(static_cast<size_t>(n_loc), 0);
    for (Eigen::Index c = 0; c < n_loc; ++c)
        for (Eigen::Index p = 0; p < n_prod; ++p)
            if (M(c, p) > 0.5) {
                ++ubiq[static_cast<size_t>(p)];
                ++divers[static_cast<size_t>(c)];
            }

    int n_components = 0;
    std::vector<int> label = component_labels(M, ubiq, n_components);

    // Pick the largest block; ties resolve to the block seen first (lowest
    // product index).
    std::vector<int> sizes(static_cast<size_t>(std::max(n_components, 1)), 0);
    for (Eigen::Index p = 0; p < n_prod; ++p)
        if (label[static_cast<size_t>(p)] >= 0) ++sizes[static_cast<size_t>(label[static_cast<size_t>(p)])];
    int core = -1, core_size = 0;
    for (int b = 0; b < n_components; ++b)
        if (sizes[static_cast<size_t>(b)] > core_size) {
            core = b;
            core_size = sizes[static_cast<size_t>(b)];
        }

    if (core_size < 2) {
        // No co-occurrence anywhere: complexity carries no information, every
        // active product gets the same neutral score.
        for (Eigen::Index p = 0; p < n_prod; ++p) {
            if (ubiq[static_cast<size_t>(p)] == 0) continue;
            out.pci(p) = 0.0;
            out.pci_norm(p) = 0.5;
            out.in_core[static_cast<size_t>(p)] = 1;
        }
        return out;
    }

    std::vector<int> members;
    for (Eigen::Index p = 0; p < n_prod; ++p)
        if (label[static_cast<size_t>(p)] == core) members.push_back(static_cast<int>(p));
    const int m = static_cast<int>(members.size());

    // Symmetric matrix similar to the transition matrix:
    // S[a,b] = sum_c M[c,a] M[c,b] / (k_c sqrt(u_a u_b)).
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    std::vector<int> pos(static_cast<size_t>(n_prod), -1);
    for (int a = 0; a < m; ++a) pos[static_cast<size_t>(members[static_cast<size_t>(a)])] = a;
    for (Eigen::Index c = 0; c < n_loc; ++c) {
        if (divers[static_cast<size_t>(c)] == 0) continue;
        std::vector<int> basket;
        for (Eigen::Index p = 0; p < n_prod; ++p)
            if (M(c, p) > 0.5 && pos[static_cast<size_t>(p)] >= 0) basket.push_back(pos[static_cast<size_t>(p)]);
        const double inv_div = 1.0 / static_cast<double>(divers[static_cast<size_t>(c)]);
        for (int a : basket)
            for (int b : basket) S(a, b) += inv_div;
    }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            S(a, b) /= std::sqrt(static_cast<double>(ubiq[static_cast<size_t>(members[static_cast<size_t>(a)])]) *
                                 static_cast<double>(ubiq[static_cast<size_t>(members[static_cast<size_t>(b)])]));

    // Leading eigenvector of S is known in closed form (sqrt of ubiquity).
    Eigen::VectorXd u1(m);
    for (int a = 0; a < m; ++a)
        u1(a) = std::sqrt(static_cast<double>(ubiq[static_cast<size_t>(members[static_cast<size_t>(a)])]));
    u1.normalize();

    // Shifted, deflated power iteration. The shift keeps the spectrum in
    // [0, 1] so the iteration homes in on the second-largest eigenvalue by
    // value, not by modulus.
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
    Eigen::VectorXd x(m);
    for (int a = 0; a < m; ++a) x(a) = draw_unit(gen) - 0.5;
    x -= u1.dot(x) * u1;
    if (x.norm() < 1e-14) x = Eigen::VectorXd::Unit(m, 0) - u1(0) * u1;
    x.normalize();

    constexpr int kMaxIter = 20000;
    constexpr double kTol = 1e-10;
    double shifted_lambda = 0.0;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        Eigen::VectorXd y = 0.5 * (S * x + x);
        y -= u1.dot(y) * u1;
        const double norm = y.norm();
        if (norm < 1e-300) {
            // Deflated spectrum is numerically zero: constant complexity.
            x.setZero();
            shifted_lambda = 0.0;
            break;
        }
        y /= norm;
        if (y.dot(x) < 0.0) y = -y;
        const double delta = (y - x).lpNorm<Eigen::Infinity>();
        x = y;
        shifted_lambda = norm;
        if (delta < kTol) break;
    }
    if (iter == kMaxIter)
        throw NumericalError("pci power iteration did not converge");
    out.iterations = iter + 1;
    out.eigenvalue = 2.0 * shifted_lambda - 1.0;

    // Back-transform to the transition matrix's right eigenvector.
    Eigen::VectorXd v(m);
    for (int a = 0; a < m; ++a)
        v(a) = x(a) / std::sqrt(static_cast<double>(ubiq[static_cast<size_t>(members[static_cast<size_t>(a)])]));

    // Sign convention: complex products are the rare ones.
    double mean_v = v.mean();
    double cov = 0.0;
    for (int a = 0; a < m; ++a)
        cov += (v(a) - mean_v) * static_cast<double>(ubiq[static_cast<size_t>(members[static_cast<size_t>(a)])]);
    if (cov > 0.0) {
        v = -v;
    } else if (cov == 0.0) {
        for (int a = 0; a < m; ++a) {
            if (v(a) != 0.0) {
                if (v(a) < 0.0) v = -v;
                break;
            }
        }
    }

    // Standardize over the block, then min-max for the weight form.
    mean_v = v.mean();
    double sd = 0.0;
    for (int a = 0; a < m; ++a) sd += (v(a) - mean_v) * (v(a) - mean_v);
    sd = std::sqrt(sd / static_cast<double>(m));
    Eigen::VectorXd z = sd > 0.0 ? Eigen::VectorXd((v.array() - mean_v) / sd) : Eigen::VectorXd::Zero(m);
    const double zmin = z.minCoeff(), zmax = z.maxCoeff();
    for (int a = 0; a < m; ++a) {
        const int p = members[static_cast<size_t>(a)];
        out.pci(p) = z(a);
        out.pci_norm(p) = (zmax - zmin) > 0.0 ? (z(a) - zmin) / (zmax - zmin) : 0.5;
        out.in_core[static_cast<size_t>(p)] = 1;
    }
    return out;
}

namespace {

ProductSpace build_space(Layer layer, const SpecializationSet& set,
                         const std::function<void(ProductNode&)>& annotate) {
    ProductSpace space;
    space.layer = layer;
    space.products = set.products;
    space.phi = proximity(set.M);
    PciResult complexity = pci(set.M);
    space.nodes.reserve(set.products.size());
    for (size_t p = 0; p < set.products.size(); ++p) {
        ProductNode node;
        node.id = set.products.label(p);
        node.pci = complexity.pci(static_cast<Eigen::Index>(p));
        node.pci_norm = complexity.pci_norm(static_cast<Eigen::Index>(p));
        node.pci_in_core = complexity.in_core[p] != 0;
        annotate(node);
        space.nodes.push_back(std::move(node));
    }
    return space;
}

}  // namespace

ProductSpace build_industry_space(const SpecializationSet& set, const HsClassMap& class_map) {
    return build_space(Layer::Industry, set, [&](ProductNode& node) {
        node.chapter = hs_chapter(node.id);
        auto it = class_map.find(node.id);
        if (it != class_map.end()) node.cls = it->second;
    });
}

ProductSpace build_firm_space(const SpecializationSet& firm_set, const ComponentTaxonomy& taxonomy) {
    return build_space(Layer::Firm, firm_set, [&](ProductNode& node) {
        const Component* comp = taxonomy.find(node.id);
        if (comp) node.cls = comp->cls;
    });
}

LayerBuild build_layers(const SpecializationSet& industry_set, const SpecializationSet& firm_set,
                        const ComponentTaxonomy& taxonomy, const HsClassMap& class_map) {
    if (industry_set.products.size() == 0) throw DataError("empty industry layer");
    if (firm_set.products.size() == 0) throw DataError("empty firm layer");
    LayerBuild out;
    out.industry = build_industry_space(industry_set, class_map);
    out.firm = build_firm_space(firm_set, taxonomy);
    for (const auto& comp : taxonomy.components)
        if (!comp.hs6_links.empty()) out.interlayer.links.emplace(comp.id, comp.hs6_links);
    return out;
}

}  // namespace tradespace
