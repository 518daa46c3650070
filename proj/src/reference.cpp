#include "tradespace/reference.hpp"

#include <algorithm>
#include <limits>

namespace tradespace::reference {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd proximity(const Eigen::MatrixXd& M) {
    const Eigen::Index n_loc = M.rows();
    const Eigen::Index n_prod = M.cols();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_prod, n_prod);
    for (Eigen::Index p = 0; p < n_prod; ++p) {
        for (Eigen::Index q = 0; q < n_prod; ++q) {
            if (p == q) continue;
            double co = 0.0, up = 0.0, uq = 0.0;
            for (Eigen::Index c = 0; c < n_loc; ++c) {
                const bool a = M(c, p) > 0.5;
                const bool b = M(c, q) > 0.5;
                if (a) up += 1.0;
                if (b) uq += 1.0;
                if (a && b) co += 1.0;
            }
            if (up > 0.0 && uq > 0.0) phi(p, q) = co / std::max(up, uq);
        }
    }
    return phi;
}

Eigen::MatrixXd min_conditional_proximity(const Eigen::MatrixXd& M) {
    const Eigen::Index n_loc = M.rows();
    const Eigen::Index n_prod = M.cols();
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_prod, n_prod);
    for (Eigen::Index g = 0; g < n_prod; ++g) {
        for (Eigen::Index i = 0; i < n_prod; ++i) {
            if (g == i) continue;
            double co = 0.0, ug = 0.0, ui = 0.0;
            for (Eigen::Index c = 0; c < n_loc; ++c) {
                const bool a = M(c, g) > 0.5;
                const bool b = M(c, i) > 0.5;
                if (a) ug += 1.0;
                if (b) ui += 1.0;
                if (a && b) co += 1.0;
            }
            if (ug > 0.0 && ui > 0.0) phi(g, i) = std::min(co / ui, co / ug);
        }
    }
    return phi;
}

double balassa(const Eigen::MatrixXd& X, Eigen::Index location, Eigen::Index product) {
    double row = 0.0, col = 0.0, grand = 0.0;
    for (Eigen::Index p = 0; p < X.cols(); ++p) row += X(location, p);
    for (Eigen::Index c = 0; c < X.rows(); ++c) col += X(c, product);
    for (Eigen::Index c = 0; c < X.rows(); ++c)
        for (Eigen::Index p = 0; p < X.cols(); ++p) grand += X(c, p);
    if (!(row > 0.0) || !(col > 0.0) || !(grand > 0.0)) return std::nan("");
    return (X(location, product) / row) / (col / grand);
}

Eigen::MatrixXd all_pairs_distances(const Eigen::MatrixXd& lengths) {
    const Eigen::Index n = lengths.rows();
    Eigen::MatrixXd dist = lengths;
    for (Eigen::Index i = 0; i < n; ++i) dist(i, i) = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i) {
            if (dist(i, k) == kInf) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double through = dist(i, k) + dist(k, j);
                if (through < dist(i, j)) dist(i, j) = through;
            }
        }
    return dist;
}

std::vector<double> closeness_from_distances(const Eigen::MatrixXd& dist) {
    const Eigen::Index n = dist.rows();
    std::vector<double> out(static_cast<size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = 0.0;
        int reach = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i || dist(i, j) == kInf) continue;
            sum += dist(i, j);
            ++reach;
        }
        out[static_cast<size_t>(i)] = reach > 0 ? static_cast<double>(n - 1) / sum : 0.0;
    }
    return out;
}

double hhi(const std::vector<double>& supplier_values) {
    double total = 0.0;
    for (double v : supplier_values)
        if (v > 0.0) total += v;
    double out = 0.0;
    for (double v : supplier_values)
        if (v > 0.0) out += (v / total) * (v / total);
    return out;
}

}  // namespace tradespace::reference
