#pragma once

#include "tradespace/centrality.hpp"
#include "tradespace/productspace.hpp"

namespace tradespace {

// Advantage-switch outcome over the risk set (pairs with sRCA <= 0 at t0,
// defined in both years). y = 1 iff sRCA > 0 at t1.
struct SwitchLabels {
    std::vector<std::pair<int, int>> pairs;  // (location, product) indices
    std::vector<uint8_t> y;
};

SwitchLabels label_switches(const SpecializationSet& set_t0, const SpecializationSet& set_t1);

struct LogitResult {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd zstat;
    Eigen::VectorXd pval;
    int iterations = 0;
    double deviance = 0.0;
    double score_max = 0.0;
    bool converged = false;
};

// Maximum-likelihood logistic fit by iteratively reweighted least squares.
// X must carry the intercept in column 0 and standardized predictors after
// it. Converges when max |delta coef| < 1e-8, caps at 100 iterations.
// Standard errors come from the inverse Fisher information; p-values are
// two-sided normal. Throws on a degenerate outcome vector, a singular
// information matrix, or runaway coefficients (perfect separation).
LogitResult fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<std::string>& names);

struct DesignMatrix {
    Eigen::MatrixXd X;  // column 0 = intercept
    std::vector<std::string> names;
    std::vector<double> mean;  // per column; intercept slots are 0/1
    std::vector<double> sd;
};

// Zero-mean unit-sd scaling of every column except the intercept, computed
// on the estimation sample. Throws on constant columns.
DesignMatrix standardized_design(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns);

double sigmoid(double x);

enum class SampleStrategy { Random, TopPci, BottomPci };

std::string to_string(SampleStrategy s);

// k distinct products drawn with a seeded generator; quartile strategies
// restrict to the top/bottom PCI quartile first (all available products when
// fewer than k remain).
std::vector<int> sample_products(const std::vector<int>& candidates, const Eigen::VectorXd& pci,
                                 SampleStrategy strategy, size_t k, uint64_t seed);

enum class PredictorKind { Closeness, ComplexityPotential, Potential };

std::string to_string(PredictorKind p);

// Everything the per-pair predictor evaluation needs, all anchored at t0.
struct PredictorContext {
    const SpecializationSet* industry_t0 = nullptr;
    const ProductSpace* space_t0 = nullptr;
    const ClosenessTable* closeness_t0 = nullptr;
    const std::vector<int>* diversity_t0 = nullptr;
    // (location, product) -> export value at t0
    const std::map<std::pair<int, int>, double>* export_value_t0 = nullptr;
};

struct PredictorValues {
    double closeness = 0.0;
    double cp = 0.0;          // basket proximity x not-held x pci_norm
    double potential = 0.0;   // basket proximity x not-held
    double log_value = 0.0;   // log(1 + export value at t0)
    double diversity = 0.0;
    bool valid = false;
};

PredictorValues predictors(const PredictorContext& ctx, int location, int product);

struct ResultRow {
    std::string scope;      // "chapter" | "ev"
    std::string chapter;    // HS chapter or "EV"
    std::string strategy;   // random | top_pci | bottom_pci | all
    std::string predictor;  // closeness | complexity_potential | potential
    double coef = 0.0;
    double se = 0.0;
    double p = 0.0;
    int n = 0;
    bool converged = false;
    uint64_t seed = 0;
};

struct EvModelRecord {
    bool valid = false;
    double beta = 0.0;
    double intercept = 0.0;
    double sigma_c = 0.0;  // sd of the raw closeness predictor on the EV sample
};

struct ProtocolReport {
    std::vector<std::string> skipped;   // degenerate risk sets
    std::vector<std::string> failures;  // numerical fit failures
    EvModelRecord ev_model;
};

struct ProtocolConfig {
    uint64_t seed = 12345;
    size_t k = 12;
    bool full_srca = false;  // label switches from industry-wide sRCA instead of sectoral
};

struct ProtocolInputs {
    const TradeTable* trade = nullptr;
    int t0 = 0;
    int t1 = 0;
    const SpecializationSet* industry_t0 = nullptr;
    const SpecializationSet* industry_t1 = nullptr;
    const ProductSpace* space_t0 = nullptr;
    const ClosenessTable* closeness_t0 = nullptr;
    const std::vector<int>* diversity_t0 = nullptr;
    std::vector<std::string> ev_products;
};

// One model per (chapter, strategy, predictor) with both controls, plus the
// EV-only models. Chapters with a degenerate risk set are skipped with a
// reason; numerical fit failures keep their row with converged = 0.
std::vector<ResultRow> run_protocol(const ProtocolInputs& inputs, const ProtocolConfig& config,
                                    ProtocolReport& report);

}  // namespace tradespace
