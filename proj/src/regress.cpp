#include "tradespace/regress.hpp"

#include <algorithm>

#include "tradespace/potential.hpp"

namespace tradespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string to_string(SampleStrategy s) {
    switch (s) {
        case SampleStrategy::Random: return "random";
        case SampleStrategy::TopPci: return "top_pci";
        case SampleStrategy::BottomPci: return "bottom_pci";
    }
    return "random";
}

std::string to_string(PredictorKind p) {
    switch (p) {
        case PredictorKind::Closeness: return "closeness";
        case PredictorKind::ComplexityPotential: return "complexity_potential";
        case PredictorKind::Potential: return "potential";
    }
    return "closeness";
}

SwitchLabels label_switches(const SpecializationSet& set_t0, const SpecializationSet& set_t1) {
    if (!(set_t0.scope == set_t1.scope))
        throw DataError("switch labeling requires matching scopes (" + set_t0.scope.label() + " vs " +
                        set_t1.scope.label() + ")");
    if (!(set_t0.locations == set_t1.locations) || !(set_t0.products == set_t1.products))
        throw DataError("switch labeling requires aligned axes");
    SwitchLabels out;
    for (Eigen::Index l = 0; l < set_t0.srca.rows(); ++l)
        for (Eigen::Index p = 0; p < set_t0.srca.cols(); ++p) {
            if (!set_t0.defined(l, p) || !set_t1.defined(l, p)) continue;
            if (set_t0.srca(l, p) > 0.0) continue;  // already an advantage: not at risk
            out.pairs.emplace_back(static_cast<int>(l), static_cast<int>(p));
            out.y.push_back(set_t1.srca(l, p) > 0.0 ? 1 : 0);
        }
    return out;
}

DesignMatrix standardized_design(const std::vector<std::string>& names,
                                 const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || columns[0].empty()) throw NumericalError("empty design matrix");
    const size_t n = columns[0].size();
    DesignMatrix d;
    d.names.push_back("intercept");
    for (const auto& name : names) d.names.push_back(name);
    d.X = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size() + 1));
    d.mean.assign(columns.size() + 1, 0.0);
    d.sd.assign(columns.size() + 1, 1.0);
    for (size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != n) throw NumericalError("ragged design matrix");
        const double m = mean_of(columns[j]);
        const double s = sd_of(columns[j]);
        if (!(s > 0.0)) throw NumericalError("constant column '" + names[j] + "' in design matrix");
        d.mean[j + 1] = m;
        d.sd[j + 1] = s;
        for (size_t i = 0; i < n; ++i)
            d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = (columns[j][i] - m) / s;
    }
    return d;
}

LogitResult fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<std::string>& names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw NumericalError("design/outcome size mismatch");
    const double y_sum = y.sum();
    if (y_sum <= 0.0 || y_sum >= static_cast<double>(n))
        throw NumericalError("degenerate outcome: all responses are " + std::string(y_sum <= 0.0 ? "0" : "1"));

    constexpr int kMaxIter = 100;
    constexpr double kCoefTol = 1e-8;
    constexpr double kSeparationBound = 30.0;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    LogitResult out;
    Eigen::VectorXd mu(n), w(n);
    Eigen::MatrixXd info(k, k);
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        Eigen::VectorXd eta = X * beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            mu(i) = sigmoid(eta(i));
            w(i) = mu(i) * (1.0 - mu(i));
        }
        Eigen::VectorXd score = X.transpose() * (y - mu);
        info = X.transpose() * w.asDiagonal() * X;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        Eigen::VectorXd d = ldlt.vectorD();
        if (ldlt.info() != Eigen::Success || !(d.minCoeff() > d.maxCoeff() * 1e-14) || !d.allFinite())
            throw NumericalError("singular information matrix");
        Eigen::VectorXd step = ldlt.solve(score);
        if (!step.allFinite()) throw NumericalError("singular information matrix");
        beta += step;
        out.iterations = iter;
        if (beta.lpNorm<Eigen::Infinity>() > kSeparationBound) {
            Eigen::Index worst = 0;
            beta.cwiseAbs().maxCoeff(&worst);
            const std::string name = worst < static_cast<Eigen::Index>(names.size())
                                         ? names[static_cast<size_t>(worst)]
                                         : "column " + std::to_string(worst);
            throw NumericalError("possible perfect separation on '" + name + "'");
        }
        if (step.lpNorm<Eigen::Infinity>() < kCoefTol) {
            out.converged = true;
            break;
        }
    }

    Eigen::VectorXd eta = X * beta;
    double deviance = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        mu(i) = sigmoid(eta(i));
        w(i) = mu(i) * (1.0 - mu(i));
        const double m = std::clamp(mu(i), 1e-300, 1.0 - 1e-16);
        deviance += y(i) > 0.5 ? -2.0 * std::log(m) : -2.0 * std::log(1.0 - m);
    }
    out.deviance = deviance;
    out.score_max = (X.transpose() * (y - mu)).lpNorm<Eigen::Infinity>();

    info = X.transpose() * w.asDiagonal() * X;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    out.coef = beta;
    out.se.resize(k);
    out.zstat.resize(k);
    out.pval.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        out.se(j) = std::sqrt(std::max(cov(j, j), 0.0));
        out.zstat(j) = out.se(j) > 0.0 ? beta(j) / out.se(j) : 0.0;
        out.pval(j) = std::erfc(std::abs(out.zstat(j)) / std::sqrt(2.0));
    }
    return out;
}

std::vector<int> sample_products(const std::vector<int>& candidates, const Eigen::VectorXd& pci,
                                 SampleStrategy strategy, size_t k, uint64_t seed) {
    if (candidates.empty()) throw DataError("sample_products: empty candidate set");
    std::vector<int> pool;
    if (strategy == SampleStrategy::Random) {
        pool = candidates;
    } else {
        std::vector<int> scored;
        for (int p : candidates)
            if (std::isfinite(pci(p))) scored.push_back(p);
        if (scored.empty()) throw DataError("sample_products: no PCI values in chapter");
        std::sort(scored.begin(), scored.end(), [&](int a, int b) {
            if (pci(a) != pci(b))
                return strategy == SampleStrategy::TopPci ? pci(a) > pci(b) : pci(a) < pci(b);
            return a < b;
        });
        const size_t quartile = std::max<size_t>(
            1, static_cast<size_t>(std::ceil(static_cast<double>(scored.size()) * 0.25 - 1e-9)));
        pool.assign(scored.begin(), scored.begin() + static_cast<long>(std::min(quartile, scored.size())));
        std::sort(pool.begin(), pool.end());
    }
    std::mt19937_64 gen(seed);
    std::vector<size_t> picks = sample_indices(gen, pool.size(), k);
    std::vector<int> out;
    out.reserve(picks.size());
    for (size_t i : picks) out.push_back(pool[i]);
    std::sort(out.begin(), out.end());
    return out;
}

PredictorValues predictors(const PredictorContext& ctx, int location, int product) {
    PredictorValues v;
    const auto& set = *ctx.industry_t0;
    if (!set.col_defined[static_cast<size_t>(product)]) return v;  // absent at t0: excluded
    v.valid = true;

    const int row = ctx.closeness_t0->countries.index_of(set.locations.label(static_cast<size_t>(location)));
    v.closeness = row >= 0 ? ctx.closeness_t0->closeness(row, product) : 0.0;

    std::vector<int> basket = set.advantages(location);
    const bool held = set.M(location, product) > 0.5;
    if (!basket.empty() && !held) {
        const double prox = basket_proximity(product, basket, ctx.space_t0->phi);
        v.potential = prox;
        v.cp = prox * ctx.space_t0->nodes[static_cast<size_t>(product)].pci_norm;
    }
    auto it = ctx.export_value_t0->find({location, product});
    v.log_value = std::log1p(it != ctx.export_value_t0->end() ? it->second : 0.0);
    v.diversity = static_cast<double>((*ctx.diversity_t0)[static_cast<size_t>(location)]);
    return v;
}

namespace {

uint64_t derive_seed(uint64_t base, const std::string& chapter, const std::string& strategy) {
    Fnv1a h;
    h.update(std::to_string(base));
    h.update(std::string(":"));
    h.update(chapter);
    h.update(std::string(":"));
    h.update(strategy);
    return h.value();
}

struct Sample {
    std::vector<std::pair<int, int>> pairs;
    std::vector<uint8_t> y;
};

// Risk-set restriction of the label sets to sampled products, with the
// predictor-validity filter applied.
Sample build_sample(const SpecializationSet& labels_t0, const SpecializationSet& labels_t1,
                    const std::vector<int>& products_global, const Axis& global_products,
                    const SpecializationSet& industry_t0) {
    Sample s;
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(labels_t0.locations.size()); ++l) {
        for (int pg : products_global) {
            const int pl = labels_t0.products.index_of(global_products.label(static_cast<size_t>(pg)));
            if (pl < 0) continue;
            if (!labels_t0.defined(l, pl) || !labels_t1.defined(l, pl)) continue;
            if (labels_t0.srca(l, pl) > 0.0) continue;
            if (!industry_t0.col_defined[static_cast<size_t>(pg)]) continue;
            s.pairs.emplace_back(static_cast<int>(l), pg);
            s.y.push_back(labels_t1.srca(l, pl) > 0.0 ? 1 : 0);
        }
    }
    return s;
}

}  // namespace

std::vector<ResultRow> run_protocol(const ProtocolInputs& inputs, const ProtocolConfig& config,
                                    ProtocolReport& report) {
    const SpecializationSet& ind_t0 = *inputs.industry_t0;
    const SpecializationSet& ind_t1 = *inputs.industry_t1;
    const Axis& products = ind_t0.products;
    const Axis& locations = ind_t0.locations;

    std::map<std::pair<int, int>, double> export_value;
    for (const auto& r : inputs.trade->rows) {
        if (r.year != inputs.t0) continue;
        const int l = locations.index_of(r.exporter);
        const int p = products.index_of(r.hs6);
        if (l >= 0 && p >= 0) export_value[{l, p}] += r.value;
    }

    PredictorContext ctx;
    ctx.industry_t0 = &ind_t0;
    ctx.space_t0 = inputs.space_t0;
    ctx.closeness_t0 = inputs.closeness_t0;
    ctx.diversity_t0 = inputs.diversity_t0;
    ctx.export_value_t0 = &export_value;

    Eigen::VectorXd pci(static_cast<Eigen::Index>(products.size()));
    for (size_t p = 0; p < products.size(); ++p)
        pci(static_cast<Eigen::Index>(p)) = inputs.space_t0->nodes[p].pci;

    std::map<std::string, std::vector<int>> by_chapter;
    for (size_t p = 0; p < products.size(); ++p)
        if (ind_t0.col_defined[p]) by_chapter[hs_chapter(products.label(p))].push_back(static_cast<int>(p));

    std::vector<ResultRow> rows;
    auto fit_rows = [&](const std::string& scope, const std::string& chapter, const std::string& strategy,
                        const Sample& sample, uint64_t seed) {
        if (sample.pairs.empty()) {
            report.skipped.push_back(scope + " " + chapter + " " + strategy + ": empty risk set");
            return;
        }
        size_t positives = 0;
        for (uint8_t v : sample.y) positives += v;
        if (positives == 0 || positives == sample.y.size()) {
            report.skipped.push_back(scope + " " + chapter + " " + strategy + ": outcome has a single class");
            return;
        }

        std::vector<PredictorValues> values;
        values.reserve(sample.pairs.size());
        std::vector<uint8_t> keep(sample.pairs.size(), 0);
        for (size_t i = 0; i < sample.pairs.size(); ++i) {
            PredictorValues v = predictors(ctx, sample.pairs[i].first, sample.pairs[i].second);
            keep[i] = v.valid;
            values.push_back(v);
        }

        for (PredictorKind kind :
             {PredictorKind::Closeness, PredictorKind::ComplexityPotential, PredictorKind::Potential}) {
            ResultRow row;
            row.scope = scope;
            row.chapter = chapter;
            row.strategy = strategy;
            row.predictor = to_string(kind);
            row.seed = seed;
            std::vector<double> pred, logv, divv, yv;
            for (size_t i = 0; i < values.size(); ++i) {
                if (!keep[i]) continue;
                const auto& v = values[i];
                pred.push_back(kind == PredictorKind::Closeness            ? v.closeness
                               : kind == PredictorKind::ComplexityPotential ? v.cp
                                                                            : v.potential);
                logv.push_back(v.log_value);
                divv.push_back(v.diversity);
                yv.push_back(sample.y[i]);
            }
            row.n = static_cast<int>(yv.size());
            try {
                DesignMatrix design =
                    standardized_design({row.predictor, "log_export_value", "diversity"}, {pred, logv, divv});
                Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
                LogitResult fit = fit_logistic(design.X, y, design.names);
                row.coef = fit.coef(1);
                row.se = fit.se(1);
                row.p = fit.pval(1);
                row.converged = fit.converged;
                if (scope == "ev" && kind == PredictorKind::Closeness && fit.converged) {
                    report.ev_model.valid = true;
                    report.ev_model.beta = fit.coef(1);
                    report.ev_model.intercept = fit.coef(0);
                    report.ev_model.sigma_c = design.sd[1];
                }
            } catch (const NumericalError& e) {
                report.failures.push_back(scope + " " + chapter + " " + strategy + " " + row.predictor + ": " +
                                          e.what());
                row.coef = std::nan("");
                row.se = std::nan("");
                row.p = std::nan("");
                row.converged = false;
            }
            rows.push_back(std::move(row));
        }
    };

    for (const auto& [chapter, candidates] : by_chapter) {
        SpecializationSet labels_t0, labels_t1;
        if (config.full_srca) {
            labels_t0 = ind_t0;
            labels_t1 = ind_t1;
        } else {
            Scope scope = Scope::sectoral(chapter);
            labels_t0 = rca_matrix(*inputs.trade, inputs.t0, scope, locations, std::nullopt);
            // pin the t1 product axis to t0's so the risk set stays aligned
            labels_t1 = rca_matrix(*inputs.trade, inputs.t1, scope, locations, labels_t0.products);
        }
        for (SampleStrategy strategy : {SampleStrategy::Random, SampleStrategy::TopPci, SampleStrategy::BottomPci}) {
            const std::string strat_name = to_string(strategy);
            uint64_t seed = derive_seed(config.seed, chapter, strat_name);
            std::vector<int> chosen;
            try {
                chosen = sample_products(candidates, pci, strategy, config.k, seed);
            } catch (const DataError& e) {
                report.skipped.push_back("chapter " + chapter + " " + strat_name + ": " + e.what());
                continue;
            }
            Sample sample = build_sample(labels_t0, labels_t1, chosen, products, ind_t0);
            fit_rows("chapter", chapter, strat_name, sample, seed);
        }
    }

    // EV-only run over the full EV-specific set.
    if (!inputs.ev_products.empty()) {
        std::vector<int> ev_idx;
        std::vector<std::string> ev_present;
        for (const auto& hs6 : inputs.ev_products) {
            const int p = products.index_of(hs6);
            if (p >= 0 && ind_t0.col_defined[static_cast<size_t>(p)]) {
                ev_idx.push_back(p);
                ev_present.push_back(hs6);
            }
        }
        if (ev_idx.empty()) {
            report.skipped.push_back("ev EV all: no EV products present at t0");
        } else {
            SpecializationSet labels_t0, labels_t1;
            if (config.full_srca) {
                labels_t0 = ind_t0;
                labels_t1 = ind_t1;
            } else {
                Scope scope = Scope::subset(ev_present);
                labels_t0 = rca_matrix(*inputs.trade, inputs.t0, scope, locations, std::nullopt);
                labels_t1 = rca_matrix(*inputs.trade, inputs.t1, scope, locations, labels_t0.products);
            }
            Sample sample = build_sample(labels_t0, labels_t1, ev_idx, products, ind_t0);
            fit_rows("ev", "EV", "all", sample, config.seed);
        }
    }
    return rows;
}

}  // namespace tradespace
