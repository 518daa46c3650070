#include "tradespace/potential.hpp"

#include <algorithm>

namespace tradespace {

double basket_proximity(int g, const std::vector<int>& basket, const Eigen::MatrixXd& phi) {
    if (basket.empty()) throw NumericalError("basket_proximity: empty basket");
    double sum = 0.0;
    for (int i : basket) sum += phi(g, i);
    return sum / static_cast<double>(basket.size());
}

void standardize_scores(PotentialScore& score) {
    score.z.assign(score.raw.size(), 0.0);
    if (score.raw.empty()) return;
    const double m = mean_of(score.raw);
    const double s = sd_of(score.raw);
    if (s > 0.0)
        for (size_t i = 0; i < score.raw.size(); ++i) score.z[i] = (score.raw[i] - m) / s;
}

namespace {

struct RawScore {
    double value = 0.0;
    int n_missing = 0;
    bool flagged = false;
};

RawScore location_potential(const SpecializationSet& set, const ProductSpace& space,
                            const std::vector<int>& targets, Eigen::Index l) {
    RawScore out;
    std::vector<int> basket = set.advantages(l);
    std::vector<int> missing;
    for (int g : targets)
        if (set.M(l, g) < 0.5) missing.push_back(g);
    out.n_missing = static_cast<int>(missing.size());
    if (basket.empty() || missing.empty()) {
        out.flagged = true;
        return out;
    }
    double num = 0.0, den = 0.0;
    for (int g : missing) {
        const double prox = basket_proximity(g, basket, space.phi);
        num += prox * prox * space.nodes[static_cast<size_t>(g)].pci_norm;
        den += prox;
    }
    if (den <= 0.0) {
        out.flagged = true;
        return out;
    }
    out.value = num / den;
    return out;
}

}  // namespace

PotentialScore complexity_potential(const SpecializationSet& set, const ProductSpace& space,
                                    const std::vector<int>& targets) {
    if (!(space.products == set.products))
        throw DataError("product axes of space and specialization set differ");
    PotentialScore score;
    score.locations = set.locations;
    const size_t n = set.locations.size();
    score.raw.assign(n, 0.0);
    score.n_missing_targets.assign(n, 0);
    score.flagged.assign(n, 0);
#pragma omp parallel for schedule(static)
    for (size_t l = 0; l < n; ++l) {
        RawScore r = location_potential(set, space, targets, static_cast<Eigen::Index>(l));
        score.raw[l] = r.value;
        score.n_missing_targets[l] = r.n_missing;
        score.flagged[l] = r.flagged;
    }
    standardize_scores(score);
    return score;
}

PotentialScore firm_potential_average(const SpecializationSet& firm_set, const ProductSpace& firm_space,
                                      const std::vector<int>& targets, const FirmProductTable& firms,
                                      const FirmPotentialOptions& options) {
    if (!(firm_set.locations == firms.firms))
        throw DataError("firm axes of specialization set and firm table differ");

    std::map<std::string, std::vector<size_t>> by_country;
    for (size_t f = 0; f < firms.firm_country.size(); ++f) by_country[firms.firm_country[f]].push_back(f);

    std::vector<std::string> countries;
    for (const auto& [country, members] : by_country)
        if (members.size() > options.min_firms) countries.push_back(country);

    const size_t n_firms = firms.firms.size();
    std::vector<RawScore> firm_scores(n_firms);
#pragma omp parallel for schedule(dynamic, 32)
    for (size_t f = 0; f < n_firms; ++f)
        firm_scores[f] = location_potential(firm_set, firm_space, targets, static_cast<Eigen::Index>(f));

    PotentialScore score;
    score.locations = Axis(countries);
    score.raw.assign(countries.size(), 0.0);
    score.n_missing_targets.assign(countries.size(), 0);
    score.flagged.assign(countries.size(), 0);
    for (size_t c = 0; c < countries.size(); ++c) {
        const auto& members = by_country[countries[c]];
        double sum = 0.0;
        double missing_sum = 0.0;
        bool all_flagged = true;
        for (size_t f : members) {
            sum += firm_scores[f].value;
            missing_sum += firm_scores[f].n_missing;
            all_flagged = all_flagged && firm_scores[f].flagged;
        }
        score.raw[c] = sum / static_cast<double>(members.size());
        score.n_missing_targets[c] =
            static_cast<int>(std::lround(missing_sum / static_cast<double>(members.size())));
        score.flagged[c] = all_flagged;
    }
    standardize_scores(score);
    return score;
}

}  // namespace tradespace
