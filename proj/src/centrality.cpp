#include "tradespace/centrality.hpp"

#include <algorithm>
#include <limits>

namespace tradespace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CountrySubspace country_subspace(const ProductSpace& space, const SpecializationSet& set,
                                 const std::string& country) {
    const int l = set.locations.index_of(country);
    if (l < 0) throw DataError("country '" + country + "' absent from specialization set");
    if (!(space.products == set.products))
        throw DataError("product axes of space and specialization set differ");

    const Eigen::Index n = space.phi.rows();
    CountrySubspace sub;
    sub.country = country;
    sub.n_nodes = static_cast<int>(n);

    std::vector<uint8_t> adv(static_cast<size_t>(n), 0);
    for (Eigen::Index p = 0; p < n; ++p) adv[static_cast<size_t>(p)] = set.M(l, p) > 0.5;

    std::vector<int> degree(static_cast<size_t>(n), 0);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q)
            if (space.phi(p, q) > 0.0 && (adv[static_cast<size_t>(p)] || adv[static_cast<size_t>(q)])) {
                ++degree[static_cast<size_t>(p)];
                ++degree[static_cast<size_t>(q)];
            }
    sub.offsets.assign(static_cast<size_t>(n) + 1, 0);
    for (Eigen::Index p = 0; p < n; ++p) sub.offsets[static_cast<size_t>(p) + 1] = sub.offsets[static_cast<size_t>(p)] + degree[static_cast<size_t>(p)];
    sub.neighbors.assign(static_cast<size_t>(sub.offsets.back()), 0);
    sub.lengths.assign(static_cast<size_t>(sub.offsets.back()), 0.0);
    std::vector<int> fill(sub.offsets.begin(), sub.offsets.end() - 1);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = p + 1; q < n; ++q) {
            const double phi = space.phi(p, q);
            if (phi > 0.0 && (adv[static_cast<size_t>(p)] || adv[static_cast<size_t>(q)])) {
                const double len = 1.0 / phi;
                sub.neighbors[static_cast<size_t>(fill[static_cast<size_t>(p)])] = static_cast<int>(q);
                sub.lengths[static_cast<size_t>(fill[static_cast<size_t>(p)]++)] = len;
                sub.neighbors[static_cast<size_t>(fill[static_cast<size_t>(q)])] = static_cast<int>(p);
                sub.lengths[static_cast<size_t>(fill[static_cast<size_t>(q)]++)] = len;
            }
        }
    return sub;
}

std::vector<double> shortest_paths(const CountrySubspace& sub, int source) {
    const int n = sub.n_nodes;
    std::vector<double> dist(static_cast<size_t>(n), kInf);
    std::vector<uint8_t> done(static_cast<size_t>(n), 0);
    dist[static_cast<size_t>(source)] = 0.0;
    for (int round = 0; round < n; ++round) {
        int u = -1;
        double best = kInf;
        for (int v = 0; v < n; ++v)
            if (!done[static_cast<size_t>(v)] && dist[static_cast<size_t>(v)] < best) {
                best = dist[static_cast<size_t>(v)];
                u = v;
            }
        if (u < 0) break;
        done[static_cast<size_t>(u)] = 1;
        for (int e = sub.offsets[static_cast<size_t>(u)]; e < sub.offsets[static_cast<size_t>(u) + 1]; ++e) {
            const int v = sub.neighbors[static_cast<size_t>(e)];
            const double cand = dist[static_cast<size_t>(u)] + sub.lengths[static_cast<size_t>(e)];
            if (cand < dist[static_cast<size_t>(v)]) dist[static_cast<size_t>(v)] = cand;
        }
    }
    return dist;
}

ClosenessColumn closeness_all(const CountrySubspace& sub, ClosenessVariant variant,
                              const std::vector<int>& advantage_nodes) {
    const int n = sub.n_nodes;
    ClosenessColumn out;
    out.closeness.assign(static_cast<size_t>(n), 0.0);
    out.reachable_n.assign(static_cast<size_t>(n), 0);

    std::vector<uint8_t> is_adv(static_cast<size_t>(n), 0);
    for (int a : advantage_nodes) is_adv[static_cast<size_t>(a)] = 1;

#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) {
        std::vector<double> dist = shortest_paths(sub, i);
        double sum = 0.0;
        int reach = 0;
        if (variant == ClosenessVariant::ReachableSum) {
            for (int j = 0; j < n; ++j) {
                if (j == i || dist[static_cast<size_t>(j)] == kInf) continue;
                sum += dist[static_cast<size_t>(j)];
                ++reach;
            }
            out.closeness[static_cast<size_t>(i)] = reach > 0 ? static_cast<double>(n - 1) / sum : 0.0;
        } else {
            int n_adv = 0;
            for (int j = 0; j < n; ++j) {
                if (j == i || !is_adv[static_cast<size_t>(j)]) continue;
                ++n_adv;
                if (dist[static_cast<size_t>(j)] == kInf) continue;
                sum += 1.0 / dist[static_cast<size_t>(j)];
                ++reach;
            }
            out.closeness[static_cast<size_t>(i)] = n_adv > 0 ? sum / static_cast<double>(n_adv) : 0.0;
        }
        out.reachable_n[static_cast<size_t>(i)] = reach;
    }
    return out;
}

ClosenessTable closeness_table(const ProductSpace& space, const SpecializationSet& set,
                               const std::vector<std::string>& countries, ClosenessVariant variant) {
    ClosenessTable table;
    table.countries = Axis(countries);
    table.products = space.products;
    const Eigen::Index n_c = static_cast<Eigen::Index>(countries.size());
    const Eigen::Index n_p = static_cast<Eigen::Index>(space.products.size());
    table.closeness = Eigen::MatrixXd::Zero(n_c, n_p);
    table.reachable_n = Eigen::MatrixXi::Zero(n_c, n_p);
    for (Eigen::Index c = 0; c < n_c; ++c) {
        CountrySubspace sub = country_subspace(space, set, countries[static_cast<size_t>(c)]);
        std::vector<int> adv;
        if (variant == ClosenessVariant::AdvantageMean)
            adv = set.advantages(set.locations.index_of(countries[static_cast<size_t>(c)]));
        ClosenessColumn col = closeness_all(sub, variant, adv);
        for (Eigen::Index p = 0; p < n_p; ++p) {
            table.closeness(c, p) = col.closeness[static_cast<size_t>(p)];
            table.reachable_n(c, p) = col.reachable_n[static_cast<size_t>(p)];
        }
    }
    return table;
}

double chapter_closeness(const std::vector<double>& closeness, const Axis& products,
                         const std::string& chapter, double top_quantile) {
    std::vector<std::pair<double, std::string>> values;
    for (size_t p = 0; p < products.size(); ++p)
        if (hs_chapter(products.label(p)) == chapter) values.emplace_back(closeness[p], products.label(p));
    if (values.empty()) throw DataError("chapter '" + chapter + "' has no products");
    std::sort(values.begin(), values.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const size_t keep = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(static_cast<double>(values.size()) * top_quantile - 1e-9)));
    double sum = 0.0;
    for (size_t i = 0; i < keep && i < values.size(); ++i) sum += values[i].first;
    return sum / static_cast<double>(std::min(keep, values.size()));
}

std::vector<ChapterClosenessRow> chapter_closeness_table(const ClosenessTable& table,
                                                         const std::vector<std::string>& chapters,
                                                         double top_quantile) {
    std::vector<ChapterClosenessRow> rows;
    for (size_t c = 0; c < table.countries.size(); ++c) {
        std::vector<double> col(table.products.size());
        for (size_t p = 0; p < table.products.size(); ++p)
            col[p] = table.closeness(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p));
        for (const auto& chapter : chapters) {
            bool present = false;
            for (size_t p = 0; p < table.products.size() && !present; ++p)
                present = hs_chapter(table.products.label(p)) == chapter;
            if (!present) continue;  // entry skipped, not an error
            rows.push_back({table.countries.label(c), chapter,
                            chapter_closeness(col, table.products, chapter, top_quantile)});
        }
    }
    return rows;
}

std::vector<DecompositionRow> contribution_decomposition(const ProductSpace& space, const SpecializationSet& set,
                                                         const std::vector<std::string>& countries,
                                                         const std::vector<std::string>& targets) {
    std::vector<int> target_idx;
    for (const auto& t : targets) {
        int p = space.products.index_of(t);
        if (p < 0) throw DataError("target product '" + t + "' absent from product space");
        target_idx.push_back(p);
    }
    std::vector<DecompositionRow> rows;
    for (const auto& country : countries) {
        CountrySubspace sub = country_subspace(space, set, country);
        for (size_t t = 0; t < target_idx.size(); ++t) {
            std::vector<double> dist = shortest_paths(sub, target_idx[t]);
            std::map<std::string, double> mass;
            double total = 0.0;
            for (int j = 0; j < sub.n_nodes; ++j) {
                if (j == target_idx[t] || dist[static_cast<size_t>(j)] == kInf) continue;
                const double w = 1.0 / dist[static_cast<size_t>(j)];
                mass[hs_chapter(space.products.label(static_cast<size_t>(j)))] += w;
                total += w;
            }
            if (total <= 0.0) continue;  // isolated target: no shares
            for (const auto& [chapter, w] : mass)
                rows.push_back({country, targets[t], chapter, w / total});
        }
    }
    return rows;
}

}  // namespace tradespace
