#include "tradespace/forecast.hpp"

#include <algorithm>

namespace tradespace {

std::vector<double> delta_closeness(const std::vector<double>& chapter_values) {
    const double mean = mean_of(chapter_values);
    std::vector<double> out;
    out.reserve(chapter_values.size());
    for (double v : chapter_values) out.push_back(v - mean);
    return out;
}

std::vector<GainNormalization> normalize_gains(const std::vector<double>& n_y,
                                               const std::vector<uint8_t>& in_avg_set) {
    double max_abs = 0.0;
    double avg_sum = 0.0;
    size_t avg_n = 0;
    for (size_t i = 0; i < n_y.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(n_y[i]));
        if (in_avg_set[i]) {
            avg_sum += n_y[i];
            ++avg_n;
        }
    }
    const double avg = avg_n > 0 ? avg_sum / static_cast<double>(avg_n) : 0.0;
    std::vector<GainNormalization> out(n_y.size());
    for (size_t i = 0; i < n_y.size(); ++i) {
        if (max_abs > 0.0) {
            out[i].n_rel_max = n_y[i] / max_abs;
        } else {
            out[i].flag_max = true;
        }
        if (avg != 0.0) {
            out[i].n_rel_avg = n_y[i] / avg;
        } else {
            out[i].flag_avg = true;
        }
    }
    return out;
}

std::vector<GainRow> expected_gains(const std::vector<ChapterClosenessRow>& chapter_closeness,
                                    const std::map<std::string, double>& notheld_by_country,
                                    const ForecastParams& params) {
    if (!(params.sigma_c > 0.0)) throw NumericalError("degenerate model: sigma_c must be positive");
    const std::set<std::string> ev_chapters(params.ev_chapters.begin(), params.ev_chapters.end());

    std::map<std::string, std::vector<const ChapterClosenessRow*>> by_country;
    for (const auto& row : chapter_closeness) by_country[row.country].push_back(&row);

    std::vector<GainRow> out;
    const double base = sigmoid(params.intercept);
    for (const auto& [country, rows] : by_country) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (const auto* r : rows) values.push_back(r->value);
        std::vector<double> deltas = delta_closeness(values);

        auto nh = notheld_by_country.find(country);
        const double notheld = nh != notheld_by_country.end() ? nh->second : 0.0;

        std::vector<GainRow> group;
        for (size_t i = 0; i < rows.size(); ++i) {
            GainRow g;
            g.country = country;
            g.chapter = rows[i]->chapter;
            g.delta_c = deltas[i];
            g.x_std = g.delta_c / params.sigma_c;
            g.delta_p = sigmoid(params.beta * g.x_std + params.intercept) - base;
            g.n_y = g.delta_p * notheld;
            group.push_back(std::move(g));
        }

        std::vector<double> gains;
        std::vector<uint8_t> in_avg;
        for (const auto& g : group) {
            gains.push_back(g.n_y);
            in_avg.push_back(ev_chapters.count(g.chapter) > 0);
        }
        std::vector<GainNormalization> norm = normalize_gains(gains, in_avg);
        for (size_t i = 0; i < group.size(); ++i) {
            group[i].n_rel_max = norm[i].n_rel_max;
            group[i].n_rel_avg = norm[i].n_rel_avg;
            group[i].flag_max = norm[i].flag_max;
            group[i].flag_avg = norm[i].flag_avg;
            out.push_back(std::move(group[i]));
        }
    }
    return out;
}

}  // namespace tradespace
