#pragma once

#include "tradespace/centrality.hpp"
#include "tradespace/regress.hpp"

namespace tradespace {

struct GainRow {
    std::string country;
    std::string chapter;
    double delta_c = 0.0;
    double x_std = 0.0;
    double delta_p = 0.0;
    double n_y = 0.0;
    double n_rel_max = 0.0;  // n_y relative to the country's largest |n_y|
    double n_rel_avg = 0.0;  // n_y relative to the mean over the EV-relevant chapters
    bool flag_max = false;   // zero denominator
    bool flag_avg = false;
};

// Per-chapter deviations from the country mean (centering identity: sums to
// zero over the present chapters).
std::vector<double> delta_closeness(const std::vector<double>& chapter_values);

struct GainNormalization {
    double n_rel_max = 0.0;
    double n_rel_avg = 0.0;
    bool flag_max = false;
    bool flag_avg = false;
};

// Both relative views of one country's gains: (a) division by the largest
// |n_y|, (b) ratio to the mean n_y over the comparison-set chapters
// (in_avg_set marks membership). Zero denominators flag the entries.
std::vector<GainNormalization> normalize_gains(const std::vector<double>& n_y,
                                               const std::vector<uint8_t>& in_avg_set);

struct ForecastParams {
    double beta = 0.0;
    double intercept = 0.0;
    double sigma_c = 0.0;                  // sd of closeness from the fitted model's record
    std::vector<std::string> ev_chapters;  // comparison set for the sector-average multiple
};

// Expected new target-specific strengths per (country, chapter):
// X_std = delta_c / sigma_c, delta_p = sigmoid(beta X_std + intercept) -
// sigmoid(intercept), n_y = delta_p * n_notheld(country). Both relative
// normalizations are emitted.
std::vector<GainRow> expected_gains(const std::vector<ChapterClosenessRow>& chapter_closeness,
                                    const std::map<std::string, double>& notheld_by_country,
                                    const ForecastParams& params);

}  // namespace tradespace
