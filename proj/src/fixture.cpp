#include "tradespace/fixture.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

#include "tradespace/common.hpp"
#include "tradespace/csv.hpp"

namespace tradespace {

namespace {

struct CountrySpec {
    const char* code;
    double capability;
    int firms;
};

// EU members first, then the rest; capabilities drive the nested export
// structure, firm counts spread the firm layer across enough countries to
// exercise the per-country threshold.
constexpr CountrySpec kCountries[] = {
    {"AUT", 0.72, 8},  {"BEL", 0.68, 2},  {"CZE", 0.62, 6},  {"DEU", 0.92, 38}, {"ESP", 0.66, 6},
    {"FRA", 0.82, 18}, {"HUN", 0.54, 3},  {"ITA", 0.78, 14}, {"NLD", 0.76, 6},  {"POL", 0.58, 4},
    {"SWE", 0.74, 8},  {"BRA", 0.48, 1},  {"CAN", 0.70, 10}, {"CHE", 0.84, 10}, {"CHN", 0.88, 52},
    {"GBR", 0.75, 12}, {"IND", 0.52, 1},  {"JPN", 0.86, 40}, {"KOR", 0.80, 26}, {"MEX", 0.60, 10},
    {"MYS", 0.44, 6},  {"THA", 0.46, 6},  {"TUR", 0.50, 1},  {"USA", 0.90, 44}, {"VNM", 0.42, 8},
};
constexpr size_t kNumCountries = sizeof(kCountries) / sizeof(kCountries[0]);

struct ChapterSpec {
    const char* chapter;
    int products;
};

constexpr ChapterSpec kChapters[] = {
    {"28", 10}, {"29", 10}, {"38", 10}, {"39", 10}, {"40", 10}, {"48", 10}, {"61", 10},
    {"62", 10}, {"64", 10}, {"70", 10}, {"71", 10}, {"72", 10}, {"73", 10}, {"74", 10},
    {"76", 10}, {"84", 13}, {"85", 14}, {"87", 13}, {"88", 10}, {"90", 10}, {"94", 10},
};

struct ComponentSpec {
    const char* tier1;
    const char* tier2;
    const char* tier3;
    const char* cls;
};

constexpr ComponentSpec kComponents[] = {
    {"powertrain", "battery_system", "battery_pack", "EV"},
    {"powertrain", "battery_system", "battery_module", "EV"},
    {"powertrain", "battery_system", "battery_cell", "EV"},
    {"powertrain", "battery_system", "battery_management_system", "EV"},
    {"powertrain", "electric_drive", "e_motor_stator", "EV"},
    {"powertrain", "electric_drive", "e_motor_rotor", "EV"},
    {"powertrain", "electric_drive", "inverter", "EV"},
    {"powertrain", "charging", "onboard_charger", "EV"},
    {"powertrain", "charging", "dcdc_converter", "EV"},
    {"powertrain", "charging", "charging_socket", "EV"},
    {"powertrain", "engine_structure", "engine_block", "ICE"},
    {"powertrain", "engine_structure", "cylinder_head", "ICE"},
    {"powertrain", "engine_structure", "crankshaft", "ICE"},
    {"powertrain", "engine_structure", "camshaft", "ICE"},
    {"powertrain", "engine_structure", "piston", "ICE"},
    {"powertrain", "engine_structure", "connecting_rod", "ICE"},
    {"powertrain", "fuel_system", "fuel_injector", "ICE"},
    {"powertrain", "exhaust", "exhaust_manifold", "ICE"},
    {"powertrain", "exhaust", "turbocharger", "ICE"},
    {"powertrain", "exhaust", "catalytic_converter", "ICE"},
    {"powertrain", "engine_auxiliaries", "engine_oil_pump", "ICE"},
    {"powertrain", "engine_auxiliaries", "spark_plug", "ICE"},
    {"body_interior", "seating", "seat_frame", "UNSPECIFIC"},
    {"body_interior", "cockpit", "dashboard", "UNSPECIFIC"},
    {"electronics", "distribution", "wiring_harness", "UNSPECIFIC"},
    {"chassis", "braking", "brake_caliper", "UNSPECIFIC"},
    {"chassis", "braking", "brake_disc", "UNSPECIFIC"},
    {"chassis", "suspension", "shock_absorber", "UNSPECIFIC"},
    {"chassis", "suspension", "control_arm", "UNSPECIFIC"},
    {"chassis", "steering", "steering_rack", "UNSPECIFIC"},
    {"body_interior", "climate", "hvac_unit", "UNSPECIFIC"},
    {"body_interior", "climate", "radiator", "UNSPECIFIC"},
    {"body_interior", "exterior", "door_panel", "UNSPECIFIC"},
    {"body_interior", "exterior", "bumper", "UNSPECIFIC"},
    {"electronics", "lighting", "headlamp", "UNSPECIFIC"},
    {"chassis", "wheels", "wheel_bearing", "UNSPECIFIC"},
    {"electronics", "infotainment", "infotainment_unit", "UNSPECIFIC"},
    {"electronics", "safety", "abs_module", "UNSPECIFIC"},
    {"body_interior", "exterior", "window_regulator", "UNSPECIFIC"},
    {"body_interior", "exterior", "roof_module", "UNSPECIFIC"},
};
constexpr size_t kNumComponents = sizeof(kComponents) / sizeof(kComponents[0]);

double box_muller(std::mt19937_64& gen) {
    double u1 = draw_unit(gen);
    double u2 = draw_unit(gen);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

FixturePaths generate_fixture(const std::string& dir, uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    FixturePaths paths;
    paths.dir = dir;
    paths.trade_csv = (fs::path(dir) / "trade.csv").string();
    paths.firm_csv = (fs::path(dir) / "firms.csv").string();
    paths.taxonomy_csv = (fs::path(dir) / "taxonomy.csv").string();
    paths.config_file = (fs::path(dir) / "fixture.conf").string();

    std::mt19937_64 gen(seed);

    // --- products -----------------------------------------------------------
    std::vector<std::string> products;
    std::vector<double> complexity;
    for (const auto& ch : kChapters) {
        for (int i = 0; i < ch.products; ++i) {
            char buf[16];
            snprintf(buf, sizeof(buf), "%s%04d", ch.chapter, (i * 743 + 117) % 9900 + 100);
            products.emplace_back(buf);
            complexity.push_back(0.05 + 0.9 * draw_unit(gen));
        }
    }
    const size_t n_products = products.size();

    // Pools for the taxonomy links: twelve EV codes, fourteen ICE codes,
    // twenty unspecific codes. Offsets index into the per-chapter blocks.
    auto product_at = [&](const std::string& chapter, int offset) {
        size_t base = 0;
        for (const auto& ch : kChapters) {
            if (chapter == ch.chapter) return products[base + static_cast<size_t>(offset)];
            base += static_cast<size_t>(ch.products);
        }
        throw DataError("fixture: unknown chapter " + chapter);
    };
    std::vector<std::string> ev_pool, ice_pool, uns_pool;
    for (int i = 0; i < 8; ++i) ev_pool.push_back(product_at("85", i));
    for (int i = 0; i < 2; ++i) ev_pool.push_back(product_at("87", i));
    for (int i = 0; i < 2; ++i) ev_pool.push_back(product_at("84", i));
    for (int i = 2; i < 7; ++i) ice_pool.push_back(product_at("87", i));
    for (int i = 2; i < 6; ++i) ice_pool.push_back(product_at("84", i));
    for (int i = 0; i < 3; ++i) ice_pool.push_back(product_at("40", i));
    for (int i = 0; i < 2; ++i) ice_pool.push_back(product_at("73", i));
    for (const char* ch : {"39", "70", "72", "74", "76", "90", "94", "28", "29", "48"})
        for (int i = 0; i < 2; ++i) uns_pool.push_back(product_at(ch, i));

    // --- taxonomy -----------------------------------------------------------
    {
        csv::Writer w(paths.taxonomy_csv);
        w.row({"component_id", "tier1", "tier2", "tier3", "powertrain_class", "hs6_links"});
        size_t ev_cursor = 0, ice_cursor = 0, uns_cursor = 0;
        for (size_t k = 0; k < kNumComponents; ++k) {
            const auto& comp = kComponents[k];
            const std::string cls = comp.cls;
            std::vector<std::string> links;
            if (cls == "EV") {
                // round-robin so every EV code receives at least one link
                const size_t n_links = 2 + draw_below(gen, 2);
                for (size_t j = 0; j < n_links; ++j) links.push_back(ev_pool[(ev_cursor++) % ev_pool.size()]);
            } else if (cls == "ICE") {
                const size_t n_links = 1 + draw_below(gen, 3);
                for (size_t j = 0; j < n_links; ++j) links.push_back(ice_pool[(ice_cursor++) % ice_pool.size()]);
            } else {
                const size_t n_links = 1 + draw_below(gen, 3);
                for (size_t j = 0; j < n_links; ++j) links.push_back(uns_pool[(uns_cursor++) % uns_pool.size()]);
            }
            std::sort(links.begin(), links.end());
            links.erase(std::unique(links.begin(), links.end()), links.end());
            std::string joined;
            for (size_t j = 0; j < links.size(); ++j) {
                if (j) joined += ";";
                joined += links[j];
            }
            w.row({comp.tier3, comp.tier1, comp.tier2, comp.tier3, cls, joined});
        }
        w.close();
    }

    // --- trade flows --------------------------------------------------------
    {
        const int t0 = 2012, t1 = 2022;
        csv::Writer w(paths.trade_csv);
        w.row({"year", "exporter", "importer", "hs6", "value"});

        std::vector<std::vector<uint8_t>> active0(kNumCountries, std::vector<uint8_t>(n_products, 0));
        std::vector<std::vector<uint8_t>> active1(kNumCountries, std::vector<uint8_t>(n_products, 0));
        std::vector<std::vector<double>> value0(kNumCountries, std::vector<double>(n_products, 0.0));
        std::vector<std::vector<double>> value1(kNumCountries, std::vector<double>(n_products, 0.0));
        for (size_t c = 0; c < kNumCountries; ++c) {
            const double cap = kCountries[c].capability;
            for (size_t p = 0; p < n_products; ++p) {
                const double base = cap - 0.62 * complexity[p] - 0.12;
                const double e0 = 0.33 * box_muller(gen);
                const double e1 = 0.72 * e0 + 0.30 * box_muller(gen);
                active0[c][p] = base + e0 > 0.0;
                active1[c][p] = base + 0.03 + e1 > 0.0;
                const double scale = 120.0 * (0.3 + cap) * (0.25 + complexity[p]);
                value0[c][p] = scale * std::exp(0.9 * box_muller(gen));
                value1[c][p] = scale * std::exp(0.9 * box_muller(gen)) * 1.25;
            }
        }
        // every product needs an exporter and every country a product, per year
        for (size_t p = 0; p < n_products; ++p) {
            auto force = [&](std::vector<std::vector<uint8_t>>& act) {
                for (size_t c = 0; c < kNumCountries; ++c)
                    if (act[c][p]) return;
                size_t best = 0;
                for (size_t c = 1; c < kNumCountries; ++c)
                    if (kCountries[c].capability > kCountries[best].capability) best = c;
                act[best][p] = 1;
            };
            force(active0);
            force(active1);
        }
        for (size_t c = 0; c < kNumCountries; ++c) {
            auto force = [&](std::vector<std::vector<uint8_t>>& act) {
                for (size_t p = 0; p < n_products; ++p)
                    if (act[c][p]) return;
                size_t easiest = 0;
                for (size_t p = 1; p < n_products; ++p)
                    if (complexity[p] < complexity[easiest]) easiest = p;
                act[c][easiest] = 1;
            };
            force(active0);
            force(active1);
        }

        auto emit_year = [&](int year, const std::vector<std::vector<uint8_t>>& active,
                             const std::vector<std::vector<double>>& value) {
            for (size_t c = 0; c < kNumCountries; ++c) {
                for (size_t p = 0; p < n_products; ++p) {
                    if (!active[c][p]) continue;
                    const size_t n_importers = 2 + draw_below(gen, 4);
                    std::vector<size_t> importer_idx;
                    std::vector<double> weights;
                    double weight_sum = 0.0;
                    std::set<size_t> seen;
                    while (importer_idx.size() < n_importers) {
                        size_t m = draw_below(gen, kNumCountries);
                        if (m == c || seen.count(m)) continue;
                        seen.insert(m);
                        importer_idx.push_back(m);
                        const double wgt = 0.15 + draw_unit(gen);
                        weights.push_back(wgt);
                        weight_sum += wgt;
                    }
                    for (size_t j = 0; j < importer_idx.size(); ++j) {
                        const double v = value[c][p] * weights[j] / weight_sum;
                        w.row({std::to_string(year), kCountries[c].code, kCountries[importer_idx[j]].code,
                               products[p], fmt_double(v)});
                    }
                }
            }
        };
        emit_year(t0, active0, value0);
        emit_year(t1, active1, value1);
        w.close();
    }

    // --- firms --------------------------------------------------------------
    {
        csv::Writer w(paths.firm_csv);
        w.row({"firm_id", "country", "component_id"});
        std::vector<std::pair<std::string, std::string>> firm_rows;  // firm -> country
        int firm_no = 0;
        std::vector<std::set<size_t>> firm_components;
        std::vector<int> producers(kNumComponents, 0);
        for (size_t c = 0; c < kNumCountries; ++c) {
            const double evness = 0.18 + 0.55 * kCountries[c].capability;
            for (int f = 0; f < kCountries[c].firms; ++f) {
                char buf[16];
                snprintf(buf, sizeof(buf), "F%04d", ++firm_no);
                firm_rows.emplace_back(buf, kCountries[c].code);
                std::set<size_t> comps;
                const size_t n_comp = 2 + draw_below(gen, 7);
                while (comps.size() < n_comp) {
                    size_t k;
                    if (draw_unit(gen) < evness * 0.45) {
                        k = draw_below(gen, 10);  // EV components sit first in the table
                    } else {
                        k = draw_below(gen, kNumComponents);
                    }
                    comps.insert(k);
                }
                for (size_t k : comps) ++producers[k];
                firm_components.push_back(std::move(comps));
            }
        }
        // every component needs at least two producing firms
        for (size_t k = 0; k < kNumComponents; ++k) {
            size_t f = 0;
            while (producers[k] < 2) {
                if (firm_components[f].insert(k).second) ++producers[k];
                ++f;
            }
        }
        for (size_t f = 0; f < firm_rows.size(); ++f)
            for (size_t k : firm_components[f])
                w.row({firm_rows[f].first, firm_rows[f].second, kComponents[k].tier3});
        w.close();
    }

    // --- config -------------------------------------------------------------
    {
        std::string conf;
        conf += "trade_csv = " + paths.trade_csv + "\n";
        conf += "firm_csv = " + paths.firm_csv + "\n";
        conf += "taxonomy_csv = " + paths.taxonomy_csv + "\n";
        conf += "out_dir = " + (fs::path(dir) / "out").string() + "\n";
        conf += "hs_revision = HS12\n";
        conf += "t0 = 2012\n";
        conf += "t1 = 2022\n";
        conf += "reference_year = 2022\n";
        conf += "top_quantile = 0.25\n";
        conf += "firm_threshold = 5\n";
        conf += "seed = 12345\n";
        conf += "eu_members = AUT,BEL,CZE,DEU,ESP,FRA,HUN,ITA,NLD,POL,SWE\n";
        conf += "ev_chapters = 28,29,38,39,40,48,70,71,72,73,74,76,84,85,87,88,90,94\n";
        conf += "srca_scope = sectoral\n";
        conf += "firm_layer_rca = true\n";
        conf += "closeness_variant = reachable_sum\n";
        conf += "protocol_k = 12\n";
        conf += "hhi_products = classified\n";
        csv::write_file(paths.config_file, conf);
    }

    return paths;
}

}  // namespace tradespace
