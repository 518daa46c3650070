#include "doctest.h"
#include "helpers.hpp"
#include "tradespace/concentration.hpp"
#include "tradespace/reference.hpp"

using namespace tradespace;

namespace {

TradeTable table_from(std::vector<TradeRecord> rows) {
    TradeTable t;
    t.hs_revision = "HS12";
    t.rows = std::move(rows);
    return t;
}

SpecializationSet empty_ref_set() {
    SpecializationSet set;
    set.locations = Axis(std::vector<std::string>{"XXX"});
    set.products = Axis(std::vector<std::string>{"999999"});
    set.R = Eigen::MatrixXd::Zero(1, 1);
    set.M = set.R;
    set.srca = set.R;
    set.row_defined = {1};
    set.col_defined = {1};
    return set;
}

}  // namespace

TEST_CASE("hhi of explicit share vectors") {
    CHECK(hhi_from_values({42.0}) == 1.0);
    CHECK(hhi_from_values({50.0, 50.0}) == 0.5);
    int n = 0;
    CHECK(hhi_from_values({50.0, 30.0, 20.0}, &n) == 0.38);
    CHECK(n == 3);
    CHECK_THROWS_AS(hhi_from_values({0.0, 0.0}), NumericalError);
}

TEST_CASE("hhi_single groups supplier flows for one importer and product") {
    TradeTable t = table_from({
        {2022, "AAA", "DEU", "850001", 50},
        {2022, "BBB", "DEU", "850001", 30},
        {2022, "CCC", "DEU", "850001", 20},
        {2022, "AAA", "FRA", "850001", 10},
    });
    int n = 0;
    auto h = hhi_single(t, 2022, "DEU", "850001", &n);
    REQUIRE(h.has_value());
    CHECK(*h == 0.38);
    CHECK(n == 3);
    CHECK(!hhi_single(t, 2022, "DEU", "123456").has_value());
}

TEST_CASE("hhi bounds, merge monotonicity and scale invariance") {
    std::mt19937_64 gen(97);
    for (int rep = 0; rep < 200; ++rep) {
        const size_t n = 1 + draw_below(gen, 12);
        std::vector<double> v;
        for (size_t i = 0; i < n; ++i) v.push_back(draw_unit(gen) * 100.0 + 0.001);
        const double h = hhi_from_values(v);
        CHECK(h >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(h <= 1.0 + 1e-12);
        CHECK(h == doctest::Approx(reference::hhi(v)).epsilon(1e-14));

        if (n >= 2) {
            std::vector<double> merged(v.begin() + 1, v.end());
            merged[0] += v[0];
            CHECK(hhi_from_values(merged) >= h - 1e-12);
        }
        std::vector<double> scaled = v;
        for (double& x : scaled) x *= 7.25;
        CHECK(hhi_from_values(scaled) == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("normalization divides by the global mean") {
    TradeTable t = table_from({
        // DEU imports 850001 from one supplier: hhi 1.0
        {2022, "AAA", "DEU", "850001", 100},
        // FRA imports 850001 from two equal suppliers: hhi 0.5
        {2022, "AAA", "FRA", "850001", 50},
        {2022, "BBB", "FRA", "850001", 50},
    });
    ConcentrationOptions options;
    options.year = 2022;
    auto rows = concentration_table(t, empty_ref_set(), {}, options);
    REQUIRE(rows.size() == 2);
    // mean = 0.75: rel = (4/3, 2/3)
    CHECK(rows[0].hhi_rel == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(rows[1].hhi_rel == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    double mean_rel = (rows[0].hhi_rel + rows[1].hhi_rel) / 2.0;
    CHECK(mean_rel == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("equal concentration everywhere normalizes to one") {
    TradeTable t = table_from({
        {2022, "AAA", "DEU", "850001", 10},
        {2022, "AAA", "FRA", "850001", 99},
        {2022, "AAA", "ITA", "850001", 5},
    });
    ConcentrationOptions options;
    options.year = 2022;
    auto rows = concentration_table(t, empty_ref_set(), {}, options);
    for (const auto& r : rows) CHECK(r.hhi_rel == 1.0);
}

TEST_CASE("EU pooling excludes intra-EU flows") {
    ConcentrationOptions options;
    options.year = 2022;
    options.eu_members = {"DEU", "FRA"};

    SUBCASE("two members importing from the same external supplier pool to hhi 1") {
        TradeTable t = table_from({
            {2022, "CHN", "DEU", "850001", 50},
            {2022, "CHN", "FRA", "850001", 50},
        });
        auto rows = concentration_table(t, empty_ref_set(), {}, options);
        bool found = false;
        for (const auto& r : rows)
            if (r.importer == "EU" && r.hs6 == "850001") {
                found = true;
                CHECK(r.hhi == 1.0);
                CHECK(r.n_suppliers == 1);
            }
        CHECK(found);
    }
    SUBCASE("members trading only with each other produce no EU entry") {
        TradeTable t = table_from({
            {2022, "DEU", "FRA", "850001", 50},
            {2022, "FRA", "DEU", "850001", 50},
        });
        auto rows = concentration_table(t, empty_ref_set(), {}, options);
        for (const auto& r : rows) CHECK(r.importer != "EU");
    }
    SUBCASE("external suppliers at 60/40 pool to 0.52") {
        TradeTable t = table_from({
            {2022, "CHN", "DEU", "850001", 60},
            {2022, "USA", "FRA", "850001", 40},
        });
        auto rows = concentration_table(t, empty_ref_set(), {}, options);
        for (const auto& r : rows)
            if (r.importer == "EU") CHECK(r.hhi == doctest::Approx(0.52).epsilon(1e-14));
    }
    SUBCASE("pooling a single member matches the member's own external hhi") {
        TradeTable t = table_from({
            {2022, "CHN", "DEU", "850001", 70},
            {2022, "USA", "DEU", "850001", 30},
        });
        ConcentrationOptions solo;
        solo.year = 2022;
        solo.eu_members = {"DEU"};
        auto rows = concentration_table(t, empty_ref_set(), {}, solo);
        double member = -1.0, pooled = -2.0;
        for (const auto& r : rows) {
            if (r.importer == "DEU") member = r.hhi;
            if (r.importer == "EU") pooled = r.hhi;
        }
        CHECK(member == pooled);
    }
}

TEST_CASE("class labels and rca flags are attached, product filter applies") {
    TradeTable t = table_from({
        {2022, "AAA", "DEU", "850001", 60},
        {2022, "BBB", "DEU", "850001", 40},
        {2022, "AAA", "DEU", "999999", 10},
    });
    // DEU exports nothing here, AAA exports both products; build a set where
    // AAA has R >= 1 on 850001
    SpecializationSet set;
    set.locations = Axis(std::vector<std::string>{"AAA", "DEU"});
    set.products = Axis(std::vector<std::string>{"850001"});
    set.R = Eigen::MatrixXd::Zero(2, 1);
    set.R(0, 0) = 1.5;
    set.M = Eigen::MatrixXd::Zero(2, 1);
    set.M(0, 0) = 1.0;
    set.srca = Eigen::MatrixXd::Zero(2, 1);
    set.row_defined = {1, 1};
    set.col_defined = {1};

    HsClassMap class_map = {{"850001", PowertrainClass::EV}};
    ConcentrationOptions options;
    options.year = 2022;
    options.product_filter = {"850001"};

    auto rows = concentration_table(t, set, class_map, options);
    REQUIRE(rows.size() == 1);  // 999999 filtered out
    CHECK(rows[0].importer == "DEU");
    CHECK(rows[0].cls == "EV");
    CHECK(rows[0].rca_flag == 0);  // DEU itself has no advantage in the set
    CHECK(rows[0].n_suppliers == 2);
}
