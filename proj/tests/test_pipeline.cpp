#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "tradespace/artifacts.hpp"
#include "tradespace/csv.hpp"
#include "tradespace/fixture.hpp"
#include "tradespace/pipeline.hpp"

using namespace tradespace;
using testutil::TempDir;
using testutil::write_file;

namespace {

PipelineConfig fixture_config(const FixturePaths& fx, const std::string& out_dir) {
    PipelineConfig cfg = PipelineConfig::load(fx.config_file);
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("config validation catches the documented error classes") {
    TempDir dir("cfg");
    SUBCASE("t0 must precede t1") {
        write_file(dir.file("bad.conf"),
                   "trade_csv = a\nfirm_csv = b\ntaxonomy_csv = c\nout_dir = d\nt0 = 2022\nt1 = 2012\n");
        PipelineConfig cfg = PipelineConfig::load(dir.file("bad.conf"));
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("unknown keys are rejected") {
        write_file(dir.file("bad.conf"), "trade_csv = a\nbogus_key = 1\n");
        CHECK_THROWS_AS(PipelineConfig::load(dir.file("bad.conf")), ConfigError);
    }
    SUBCASE("quantile range is enforced") {
        write_file(dir.file("bad.conf"),
                   "trade_csv = a\nfirm_csv = b\ntaxonomy_csv = c\nout_dir = d\ntop_quantile = 1.5\n");
        PipelineConfig cfg = PipelineConfig::load(dir.file("bad.conf"));
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("missing required paths are rejected") {
        write_file(dir.file("bad.conf"), "trade_csv = a\n");
        PipelineConfig cfg = PipelineConfig::load(dir.file("bad.conf"));
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("comments and blank lines parse fine") {
        write_file(dir.file("ok.conf"),
                   "# comment\n\ntrade_csv = a\nfirm_csv = b\ntaxonomy_csv = c\nout_dir = d\n");
        PipelineConfig cfg = PipelineConfig::load(dir.file("ok.conf"));
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("specialization sets round-trip through the triplet format") {
    TempDir dir("artifact");
    SpecializationSet set;
    set.year = 2022;
    set.scope = Scope::sectoral("85");
    set.locations = Axis({"AAA", "BBB"});
    set.products = Axis({"850001", "850002", "850003"});
    set.R = Eigen::MatrixXd::Zero(2, 3);
    set.R << 1.5, 0.25, 0.0, 0.0, 2.0 / 3.0, 1.0;
    set.M = (set.R.array() >= 1.0).cast<double>();
    set.srca = ((set.R.array() - 1.0) / (set.R.array() + 1.0)).matrix();
    set.row_defined = {1, 1};
    set.col_defined = {1, 1, 0};  // masked product
    for (Eigen::Index l = 0; l < 2; ++l) {
        set.R(l, 2) = 0.0;
        set.M(l, 2) = 0.0;
        set.srca(l, 2) = 0.0;
    }

    artifacts::write_specialization(set, dir.path.string(), "test_set");
    SpecializationSet loaded = artifacts::read_specialization(dir.path.string(), "test_set");
    CHECK(loaded.year == set.year);
    CHECK(loaded.scope == set.scope);
    CHECK(loaded.locations == set.locations);
    CHECK(loaded.products == set.products);
    CHECK((loaded.R - set.R).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.M - set.M).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.srca - set.srca).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.col_defined == set.col_defined);
}

TEST_CASE("product spaces round-trip through the edge list format") {
    TempDir dir("space");
    ProductSpace space;
    space.products = Axis({"850001", "870001"});
    space.phi = Eigen::MatrixXd::Zero(2, 2);
    space.phi(0, 1) = space.phi(1, 0) = 1.0 / 3.0;
    ProductNode a{"850001", "85", PowertrainClass::EV, 1.2345678901234567, 1.0, true};
    ProductNode b{"870001", "87", std::nullopt, -0.5, 0.0, true};
    space.nodes = {a, b};
    artifacts::write_product_space(space, dir.path.string(), "test_space");
    ProductSpace loaded = artifacts::read_product_space(dir.path.string(), "test_space");
    CHECK(loaded.products == space.products);
    CHECK(loaded.phi(0, 1) == space.phi(0, 1));
    CHECK(loaded.nodes[0].pci == space.nodes[0].pci);
    REQUIRE(loaded.nodes[0].cls.has_value());
    CHECK(*loaded.nodes[0].cls == PowertrainClass::EV);
    CHECK(!loaded.nodes[1].cls.has_value());
}

TEST_CASE("full pipeline on the fixture: stage reuse and corruption recovery") {
    TempDir dir("pipe");
    FixturePaths fx = generate_fixture(dir.file("fx"), 20240601);
    PipelineConfig cfg = fixture_config(fx, dir.file("out"));

    Pipeline first(cfg);
    std::vector<std::string> built = first.run();
    CHECK(built.size() == Pipeline::stage_names().size());

    SUBCASE("a second run reuses every cache") {
        Pipeline second(cfg);
        CHECK(second.run().empty());
    }

    SUBCASE("corrupting a cached file triggers a rebuild") {
        const std::string victim = dir.file("out") + "/specialization/set_firm_M.csv";
        std::string content = csv::read_file(victim);
        write_file(victim, content + "tampered\n");
        Pipeline second(cfg);
        std::vector<std::string> rebuilt = second.run();
        CHECK(!rebuilt.empty());
        CHECK(rebuilt[0] == "specialization");
        // the tampering is gone afterwards
        CHECK(csv::read_file(victim) == content);
    }

    SUBCASE("single-stage rerun without deps fails fast on an empty directory") {
        PipelineConfig fresh = cfg;
        fresh.out_dir = dir.file("out_fresh");
        Pipeline p(fresh);
        CHECK_THROWS_AS(p.run_stage("regress", false), DataError);
        CHECK_NOTHROW(p.run_stage("ingest", false));  // no deps, always buildable
    }

    SUBCASE("unknown stage names are config errors listing the valid ones") {
        Pipeline p(cfg);
        CHECK_THROWS_WITH_AS(p.run_stage("bogus", true), doctest::Contains("valid stages"), ConfigError);
    }

    SUBCASE("full-sRCA labeling variant keeps the protocol shape") {
        PipelineConfig variant = cfg;
        variant.out_dir = dir.file("out_full");
        variant.srca_full = true;
        Pipeline p(variant);
        p.run();
        size_t rows_default = 0, rows_full = 0;
        {
            csv::Reader r(dir.file("out") + "/regress/regress_results.csv");
            std::vector<std::string> f;
            size_t line = 0;
            r.require_header({"scope", "chapter", "strategy", "predictor", "coef", "se", "p", "n", "converged", "seed"});
            while (r.next(f, line)) ++rows_default;
        }
        {
            csv::Reader r(dir.file("out_full") + "/regress/regress_results.csv");
            std::vector<std::string> f;
            size_t line = 0;
            r.require_header({"scope", "chapter", "strategy", "predictor", "coef", "se", "p", "n", "converged", "seed"});
            while (r.next(f, line)) ++rows_full;
        }
        CHECK(rows_full == rows_default);
    }

    SUBCASE("advantage-mean closeness variant runs end to end") {
        PipelineConfig variant = cfg;
        variant.out_dir = dir.file("out_adv");
        variant.closeness_variant = ClosenessVariant::AdvantageMean;
        Pipeline p(variant);
        CHECK_NOTHROW(p.run());
    }
}

TEST_CASE("closeness tables round-trip through csv") {
    TempDir dir("close");
    ClosenessTable table;
    table.countries = Axis({"AAA", "BBB"});
    table.products = Axis({"850001", "850002"});
    table.closeness = Eigen::MatrixXd::Zero(2, 2);
    table.closeness << 0.125, 1.0 / 3.0, 0.0, 2.5;
    table.reachable_n = Eigen::MatrixXi::Zero(2, 2);
    table.reachable_n << 1, 2, 0, 2;
    artifacts::write_closeness(table, dir.file("c.csv"));
    ClosenessTable loaded = artifacts::read_closeness(dir.file("c.csv"), table.products);
    CHECK(loaded.countries == table.countries);
    CHECK((loaded.closeness - table.closeness).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.reachable_n - table.reachable_n).cwiseAbs().maxCoeff() == 0);
}
