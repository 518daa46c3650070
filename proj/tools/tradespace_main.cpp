#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "tradespace/fixture.hpp"
#include "tradespace/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    long seed_override = -1;
    int jobs = 0;
};

tradespace::PipelineConfig load_config(const CommonOpts& opts) {
    tradespace::PipelineConfig cfg = tradespace::PipelineConfig::load(opts.config_path);
    if (!opts.out_override.empty()) cfg.out_dir = opts.out_override;
    if (opts.seed_override >= 0) cfg.seed = static_cast<uint64_t>(opts.seed_override);
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file")->required();
    cmd->add_option("--out", opts.out_override, "override the configured output directory");
    cmd->add_option("--seed", opts.seed_override, "override the configured random seed");
    cmd->add_option("--jobs", opts.jobs, "worker threads for parallel kernels (0 = default)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tradespace: specialization matrices, product spaces, closeness, complexity potential,\n"
                 "switch regressions, expected-gain forecasts and import concentration from trade and\n"
                 "firm component data"};
    app.require_subcommand(1);

    CommonOpts run_opts, stage_opts, validate_opts;
    std::string stage_name;
    bool no_build_deps = false;
    std::string fixture_dir;
    long fixture_seed = 20240601;

    CLI::App* cmd_run = app.add_subcommand("run", "execute the full pipeline");
    add_common(cmd_run, run_opts);

    CLI::App* cmd_stage = app.add_subcommand("stage", "execute a single stage, reusing cached inputs");
    cmd_stage->add_option("name", stage_name, "stage to run")->required();
    add_common(cmd_stage, stage_opts);
    cmd_stage->add_flag("--no-build-deps", no_build_deps, "fail instead of rebuilding missing upstream caches");

    CLI::App* cmd_validate = app.add_subcommand("validate-config", "parse and validate a config file");
    cmd_validate->add_option("--config", validate_opts.config_path, "pipeline config file")->required();

    CLI::App* cmd_fixture = app.add_subcommand("fixture", "emit the bundled synthetic dataset");
    cmd_fixture->add_option("--out", fixture_dir, "directory for the generated dataset")->required();
    cmd_fixture->add_option("--seed", fixture_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (cmd_run->parsed()) {
            tradespace::Pipeline pipeline(load_config(run_opts));
            std::vector<std::string> rebuilt = pipeline.run();
            if (rebuilt.empty()) {
                printf("all stages up to date in %s\n", pipeline.config().out_dir.c_str());
            } else {
                for (const auto& name : rebuilt) printf("built %s\n", name.c_str());
                printf("artifacts in %s\n", pipeline.config().out_dir.c_str());
            }
        } else if (cmd_stage->parsed()) {
            tradespace::Pipeline pipeline(load_config(stage_opts));
            pipeline.run_stage(stage_name, !no_build_deps);
            printf("built %s\n", stage_name.c_str());
        } else if (cmd_validate->parsed()) {
            tradespace::PipelineConfig cfg = tradespace::PipelineConfig::load(validate_opts.config_path);
            cfg.validate();
            printf("%s", cfg.normalized().c_str());
            printf("out_dir = %s\n", cfg.out_dir.c_str());
        } else if (cmd_fixture->parsed()) {
            tradespace::FixturePaths paths =
                tradespace::generate_fixture(fixture_dir, static_cast<uint64_t>(fixture_seed));
            printf("trade:    %s\n", paths.trade_csv.c_str());
            printf("firms:    %s\n", paths.firm_csv.c_str());
            printf("taxonomy: %s\n", paths.taxonomy_csv.c_str());
            printf("config:   %s\n", paths.config_file.c_str());
        }
    } catch (const tradespace::ConfigError& e) {
        fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const tradespace::DataError& e) {
        fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const tradespace::NumericalError& e) {
        fprintf(stderr, "numerical error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
