#pragma once

#include <string>
#include <vector>

#include "tradespace/centrality.hpp"

namespace tradespace {

// Single key-value config file; every knob that can change an output lives
// here so the manifest's config hash keys the whole run.
struct PipelineConfig {
    std::string trade_csv;
    std::string firm_csv;
    std::string taxonomy_csv;
    std::string alias_csv;  // optional
    std::string out_dir;
    std::string hs_revision = "HS12";
    int t0 = 2012;
    int t1 = 2022;
    int reference_year = 2022;
    int weights_year = 0;  // 0: follow reference_year
    double top_quantile = 0.25;
    size_t firm_threshold = 150;
    uint64_t seed = 12345;
    int jobs = 0;
    std::vector<std::string> eu_members;
    std::vector<std::string> ev_chapters = {"28", "29", "38", "39", "40", "48", "70", "71", "72",
                                            "73", "74", "76", "84", "85", "87", "88", "90", "94"};
    bool srca_full = false;
    bool firm_layer_rca = true;
    ClosenessVariant closeness_variant = ClosenessVariant::ReachableSum;
    size_t protocol_k = 12;
    bool hhi_all_products = false;

    static PipelineConfig load(const std::string& path);
    void validate() const;
    int effective_weights_year() const { return weights_year > 0 ? weights_year : reference_year; }
    // Canonical text used for cache keys; excludes out_dir so results are
    // independent of where they are written.
    std::string normalized() const;
};

class Pipeline {
  public:
    explicit Pipeline(PipelineConfig config);

    static const std::vector<std::string>& stage_names();

    // Executes every stage in order, reusing valid caches. Returns the list
    // of stages actually rebuilt.
    std::vector<std::string> run();

    // Runs one stage, rebuilding it unconditionally. Upstream stages are
    // rebuilt when their caches are missing or stale unless build_deps is
    // false, in which case missing dependencies are an error.
    void run_stage(const std::string& name, bool build_deps);

    const PipelineConfig& config() const { return config_; }

  private:
    struct StageInfo {
        std::string name;
        std::vector<std::string> deps;
        void (Pipeline::*build)();
    };

    const std::vector<StageInfo>& stages() const;
    const StageInfo& stage(const std::string& name) const;
    std::string stage_key(const std::string& name) const;
    bool cache_valid(const std::string& name) const;
    void rebuild(const StageInfo& info);
    void record_stage(const std::string& name);
    void write_manifest() const;
    void load_manifest();
    std::string stage_dir(const std::string& name) const;

    void build_ingest();
    void build_specialization();
    void build_productspace();
    void build_centrality();
    void build_potential();
    void build_regress();
    void build_forecast();
    void build_concentration();

    PipelineConfig config_;
    std::string config_hash_;
    std::map<std::string, std::string> input_hashes_;  // config key -> file hash
    struct StageState {
        std::string key;
        std::map<std::string, std::string> files;  // relpath -> hash
    };
    std::map<std::string, StageState> manifest_stages_;
};

std::string hash_file(const std::string& path);

}  // namespace tradespace
