#include "tradespace/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "tradespace/artifacts.hpp"
#include "tradespace/concentration.hpp"
#include "tradespace/csv.hpp"
#include "tradespace/forecast.hpp"
#include "tradespace/ingest.hpp"
#include "tradespace/potential.hpp"
#include "tradespace/regress.hpp"

namespace tradespace {

namespace fs = std::filesystem;

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw DataError("cannot open file: " + path);
    Fnv1a h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) h.update(buf, static_cast<size_t>(in.gcount()));
    return h.hex();
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    for (char c : s + ",") {
        if (c == ',') {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        bool ok = true;
        if (key == "trade_csv") cfg.trade_csv = value;
        else if (key == "firm_csv") cfg.firm_csv = value;
        else if (key == "taxonomy_csv") cfg.taxonomy_csv = value;
        else if (key == "alias_csv") cfg.alias_csv = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "hs_revision") cfg.hs_revision = value;
        else if (key == "t0") cfg.t0 = static_cast<int>(parse_long(value, ok));
        else if (key == "t1") cfg.t1 = static_cast<int>(parse_long(value, ok));
        else if (key == "reference_year") cfg.reference_year = static_cast<int>(parse_long(value, ok));
        else if (key == "weights_year") cfg.weights_year = static_cast<int>(parse_long(value, ok));
        else if (key == "top_quantile") cfg.top_quantile = parse_double(value, ok);
        else if (key == "firm_threshold") cfg.firm_threshold = static_cast<size_t>(parse_long(value, ok));
        else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_long(value, ok));
        else if (key == "jobs") cfg.jobs = static_cast<int>(parse_long(value, ok));
        else if (key == "eu_members") cfg.eu_members = split_list(value);
        else if (key == "ev_chapters") cfg.ev_chapters = split_list(value);
        else if (key == "srca_scope") {
            if (value == "sectoral") cfg.srca_full = false;
            else if (value == "full") cfg.srca_full = true;
            else throw ConfigError("srca_scope must be 'sectoral' or 'full', got '" + value + "'");
        } else if (key == "firm_layer_rca") cfg.firm_layer_rca = parse_bool(value, key);
        else if (key == "closeness_variant") {
            if (value == "reachable_sum") cfg.closeness_variant = ClosenessVariant::ReachableSum;
            else if (value == "advantage_mean") cfg.closeness_variant = ClosenessVariant::AdvantageMean;
            else throw ConfigError("closeness_variant must be 'reachable_sum' or 'advantage_mean', got '" + value + "'");
        } else if (key == "protocol_k") cfg.protocol_k = static_cast<size_t>(parse_long(value, ok));
        else if (key == "hhi_products") {
            if (value == "classified") cfg.hhi_all_products = false;
            else if (value == "all") cfg.hhi_all_products = true;
            else throw ConfigError("hhi_products must be 'classified' or 'all', got '" + value + "'");
        } else throw ConfigError(path + " line " + std::to_string(line_no) + ": unknown config key '" + key + "'");
        if (!ok)
            throw ConfigError(path + " line " + std::to_string(line_no) + ": bad value for '" + key + "'");
    }
    return cfg;
}

void PipelineConfig::validate() const {
    if (trade_csv.empty()) throw ConfigError("config: trade_csv is required");
    if (firm_csv.empty()) throw ConfigError("config: firm_csv is required");
    if (taxonomy_csv.empty()) throw ConfigError("config: taxonomy_csv is required");
    if (out_dir.empty()) throw ConfigError("config: out_dir is required");
    if (t0 >= t1) throw ConfigError("config: t0 (" + std::to_string(t0) + ") must precede t1 (" +
                                    std::to_string(t1) + ")");
    if (!(top_quantile > 0.0 && top_quantile <= 1.0))
        throw ConfigError("config: top_quantile must lie in (0, 1]");
    if (protocol_k == 0) throw ConfigError("config: protocol_k must be positive");
    for (const auto& ch : ev_chapters)
        if (ch.size() != 2 || !std::isdigit(static_cast<unsigned char>(ch[0])) ||
            !std::isdigit(static_cast<unsigned char>(ch[1])))
            throw ConfigError("config: ev_chapters entries must be 2-digit HS chapters, got '" + ch + "'");
}

std::string PipelineConfig::normalized() const {
    std::string s;
    s += "alias_csv = " + alias_csv + "\n";
    s += "closeness_variant = " +
         std::string(closeness_variant == ClosenessVariant::ReachableSum ? "reachable_sum" : "advantage_mean") + "\n";
    s += "eu_members = " + join_list(eu_members) + "\n";
    s += "ev_chapters = " + join_list(ev_chapters) + "\n";
    s += "firm_csv = " + firm_csv + "\n";
    s += "firm_layer_rca = " + std::string(firm_layer_rca ? "true" : "false") + "\n";
    s += "firm_threshold = " + std::to_string(firm_threshold) + "\n";
    s += "hhi_products = " + std::string(hhi_all_products ? "all" : "classified") + "\n";
    s += "hs_revision = " + hs_revision + "\n";
    s += "protocol_k = " + std::to_string(protocol_k) + "\n";
    s += "reference_year = " + std::to_string(reference_year) + "\n";
    s += "seed = " + std::to_string(seed) + "\n";
    s += "srca_scope = " + std::string(srca_full ? "full" : "sectoral") + "\n";
    s += "t0 = " + std::to_string(t0) + "\n";
    s += "t1 = " + std::to_string(t1) + "\n";
    s += "taxonomy_csv = " + taxonomy_csv + "\n";
    s += "top_quantile = " + fmt_double(top_quantile) + "\n";
    s += "trade_csv = " + trade_csv + "\n";
    s += "weights_year = " + std::to_string(effective_weights_year()) + "\n";
    return s;
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
    config_.validate();
#ifdef _OPENMP
    if (config_.jobs > 0) omp_set_num_threads(config_.jobs);
#endif
    config_hash_ = hash_bytes(config_.normalized());
    input_hashes_["trade_csv"] = hash_file(config_.trade_csv);
    input_hashes_["firm_csv"] = hash_file(config_.firm_csv);
    input_hashes_["taxonomy_csv"] = hash_file(config_.taxonomy_csv);
    if (!config_.alias_csv.empty()) input_hashes_["alias_csv"] = hash_file(config_.alias_csv);
    fs::create_directories(config_.out_dir);
    load_manifest();
}

const std::vector<std::string>& Pipeline::stage_names() {
    static const std::vector<std::string> names = {"ingest",    "specialization", "productspace",
                                                   "centrality", "potential",      "regress",
                                                   "forecast",  "concentration"};
    return names;
}

const std::vector<Pipeline::StageInfo>& Pipeline::stages() const {
    static const std::vector<StageInfo> infos = {
        {"ingest", {}, &Pipeline::build_ingest},
        {"specialization", {"ingest"}, &Pipeline::build_specialization},
        {"productspace", {"ingest", "specialization"}, &Pipeline::build_productspace},
        {"centrality", {"ingest", "specialization", "productspace"}, &Pipeline::build_centrality},
        {"potential", {"ingest", "specialization", "productspace"}, &Pipeline::build_potential},
        {"regress", {"ingest", "specialization", "productspace", "centrality"}, &Pipeline::build_regress},
        {"forecast", {"ingest", "specialization", "centrality", "regress"}, &Pipeline::build_forecast},
        {"concentration", {"ingest", "specialization"}, &Pipeline::build_concentration},
    };
    return infos;
}

const Pipeline::StageInfo& Pipeline::stage(const std::string& name) const {
    for (const auto& info : stages())
        if (info.name == name) return info;
    std::string valid;
    for (const auto& n : stage_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown stage '" + name + "' (valid stages: " + valid + ")");
}

std::string Pipeline::stage_dir(const std::string& name) const {
    return (fs::path(config_.out_dir) / name).string();
}

std::string Pipeline::stage_key(const std::string& name) const {
    const StageInfo& info = stage(name);
    Fnv1a h;
    h.update(name);
    h.update(config_hash_);
    for (const auto& [key, hash] : input_hashes_) {
        h.update(key);
        h.update(hash);
    }
    for (const auto& dep : info.deps) {
        h.update(dep);
        h.update(stage_key(dep));
    }
    return h.hex();
}

bool Pipeline::cache_valid(const std::string& name) const {
    auto it = manifest_stages_.find(name);
    if (it == manifest_stages_.end()) return false;
    if (it->second.key != stage_key(name)) return false;
    for (const auto& [rel, hash] : it->second.files) {
        const fs::path path = fs::path(config_.out_dir) / rel;
        if (!fs::exists(path)) return false;
        if (hash_file(path.string()) != hash) return false;
    }
    return true;
}

void Pipeline::rebuild(const StageInfo& info) {
    const std::string dir = stage_dir(info.name);
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);
    try {
        (this->*info.build)();
    } catch (...) {
        fs::remove_all(dir, ec);
        manifest_stages_.erase(info.name);
        write_manifest();
        try {
            throw;
        } catch (ConfigError& e) {
            throw ConfigError("stage " + info.name + ": " + e.what());
        } catch (DataError& e) {
            throw DataError("stage " + info.name + ": " + e.what());
        } catch (NumericalError& e) {
            throw NumericalError("stage " + info.name + ": " + e.what());
        } catch (std::exception& e) {
            throw DataError("stage " + info.name + ": " + e.what());
        }
    }
    record_stage(info.name);
    write_manifest();
}

void Pipeline::record_stage(const std::string& name) {
    StageState state;
    state.key = stage_key(name);
    const fs::path dir = stage_dir(name);
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const std::string rel = fs::relative(file, config_.out_dir).string();
        state.files[rel] = hash_file(file);
    }
    manifest_stages_[name] = std::move(state);
}

void Pipeline::write_manifest() const {
    nlohmann::json j;
    j["tool"] = "tradespace";
    j["version"] = "0.1.0";
    j["config_hash"] = config_hash_;
    nlohmann::json cfg;
    {
        // normalized() is "key = value" lines; store them as an object
        std::string text = config_.normalized();
        size_t pos = 0;
        while (pos < text.size()) {
            size_t end = text.find('\n', pos);
            std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            size_t eq = line.find(" = ");
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    j["config"] = std::move(cfg);
    nlohmann::json inputs;
    for (const auto& [key, hash] : input_hashes_) inputs[key] = hash;
    j["inputs"] = std::move(inputs);
    nlohmann::json stages_json;
    for (const auto& [name, state] : manifest_stages_) {
        nlohmann::json s;
        s["key"] = state.key;
        nlohmann::json files;
        for (const auto& [rel, hash] : state.files) files[rel] = hash;
        s["files"] = std::move(files);
        stages_json[name] = std::move(s);
    }
    j["stages"] = std::move(stages_json);
    csv::write_file((fs::path(config_.out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

void Pipeline::load_manifest() {
    const fs::path path = fs::path(config_.out_dir) / "manifest.json";
    if (!fs::exists(path)) return;
    try {
        nlohmann::json j = nlohmann::json::parse(csv::read_file(path.string()));
        if (j.value("config_hash", "") != config_hash_) return;  // different run: ignore caches
        for (const auto& [name, s] : j.at("stages").items()) {
            StageState state;
            state.key = s.at("key").get<std::string>();
            for (const auto& [rel, hash] : s.at("files").items()) state.files[rel] = hash.get<std::string>();
            manifest_stages_[name] = std::move(state);
        }
    } catch (const std::exception&) {
        manifest_stages_.clear();  // unreadable manifest: rebuild everything
    }
}

std::vector<std::string> Pipeline::run() {
    std::vector<std::string> rebuilt;
    for (const auto& info : stages()) {
        if (cache_valid(info.name)) continue;
        rebuild(info);
        rebuilt.push_back(info.name);
    }
    write_manifest();
    return rebuilt;
}

void Pipeline::run_stage(const std::string& name, bool build_deps) {
    const StageInfo& info = stage(name);
    std::vector<std::string> missing;
    for (const auto& dep : info.deps) {
        if (cache_valid(dep)) continue;
        if (build_deps) {
            run_stage(dep, true);
        } else {
            missing.push_back(dep);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw DataError("missing cached artifacts for stage '" + name + "': " + list);
    }
    rebuild(info);
}

// ---------------------------------------------------------------------------
// stage implementations
// ---------------------------------------------------------------------------

namespace {

Axis union_axis(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return Axis(a);
}

}  // namespace

void Pipeline::build_ingest() {
    const std::string dir = stage_dir("ingest");
    LocationNormalizer loc;
    if (!config_.alias_csv.empty()) loc = load_aliases(config_.alias_csv);

    IngestReport trade_report, firm_report;
    TradeTable trade = load_trade(config_.trade_csv, config_.hs_revision, loc, trade_report);
    if (!trade.has_year(config_.t0))
        throw DataError("trade data has no rows for t0 = " + std::to_string(config_.t0));
    if (!trade.has_year(config_.t1))
        throw DataError("trade data has no rows for t1 = " + std::to_string(config_.t1));
    if (!trade.has_year(config_.reference_year))
        throw DataError("trade data has no rows for reference year " + std::to_string(config_.reference_year));

    ComponentTaxonomy taxonomy = load_taxonomy(config_.taxonomy_csv);
    FirmProductTable firms = load_firm_products(config_.firm_csv, taxonomy, loc, firm_report);
    size_t ev_count = 0;
    HsClassMap class_map = classify_hs_codes(taxonomy, &ev_count);
    trade_report.ev_hs_codes = ev_count;

    write_trade_csv(trade, (fs::path(dir) / "trade_canonical.csv").string());
    {
        csv::Writer w((fs::path(dir) / "firms_canonical.csv").string());
        w.row({"firm_id", "country", "component_id"});
        for (size_t f = 0; f < firms.firms.size(); ++f)
            for (int k : firms.incidence[f])
                w.row({firms.firms.label(f), firms.firm_country[f], firms.components.label(static_cast<size_t>(k))});
        w.close();
    }
    csv::write_file((fs::path(dir) / "taxonomy.json").string(), artifacts::taxonomy_json(taxonomy, class_map, ev_count));
    csv::write_file((fs::path(dir) / "ingest_report.json").string(), ingest_report_json(trade_report, firm_report));
}

namespace {

struct IngestArtifacts {
    TradeTable trade;
    ComponentTaxonomy taxonomy;
    HsClassMap class_map;
    FirmProductTable firms;
};

}  // namespace

static IngestArtifacts load_ingest_artifacts(const std::string& ingest_dir, const std::string& hs_revision) {
    IngestArtifacts art;
    LocationNormalizer loc;
    IngestReport scratch;
    art.trade = load_trade((fs::path(ingest_dir) / "trade_canonical.csv").string(), hs_revision, loc, scratch);
    artifacts::parse_taxonomy_json(csv::read_file((fs::path(ingest_dir) / "taxonomy.json").string()),
                                   art.taxonomy, art.class_map);
    IngestReport scratch2;
    art.firms = load_firm_products((fs::path(ingest_dir) / "firms_canonical.csv").string(), art.taxonomy, loc,
                                   scratch2);
    return art;
}

void Pipeline::build_specialization() {
    const std::string dir = stage_dir("specialization");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);

    // Shared axes across years so switch labeling and forecasting align.
    Axis locations = union_axis(art.trade.exporters(config_.t0), art.trade.exporters(config_.t1));
    locations = union_axis(locations.labels(), art.trade.exporters(config_.reference_year));
    Axis products = union_axis(art.trade.products(config_.t0), art.trade.products(config_.t1));
    products = union_axis(products.labels(), art.trade.products(config_.reference_year));

    std::vector<std::pair<std::string, int>> years = {{"t0", config_.t0}, {"t1", config_.t1}};
    if (config_.reference_year != config_.t0 && config_.reference_year != config_.t1)
        years.emplace_back("ref", config_.reference_year);

    SpecializationSet ref_set;
    for (const auto& [tag, year] : years) {
        SpecializationSet set = rca_matrix(art.trade, year, Scope::industry(), locations, products);
        artifacts::write_specialization(set, dir, "set_industry_" + std::to_string(year));
        {
            csv::Writer w((fs::path(dir) / ("diversity_" + std::to_string(year) + ".csv")).string());
            w.row({"location", "diversity"});
            std::vector<int> div = diversity(set);
            for (size_t l = 0; l < set.locations.size(); ++l)
                w.row({set.locations.label(l), std::to_string(div[l])});
            w.close();
        }
        if (year == config_.reference_year) ref_set = set;
    }
    if (ref_set.locations.size() == 0)
        ref_set = artifacts::read_specialization(dir, "set_industry_" + std::to_string(config_.reference_year));

    SpecializationSet firm_set = firm_specialization(art.firms);
    if (!config_.firm_layer_rca) {
        // raw-incidence mode: advantages are simply the produced components
        for (size_t f = 0; f < art.firms.incidence.size(); ++f) {
            firm_set.M.row(static_cast<Eigen::Index>(f)).setZero();
            for (int k : art.firms.incidence[f]) firm_set.M(static_cast<Eigen::Index>(f), k) = 1.0;
        }
    }
    artifacts::write_specialization(firm_set, dir, "set_firm");

    if (!config_.eu_members.empty()) {
        EuSrcaRow eu = eu_weighted_srca(ref_set, config_.eu_members, art.trade, config_.effective_weights_year());
        csv::Writer w((fs::path(dir) / ("srca_eu_" + std::to_string(config_.reference_year) + ".csv")).string());
        w.row({"location", "product", "value"});
        for (size_t p = 0; p < ref_set.products.size(); ++p)
            w.row({"EU", ref_set.products.label(p), fmt_double(eu.srca[p])});
        w.close();
    }
}

void Pipeline::build_productspace() {
    const std::string dir = stage_dir("productspace");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    const std::string spec_dir = stage_dir("specialization");

    SpecializationSet ref_set =
        artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(config_.reference_year));
    SpecializationSet t0_set =
        artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(config_.t0));
    SpecializationSet firm_set = artifacts::read_specialization(spec_dir, "set_firm");

    LayerBuild layers = build_layers(ref_set, firm_set, art.taxonomy, art.class_map);
    artifacts::write_product_space(layers.industry, dir, "space_industry_" + std::to_string(config_.reference_year));
    artifacts::write_product_space(layers.firm, dir, "space_firm");
    ProductSpace t0_space = build_industry_space(t0_set, art.class_map);
    artifacts::write_product_space(t0_space, dir, "space_industry_" + std::to_string(config_.t0));

    csv::Writer w((fs::path(dir) / "interlayer_map.csv").string());
    w.row({"component_id", "hs6"});
    for (const auto& [comp, codes] : layers.interlayer.links)
        for (const auto& hs6 : codes) w.row({comp, hs6});
    w.close();
}

void Pipeline::build_centrality() {
    const std::string dir = stage_dir("centrality");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    const std::string spec_dir = stage_dir("specialization");
    const std::string space_dir = stage_dir("productspace");

    for (int year : {config_.reference_year, config_.t0}) {
        SpecializationSet set = artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(year));
        ProductSpace space = artifacts::read_product_space(space_dir, "space_industry_" + std::to_string(year));
        ClosenessTable table = closeness_table(space, set, set.locations.labels(), config_.closeness_variant);
        artifacts::write_closeness(table, (fs::path(dir) / ("closeness_" + std::to_string(year) + ".csv")).string());

        if (year == config_.reference_year) {
            std::vector<ChapterClosenessRow> cc =
                chapter_closeness_table(table, config_.ev_chapters, config_.top_quantile);
            artifacts::write_chapter_closeness(
                cc, (fs::path(dir) / ("chapter_closeness_" + std::to_string(year) + ".csv")).string());

            std::vector<std::string> ev_targets;
            for (const auto& [hs6, cls] : art.class_map)
                if (cls == PowertrainClass::EV && space.products.contains(hs6)) ev_targets.push_back(hs6);
            std::vector<DecompositionRow> rows =
                contribution_decomposition(space, set, set.locations.labels(), ev_targets);
            csv::Writer w((fs::path(dir) / ("decomposition_" + std::to_string(year) + ".csv")).string());
            w.row({"country", "target", "chapter", "share"});
            for (const auto& r : rows) w.row({r.country, r.target, r.chapter, fmt_double(r.share)});
            w.close();
        }
    }
}

void Pipeline::build_potential() {
    const std::string dir = stage_dir("potential");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    const std::string spec_dir = stage_dir("specialization");
    const std::string space_dir = stage_dir("productspace");

    struct TargetSet {
        PowertrainClass cls;
        const char* label;
    };
    const TargetSet target_sets[] = {{PowertrainClass::EV, "EV"},
                                     {PowertrainClass::ICE, "ICE"},
                                     {PowertrainClass::UNSPECIFIC, "UNSPECIFIC"}};

    {
        SpecializationSet set = artifacts::read_specialization(
            spec_dir, "set_industry_" + std::to_string(config_.reference_year));
        ProductSpace space = artifacts::read_product_space(
            space_dir, "space_industry_" + std::to_string(config_.reference_year));
        csv::Writer w((fs::path(dir) / "potential_industry.csv").string());
        w.row({"location", "target_class", "raw", "z", "n_missing_targets"});
        for (const auto& ts : target_sets) {
            std::vector<int> targets;
            for (const auto& [hs6, cls] : art.class_map)
                if (cls == ts.cls && set.products.contains(hs6)) targets.push_back(set.products.index_of(hs6));
            if (targets.empty()) continue;
            PotentialScore score = complexity_potential(set, space, targets);
            for (size_t l = 0; l < score.locations.size(); ++l)
                w.row({score.locations.label(l), ts.label, fmt_double(score.raw[l]), fmt_double(score.z[l]),
                       std::to_string(score.n_missing_targets[l])});
        }
        w.close();
    }
    {
        SpecializationSet firm_set = artifacts::read_specialization(spec_dir, "set_firm");
        ProductSpace firm_space = artifacts::read_product_space(space_dir, "space_firm");
        FirmPotentialOptions options;
        options.min_firms = config_.firm_threshold;
        csv::Writer w((fs::path(dir) / "potential_firm.csv").string());
        w.row({"location", "target_class", "raw", "z", "n_missing_targets"});
        for (const auto& ts : target_sets) {
            std::vector<int> targets;
            for (size_t k = 0; k < firm_set.products.size(); ++k) {
                const Component* comp = art.taxonomy.find(firm_set.products.label(k));
                if (comp && comp->cls == ts.cls) targets.push_back(static_cast<int>(k));
            }
            if (targets.empty()) continue;
            PotentialScore score = firm_potential_average(firm_set, firm_space, targets, art.firms, options);
            for (size_t l = 0; l < score.locations.size(); ++l)
                w.row({score.locations.label(l), ts.label, fmt_double(score.raw[l]), fmt_double(score.z[l]),
                       std::to_string(score.n_missing_targets[l])});
        }
        w.close();
    }
}

void Pipeline::build_regress() {
    const std::string dir = stage_dir("regress");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    const std::string spec_dir = stage_dir("specialization");
    const std::string space_dir = stage_dir("productspace");

    SpecializationSet t0_set =
        artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(config_.t0));
    SpecializationSet t1_set =
        artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(config_.t1));
    ProductSpace t0_space =
        artifacts::read_product_space(space_dir, "space_industry_" + std::to_string(config_.t0));
    ClosenessTable t0_closeness = artifacts::read_closeness(
        (fs::path(stage_dir("centrality")) / ("closeness_" + std::to_string(config_.t0) + ".csv")).string(),
        t0_space.products);
    std::vector<int> t0_diversity = diversity(t0_set);

    ProtocolInputs inputs;
    inputs.trade = &art.trade;
    inputs.t0 = config_.t0;
    inputs.t1 = config_.t1;
    inputs.industry_t0 = &t0_set;
    inputs.industry_t1 = &t1_set;
    inputs.space_t0 = &t0_space;
    inputs.closeness_t0 = &t0_closeness;
    inputs.diversity_t0 = &t0_diversity;
    for (const auto& [hs6, cls] : art.class_map)
        if (cls == PowertrainClass::EV) inputs.ev_products.push_back(hs6);

    ProtocolConfig protocol;
    protocol.seed = config_.seed;
    protocol.k = config_.protocol_k;
    protocol.full_srca = config_.srca_full;

    ProtocolReport report;
    std::vector<ResultRow> rows = run_protocol(inputs, protocol, report);

    {
        csv::Writer w((fs::path(dir) / "regress_results.csv").string());
        w.row({"scope", "chapter", "strategy", "predictor", "coef", "se", "p", "n", "converged", "seed"});
        for (const auto& r : rows)
            w.row({r.scope, r.chapter, r.strategy, r.predictor, fmt_double(r.coef), fmt_double(r.se),
                   fmt_double(r.p), std::to_string(r.n), r.converged ? "1" : "0", std::to_string(r.seed)});
        w.close();
    }
    {
        nlohmann::json j;
        j["seed"] = config_.seed;
        j["skipped"] = report.skipped;
        j["failures"] = report.failures;
        nlohmann::json ev;
        ev["valid"] = report.ev_model.valid;
        ev["beta"] = report.ev_model.beta;
        ev["intercept"] = report.ev_model.intercept;
        ev["sigma_c"] = report.ev_model.sigma_c;
        j["ev_model"] = std::move(ev);
        csv::write_file((fs::path(dir) / "regress_report.json").string(), j.dump(2) + "\n");
    }
}

void Pipeline::build_forecast() {
    const std::string dir = stage_dir("forecast");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    const std::string spec_dir = stage_dir("specialization");

    nlohmann::json report = nlohmann::json::parse(
        csv::read_file((fs::path(stage_dir("regress")) / "regress_report.json").string()));
    const auto& ev = report.at("ev_model");
    if (!ev.at("valid").get<bool>())
        throw NumericalError("forecast requires a converged EV closeness model");

    ForecastParams params;
    params.beta = ev.at("beta").get<double>();
    params.intercept = ev.at("intercept").get<double>();
    params.sigma_c = ev.at("sigma_c").get<double>();
    params.ev_chapters = config_.ev_chapters;

    std::vector<ChapterClosenessRow> cc = artifacts::read_chapter_closeness(
        (fs::path(stage_dir("centrality")) / ("chapter_closeness_" + std::to_string(config_.reference_year) + ".csv"))
            .string());

    SpecializationSet t0_set =
        artifacts::read_specialization(spec_dir, "set_industry_" + std::to_string(config_.t0));
    std::map<std::string, double> notheld;
    std::vector<int> ev_targets;
    for (const auto& [hs6, cls] : art.class_map)
        if (cls == PowertrainClass::EV && t0_set.products.contains(hs6))
            ev_targets.push_back(t0_set.products.index_of(hs6));
    for (size_t l = 0; l < t0_set.locations.size(); ++l) {
        int count = 0;
        for (int p : ev_targets)
            if (t0_set.M(static_cast<Eigen::Index>(l), p) < 0.5) ++count;
        notheld[t0_set.locations.label(l)] = static_cast<double>(count);
    }

    std::vector<GainRow> rows = expected_gains(cc, notheld, params);
    csv::Writer w((fs::path(dir) / "forecast.csv").string());
    w.row({"country", "chapter", "delta_c", "x_std", "delta_p", "n_y", "n_rel_max", "n_rel_avg"});
    for (const auto& r : rows)
        w.row({r.country, r.chapter, fmt_double(r.delta_c), fmt_double(r.x_std), fmt_double(r.delta_p),
               fmt_double(r.n_y), r.flag_max ? "nan" : fmt_double(r.n_rel_max),
               r.flag_avg ? "nan" : fmt_double(r.n_rel_avg)});
    w.close();
}

void Pipeline::build_concentration() {
    const std::string dir = stage_dir("concentration");
    IngestArtifacts art = load_ingest_artifacts(stage_dir("ingest"), config_.hs_revision);
    SpecializationSet ref_set = artifacts::read_specialization(
        stage_dir("specialization"), "set_industry_" + std::to_string(config_.reference_year));

    ConcentrationOptions options;
    options.year = config_.reference_year;
    options.eu_members = config_.eu_members;
    if (!config_.hhi_all_products)
        for (const auto& [hs6, cls] : art.class_map) options.product_filter.insert(hs6);

    std::vector<ConcentrationRow> rows = concentration_table(art.trade, ref_set, art.class_map, options);
    csv::Writer w((fs::path(dir) / "concentration.csv").string());
    w.row({"importer", "hs6", "class", "hhi", "hhi_rel", "n_suppliers", "rca_flag"});
    for (const auto& r : rows)
        w.row({r.importer, r.hs6, r.cls, fmt_double(r.hhi), fmt_double(r.hhi_rel),
               std::to_string(r.n_suppliers), std::to_string(r.rca_flag)});
    w.close();
}

}  // namespace tradespace
