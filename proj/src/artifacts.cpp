#include "tradespace/artifacts.hpp"

#include <filesystem>

#include "json.hpp"
#include "tradespace/csv.hpp"

namespace tradespace::artifacts {

namespace fs = std::filesystem;

namespace {

void write_triplets(const Eigen::MatrixXd& m, const SpecializationSet& set, const std::string& path,
                    bool ones_only) {
    csv::Writer w(path);
    w.row({"location", "product", "value"});
    for (Eigen::Index l = 0; l < m.rows(); ++l)
        for (Eigen::Index p = 0; p < m.cols(); ++p) {
            if (!set.defined(l, p) || m(l, p) == 0.0) continue;
            w.row({set.locations.label(static_cast<size_t>(l)), set.products.label(static_cast<size_t>(p)),
                   ones_only ? "1" : fmt_double(m(l, p))});
        }
    w.close();
}

Eigen::MatrixXd read_triplets(const std::string& path, const Axis& locations, const Axis& products) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(locations.size()),
                                              static_cast<Eigen::Index>(products.size()));
    csv::Reader reader(path);
    reader.require_header({"location", "product", "value"});
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        if (fields.size() != 3) throw DataError(path + " line " + std::to_string(line) + ": expected 3 fields");
        const int l = locations.index_of(fields[0]);
        const int p = products.index_of(fields[1]);
        if (l < 0 || p < 0) throw DataError(path + " line " + std::to_string(line) + ": label not in sidecar axes");
        bool ok = false;
        m(l, p) = parse_double(fields[2], ok);
        if (!ok) throw DataError(path + " line " + std::to_string(line) + ": bad value");
    }
    return m;
}

}  // namespace

void write_specialization(const SpecializationSet& set, const std::string& dir, const std::string& name) {
    const fs::path base = fs::path(dir) / name;
    nlohmann::json side;
    side["year"] = set.year;
    switch (set.scope.kind) {
        case ScopeKind::Industry: side["scope"] = "industry"; break;
        case ScopeKind::Firm: side["scope"] = "firm"; break;
        case ScopeKind::Sectoral:
            side["scope"] = "sectoral";
            side["chapter"] = set.scope.chapter;
            break;
        case ScopeKind::Subset:
            side["scope"] = "subset";
            side["subset_products"] = set.scope.products;
            break;
    }
    side["locations"] = set.locations.labels();
    side["products"] = set.products.labels();
    side["shape"] = {set.locations.size(), set.products.size()};
    std::vector<std::string> masked_locations, masked_products;
    for (size_t l = 0; l < set.locations.size(); ++l)
        if (!set.row_defined[l]) masked_locations.push_back(set.locations.label(l));
    for (size_t p = 0; p < set.products.size(); ++p)
        if (!set.col_defined[p]) masked_products.push_back(set.products.label(p));
    side["masked_locations"] = masked_locations;
    side["masked_products"] = masked_products;
    csv::write_file((base.string() + ".json"), side.dump(2) + "\n");
    write_triplets(set.R, set, base.string() + "_R.csv", false);
    write_triplets(set.M, set, base.string() + "_M.csv", true);
    write_triplets(set.srca, set, base.string() + "_srca.csv", false);
}

SpecializationSet read_specialization(const std::string& dir, const std::string& name) {
    const fs::path base = fs::path(dir) / name;
    nlohmann::json side = nlohmann::json::parse(csv::read_file(base.string() + ".json"));
    SpecializationSet set;
    set.year = side.at("year").get<int>();
    const std::string scope = side.at("scope").get<std::string>();
    if (scope == "industry") {
        set.scope = Scope::industry();
    } else if (scope == "firm") {
        set.scope = Scope::firm();
    } else if (scope == "sectoral") {
        set.scope = Scope::sectoral(side.at("chapter").get<std::string>());
    } else {
        set.scope = Scope::subset(side.at("subset_products").get<std::vector<std::string>>());
    }
    set.locations = Axis(side.at("locations").get<std::vector<std::string>>());
    set.products = Axis(side.at("products").get<std::vector<std::string>>());
    set.row_defined.assign(set.locations.size(), 1);
    set.col_defined.assign(set.products.size(), 1);
    for (const auto& l : side.at("masked_locations").get<std::vector<std::string>>())
        set.row_defined[static_cast<size_t>(set.locations.index_of(l))] = 0;
    for (const auto& p : side.at("masked_products").get<std::vector<std::string>>())
        set.col_defined[static_cast<size_t>(set.products.index_of(p))] = 0;
    set.R = read_triplets(base.string() + "_R.csv", set.locations, set.products);
    set.M = read_triplets(base.string() + "_M.csv", set.locations, set.products);
    set.srca = read_triplets(base.string() + "_srca.csv", set.locations, set.products);
    return set;
}

void write_product_space(const ProductSpace& space, const std::string& dir, const std::string& name) {
    const fs::path base = fs::path(dir) / name;
    {
        csv::Writer w(base.string() + "_nodes.csv");
        w.row({"product", "chapter", "class", "pci", "pci_norm", "in_core"});
        for (const auto& node : space.nodes)
            w.row({node.id, node.chapter, node.cls ? to_string(*node.cls) : "", fmt_double(node.pci),
                   fmt_double(node.pci_norm), node.pci_in_core ? "1" : "0"});
        w.close();
    }
    {
        csv::Writer w(base.string() + "_edges.csv");
        w.row({"p", "q", "phi"});
        for (Eigen::Index p = 0; p < space.phi.rows(); ++p)
            for (Eigen::Index q = p + 1; q < space.phi.cols(); ++q)
                if (space.phi(p, q) > 0.0)
                    w.row({space.products.label(static_cast<size_t>(p)),
                           space.products.label(static_cast<size_t>(q)), fmt_double(space.phi(p, q))});
        w.close();
    }
}

ProductSpace read_product_space(const std::string& dir, const std::string& name) {
    const fs::path base = fs::path(dir) / name;
    ProductSpace space;
    space.layer = name.find("firm") != std::string::npos ? Layer::Firm : Layer::Industry;
    {
        csv::Reader reader(base.string() + "_nodes.csv");
        reader.require_header({"product", "chapter", "class", "pci", "pci_norm", "in_core"});
        std::vector<std::string> fields;
        std::vector<std::string> ids;
        size_t line = 0;
        while (reader.next(fields, line)) {
            if (fields.size() != 6) throw DataError("bad node row in " + base.string());
            ProductNode node;
            node.id = fields[0];
            node.chapter = fields[1];
            if (!fields[2].empty()) node.cls = powertrain_from_string(fields[2]);
            bool ok = false;
            node.pci = parse_double(fields[3], ok);
            node.pci_norm = parse_double(fields[4], ok);
            node.pci_in_core = fields[5] == "1";
            ids.push_back(node.id);
            space.nodes.push_back(std::move(node));
        }
        space.products = Axis(ids);
    }
    {
        const Eigen::Index n = static_cast<Eigen::Index>(space.products.size());
        space.phi = Eigen::MatrixXd::Zero(n, n);
        csv::Reader reader(base.string() + "_edges.csv");
        reader.require_header({"p", "q", "phi"});
        std::vector<std::string> fields;
        size_t line = 0;
        while (reader.next(fields, line)) {
            const int p = space.products.index_of(fields[0]);
            const int q = space.products.index_of(fields[1]);
            if (p < 0 || q < 0) throw DataError("edge references unknown node in " + base.string());
            bool ok = false;
            const double phi = parse_double(fields[2], ok);
            space.phi(p, q) = phi;
            space.phi(q, p) = phi;
        }
    }
    return space;
}

void write_closeness(const ClosenessTable& table, const std::string& path) {
    csv::Writer w(path);
    w.row({"country", "product", "closeness", "reachable_n"});
    for (size_t c = 0; c < table.countries.size(); ++c)
        for (size_t p = 0; p < table.products.size(); ++p)
            w.row({table.countries.label(c), table.products.label(p),
                   fmt_double(table.closeness(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p))),
                   std::to_string(table.reachable_n(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)))});
    w.close();
}

ClosenessTable read_closeness(const std::string& path, const Axis& products) {
    csv::Reader reader(path);
    reader.require_header({"country", "product", "closeness", "reachable_n"});
    std::vector<std::string> countries;
    std::vector<double> closeness;
    std::vector<int> reachable;
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        if (fields.size() != 4) throw DataError(path + ": bad row");
        if (countries.empty() || countries.back() != fields[0]) countries.push_back(fields[0]);
        bool ok = false;
        closeness.push_back(parse_double(fields[2], ok));
        reachable.push_back(static_cast<int>(parse_long(fields[3], ok)));
    }
    ClosenessTable table;
    table.countries = Axis(countries);
    table.products = products;
    const Eigen::Index n_c = static_cast<Eigen::Index>(countries.size());
    const Eigen::Index n_p = static_cast<Eigen::Index>(products.size());
    if (static_cast<size_t>(n_c * n_p) != closeness.size())
        throw DataError(path + ": row count does not match axes");
    table.closeness.resize(n_c, n_p);
    table.reachable_n.resize(n_c, n_p);
    for (Eigen::Index c = 0; c < n_c; ++c)
        for (Eigen::Index p = 0; p < n_p; ++p) {
            table.closeness(c, p) = closeness[static_cast<size_t>(c * n_p + p)];
            table.reachable_n(c, p) = reachable[static_cast<size_t>(c * n_p + p)];
        }
    return table;
}

std::string taxonomy_json(const ComponentTaxonomy& taxonomy, const HsClassMap& class_map, size_t ev_count) {
    nlohmann::json j;
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : taxonomy.components) {
        nlohmann::json comp;
        comp["id"] = c.id;
        comp["tier1"] = c.tier1;
        comp["tier2"] = c.tier2;
        comp["tier3"] = c.tier3;
        comp["class"] = to_string(c.cls);
        comp["hs6_links"] = c.hs6_links;
        comps.push_back(std::move(comp));
    }
    j["components"] = std::move(comps);
    nlohmann::json cm;
    for (const auto& [hs6, cls] : class_map) cm[hs6] = to_string(cls);
    j["class_map"] = std::move(cm);
    j["ev_hs_codes"] = ev_count;
    return j.dump(2) + "\n";
}

void parse_taxonomy_json(const std::string& text, ComponentTaxonomy& taxonomy, HsClassMap& class_map) {
    nlohmann::json j = nlohmann::json::parse(text);
    taxonomy = ComponentTaxonomy{};
    for (const auto& comp : j.at("components")) {
        Component c;
        c.id = comp.at("id").get<std::string>();
        c.tier1 = comp.at("tier1").get<std::string>();
        c.tier2 = comp.at("tier2").get<std::string>();
        c.tier3 = comp.at("tier3").get<std::string>();
        c.cls = powertrain_from_string(comp.at("class").get<std::string>());
        c.hs6_links = comp.at("hs6_links").get<std::vector<std::string>>();
        taxonomy.components.push_back(std::move(c));
    }
    for (size_t i = 0; i < taxonomy.components.size(); ++i)
        taxonomy.by_id.emplace(taxonomy.components[i].id, static_cast<int>(i));
    class_map.clear();
    for (const auto& [hs6, cls] : j.at("class_map").items())
        class_map.emplace(hs6, powertrain_from_string(cls.get<std::string>()));
}

void write_chapter_closeness(const std::vector<ChapterClosenessRow>& rows, const std::string& path) {
    csv::Writer w(path);
    w.row({"country", "chapter", "closeness"});
    for (const auto& r : rows) w.row({r.country, r.chapter, fmt_double(r.value)});
    w.close();
}

std::vector<ChapterClosenessRow> read_chapter_closeness(const std::string& path) {
    csv::Reader reader(path);
    reader.require_header({"country", "chapter", "closeness"});
    std::vector<ChapterClosenessRow> rows;
    std::vector<std::string> fields;
    size_t line = 0;
    while (reader.next(fields, line)) {
        bool ok = false;
        rows.push_back({fields[0], fields[1], parse_double(fields[2], ok)});
        if (!ok) throw DataError(path + ": bad closeness value");
    }
    return rows;
}

}  // namespace tradespace::artifacts
