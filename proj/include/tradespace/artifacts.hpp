#pragma once

#include "tradespace/centrality.hpp"
#include "tradespace/productspace.hpp"
#include "tradespace/specialization.hpp"

// On-disk formats for the cached stage outputs: sparse triplet CSVs with a
// JSON sidecar for matrix sets, edge/node CSVs for product spaces. Every
// writer uses shortest round-trip number formatting, so reloading is
// bit-exact and reruns are byte-identical.
namespace tradespace::artifacts {

void write_specialization(const SpecializationSet& set, const std::string& dir, const std::string& name);
SpecializationSet read_specialization(const std::string& dir, const std::string& name);

void write_product_space(const ProductSpace& space, const std::string& dir, const std::string& name);
ProductSpace read_product_space(const std::string& dir, const std::string& name);

void write_closeness(const ClosenessTable& table, const std::string& path);
ClosenessTable read_closeness(const std::string& path, const Axis& products);

std::string taxonomy_json(const ComponentTaxonomy& taxonomy, const HsClassMap& class_map, size_t ev_count);
void parse_taxonomy_json(const std::string& text, ComponentTaxonomy& taxonomy, HsClassMap& class_map);

void write_chapter_closeness(const std::vector<ChapterClosenessRow>& rows, const std::string& path);
std::vector<ChapterClosenessRow> read_chapter_closeness(const std::string& path);

}  // namespace tradespace::artifacts
