#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tradespace/common.hpp"

namespace tradespace {

enum class PowertrainClass { EV, ICE, UNSPECIFIC };

std::string to_string(PowertrainClass c);
PowertrainClass powertrain_from_string(const std::string& s);

// Ordered label set with O(1) lookup; the shared index space for all matrices.
class Axis {
  public:
    Axis() = default;
    explicit Axis(std::vector<std::string> labels);

    int index_of(const std::string& label) const {
        auto it = lookup_.find(label);
        return it == lookup_.end() ? -1 : it->second;
    }
    bool contains(const std::string& label) const { return lookup_.count(label) > 0; }
    const std::string& label(size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }
    size_t size() const { return labels_.size(); }

    bool operator==(const Axis& other) const { return labels_ == other.labels_; }

  private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> lookup_;
};

// One aggregated flow: exports of hs6 from exporter to importer, thousand USD.
struct TradeRecord {
    int year = 0;
    std::string exporter;
    std::string importer;
    std::string hs6;
    double value = 0.0;

    bool operator==(const TradeRecord&) const = default;
};

struct TradeTable {
    std::string hs_revision;
    std::vector<TradeRecord> rows;  // sorted by (year, exporter, importer, hs6)

    std::vector<int> years() const;
    // Distinct exporters / products with positive exports in `year`.
    std::vector<std::string> exporters(int year) const;
    std::vector<std::string> products(int year) const;
    bool has_year(int year) const;
};

struct IngestReport {
    std::string file;
    std::string hs_revision;
    size_t rows_read = 0;
    size_t rows_after_aggregation = 0;
    size_t duplicates_merged = 0;
    size_t nonpositive_dropped = 0;
    size_t error_rows = 0;
    std::vector<std::string> errors;         // "line N: message", capped
    std::vector<std::string> unknown_codes;  // sorted, unique
    size_t ev_hs_codes = 0;                  // filled by classify_hs_codes
};

struct Component {
    std::string id;
    std::string tier1, tier2, tier3;
    PowertrainClass cls = PowertrainClass::UNSPECIFIC;
    std::vector<std::string> hs6_links;
};

struct ComponentTaxonomy {
    std::vector<Component> components;  // sorted by id
    std::unordered_map<std::string, int> by_id;

    const Component* find(const std::string& id) const {
        auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : &components[it->second];
    }
};

// hs6 -> majority powertrain class over the components that link to it.
using HsClassMap = std::map<std::string, PowertrainClass>;

struct FirmProductTable {
    Axis firms;
    Axis components;
    // incidence[f] = sorted component indices produced by firm f
    std::vector<std::vector<int>> incidence;
    std::vector<std::string> firm_country;  // aligned with firms axis
    size_t duplicates_merged = 0;
};

inline std::string hs_chapter(const std::string& hs6) {
    return hs6.size() >= 2 ? hs6.substr(0, 2) : hs6;
}

}  // namespace tradespace
