#include "tradespace/types.hpp"

#include <algorithm>

namespace tradespace {

std::string to_string(PowertrainClass c) {
    switch (c) {
        case PowertrainClass::EV: return "EV";
        case PowertrainClass::ICE: return "ICE";
        case PowertrainClass::UNSPECIFIC: return "UNSPECIFIC";
    }
    return "UNSPECIFIC";
}

PowertrainClass powertrain_from_string(const std::string& s) {
    if (s == "EV") return PowertrainClass::EV;
    if (s == "ICE") return PowertrainClass::ICE;
    if (s == "UNSPECIFIC") return PowertrainClass::UNSPECIFIC;
    throw DataError("unknown powertrain class: '" + s + "'");
}

Axis::Axis(std::vector<std::string> labels) : labels_(std::move(labels)) {
    lookup_.reserve(labels_.size());
    for (size_t i = 0; i < labels_.size(); ++i) {
        auto [it, inserted] = lookup_.emplace(labels_[i], static_cast<int>(i));
        if (!inserted) throw DataError("duplicate axis label: " + labels_[i]);
    }
}

std::vector<int> TradeTable::years() const {
    std::set<int> ys;
    for (const auto& r : rows) ys.insert(r.year);
    return {ys.begin(), ys.end()};
}

std::vector<std::string> TradeTable::exporters(int year) const {
    std::set<std::string> out;
    for (const auto& r : rows)
        if (r.year == year) out.insert(r.exporter);
    return {out.begin(), out.end()};
}

std::vector<std::string> TradeTable::products(int year) const {
    std::set<std::string> out;
    for (const auto& r : rows)
        if (r.year == year) out.insert(r.hs6);
    return {out.begin(), out.end()};
}

bool TradeTable::has_year(int year) const {
    return std::any_of(rows.begin(), rows.end(), [&](const TradeRecord& r) { return r.year == year; });
}

}  // namespace tradespace
