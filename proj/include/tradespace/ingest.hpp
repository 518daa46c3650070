#pragma once

#include <optional>
#include <string>

#include "tradespace/types.hpp"

namespace tradespace {

// Maps dataset-specific location codes onto the canonical (ISO-3 or aggregate
// tag) code set. With an empty whitelist any well-formed code is accepted.
struct LocationNormalizer {
    std::unordered_map<std::string, std::string> aliases;
    std::set<std::string> known;

    // nullopt = unknown / ill-formed code
    std::optional<std::string> normalize(const std::string& raw) const;
};

LocationNormalizer load_aliases(const std::string& path);

// Parses, validates and aggregates long-form trade flows.
// Duplicate (year,exporter,importer,hs6) keys are summed; rows with
// value <= 0 are dropped and counted; malformed rows are recorded with their
// line number and skipped. An input without any valid data row is fatal.
TradeTable load_trade(const std::string& path, const std::string& hs_revision,
                      const LocationNormalizer& loc, IngestReport& report);

// Canonical form: sorted by (year,exporter,importer,hs6), shortest round-trip
// value format. load_trade(write_trade_csv(t)) == t bit-exactly.
void write_trade_csv(const TradeTable& table, const std::string& path);

ComponentTaxonomy load_taxonomy(const std::string& path);

FirmProductTable load_firm_products(const std::string& path, const ComponentTaxonomy& taxonomy,
                                    const LocationNormalizer& loc, IngestReport& report);

// Strict-majority classification: EV (ICE) iff strictly more than half of the
// components linking to the code are EV (ICE); ties and mixtures fall to
// UNSPECIFIC. Codes with no links are absent from the map.
HsClassMap classify_hs_codes(const ComponentTaxonomy& taxonomy, size_t* ev_count = nullptr);

std::string ingest_report_json(const IngestReport& trade, const IngestReport& firms);

}  // namespace tradespace
