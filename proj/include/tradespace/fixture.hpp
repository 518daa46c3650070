#pragma once

#include <string>

namespace tradespace {

struct FixturePaths {
    std::string dir;
    std::string trade_csv;
    std::string firm_csv;
    std::string taxonomy_csv;
    std::string config_file;
};

// Writes the bundled synthetic dataset: 25 countries x 220 products over two
// years (2012, 2022), 320 firms over a 40-component taxonomy whose links
// classify exactly twelve HS codes as EV-specific, plus a ready-to-run
// pipeline config. Fully deterministic in the seed.
FixturePaths generate_fixture(const std::string& dir, uint64_t seed = 20240601);

}  // namespace tradespace
