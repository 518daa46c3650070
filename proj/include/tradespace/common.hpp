#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tradespace {

// Exit-code categories used by the CLI (2 = config, 3 = data, 4 = numerical).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation. Reloading the printed string
// recovers the exact double, which is what the canonical-CSV round-trip
// guarantee rests on.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, bool& ok) {
    if (s == "nan") { ok = true; return std::nan(""); }
    if (s == "inf") { ok = true; return HUGE_VAL; }
    if (s == "-inf") { ok = true; return -HUGE_VAL; }
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = (res.ec == std::errc{} && res.ptr == s.data() + s.size());
    return v;
}

inline long parse_long(const std::string& s, bool& ok) {
    long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    ok = (res.ec == std::errc{} && res.ptr == s.data() + s.size());
    return v;
}

// FNV-1a, used for cache keys and manifest hashes.
class Fnv1a {
  public:
    void update(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    uint64_t value() const { return state_; }
    std::string hex() const {
        char buf[17];
        snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
        return std::string(buf);
    }

  private:
    uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string hash_bytes(const std::string& bytes) {
    Fnv1a h;
    h.update(bytes);
    return h.hex();
}

// Uniform draw in [0, bound) by rejection; unlike std::uniform_int_distribution
// the byte stream consumed is fixed, so seeded samples replay across platforms.
inline uint64_t draw_below(std::mt19937_64& gen, uint64_t bound) {
    if (bound == 0) throw NumericalError("draw_below: zero bound");
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t r = gen();
        if (r >= threshold) return r % bound;
    }
}

inline double draw_unit(std::mt19937_64& gen) {
    return (gen() >> 11) * 0x1.0p-53;
}

// Deterministic sample of k distinct indices from [0, n), order of first pick.
inline std::vector<size_t> sample_indices(std::mt19937_64& gen, size_t n, size_t k) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(draw_below(gen, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Population standard deviation.
inline double sd_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace tradespace
