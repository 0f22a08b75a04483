#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace netshift {

// Exact rational scalar used for capacities, expected message lengths and
// certificate arithmetic. LP solves default to double; see lp.hpp for the
// exact-rational mode.
using Rat = boost::multiprecision::cpp_rational;

inline std::string rat_str(const Rat& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// Fixed-width double formatting so that reports are byte-stable across runs.
std::string fmt_double(double v);

// Parses "inf", integers, "p/q" and plain decimals (binary-exact scaling by
// powers of ten). Returns nullopt for "inf".
std::optional<Rat> parse_capacity(const std::string& s);

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline uint32_t ceil_log2(uint32_t n) {
    uint32_t b = 0;
    while ((uint32_t{1} << b) < n) ++b;
    return b;
}

inline bool is_pow2(uint32_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace netshift
