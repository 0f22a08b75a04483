#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <functional>
#include <string>
#include <vector>

namespace netshift {

// Variable-length bit string. Bit 0 is the first bit written; rendering is
// first-bit-leftmost. Used for messages on network edges (fixed-width source
// words as well as variable-length prefix-free codewords).
class BitStr {
public:
    BitStr() = default;
    explicit BitStr(size_t n, uint64_t value = 0) {
        for (size_t i = 0; i < n; ++i) push((value >> i) & 1u);
    }

    void push(bool b) {
        const size_t word = n_ / 64, off = n_ % 64;
        if (off == 0) w_.push_back(0);
        if (b) w_[word] |= (uint64_t{1} << off);
        ++n_;
    }
    bool get(size_t i) const { return (w_[i / 64] >> (i % 64)) & 1u; }
    size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    void append(const BitStr& other) {
        for (size_t i = 0; i < other.size(); ++i) push(other.get(i));
    }

    // Low bits as an integer (little-endian), at most 64 of them.
    uint64_t low_bits(size_t count) const {
        uint64_t v = 0;
        for (size_t i = 0; i < count && i < n_; ++i)
            if (get(i)) v |= (uint64_t{1} << i);
        return v;
    }

    bool operator==(const BitStr& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitStr& o) const { return !(*this == o); }
    // Lexicographic on the bit sequence; shorter prefix sorts first.
    bool operator<(const BitStr& o) const {
        const size_t m = n_ < o.n_ ? n_ : o.n_;
        for (size_t i = 0; i < m; ++i) {
            const bool a = get(i), b = o.get(i);
            if (a != b) return b;
        }
        return n_ < o.n_;
    }

    bool is_prefix_of(const BitStr& o) const {
        if (n_ > o.n_) return false;
        for (size_t i = 0; i < n_; ++i)
            if (get(i) != o.get(i)) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        s.reserve(n_);
        for (size_t i = 0; i < n_; ++i) s.push_back(get(i) ? '1' : '0');
        return s;
    }

    size_t hash() const {
        size_t h = 1469598103934665603ull;
        h = (h ^ n_) * 1099511628211ull;
        for (uint64_t x : w_) h = (h ^ x) * 1099511628211ull;
        return h;
    }

private:
    size_t n_ = 0;
    std::vector<uint64_t> w_;
};

struct BitStrHash {
    size_t operator()(const BitStr& b) const { return b.hash(); }
};

// Elias gamma code for m >= 1: floor(lg m) zeros, then m in binary MSB-first.
// Length is 2*floor(lg m) + 1 bits; the codeword set is prefix-free.
inline BitStr gamma_encode(uint64_t m) {
    BitStr out;
    int bits = 0;
    while ((m >> bits) > 1) ++bits;
    for (int i = 0; i < bits; ++i) out.push(false);
    for (int i = bits; i >= 0; --i) out.push((m >> i) & 1u);
    return out;
}

inline size_t gamma_length(uint64_t m) {
    int bits = 0;
    while ((m >> bits) > 1) ++bits;
    return 2 * size_t(bits) + 1;
}

// Decodes one gamma codeword starting at *pos; advances *pos. Returns 0 on
// malformed input (gamma never encodes 0).
inline uint64_t gamma_decode(const BitStr& s, size_t* pos) {
    size_t zeros = 0;
    while (*pos < s.size() && !s.get(*pos)) {
        ++zeros;
        ++(*pos);
    }
    if (*pos + zeros + 1 > s.size()) return 0;
    uint64_t v = 0;
    for (size_t i = 0; i <= zeros; ++i) {
        v = (v << 1) | uint64_t(s.get(*pos));
        ++(*pos);
    }
    return v;
}

// Returns the index pair (prefix, extension) if one message is a proper
// prefix of another; nullopt when the set is prefix-free.
std::optional<std::pair<size_t, size_t>> prefix_violation(const std::vector<BitStr>& msgs);

// "0110..." <-> bit vectors, first character = bit 1 of the 1-indexed
// string convention used throughout.
std::vector<uint8_t> parse_bits(const std::string& s);
std::string bits_str(const std::vector<uint8_t>& v);

}  // namespace netshift
