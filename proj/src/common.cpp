#include "netshift/common.hpp"

#include <cstdio>

#include <algorithm>

#include "netshift/bitstr.hpp"

namespace netshift {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::optional<Rat> parse_capacity(const std::string& s) {
    if (s == "inf") return std::nullopt;
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const Rat num(boost::multiprecision::cpp_int(s.substr(0, slash)));
            const boost::multiprecision::cpp_int den(s.substr(slash + 1));
            if (den == 0) throw InputError("capacity with zero denominator");
            return num / Rat(den);
        }
        const auto dot = s.find('.');
        if (dot != std::string::npos) {
            const std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
            Rat r(boost::multiprecision::cpp_int(whole.empty() ? "0" : whole));
            if (!frac.empty()) {
                boost::multiprecision::cpp_int scale = 1;
                for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
                r += Rat(boost::multiprecision::cpp_int(frac)) / Rat(scale);
            }
            return r;
        }
        return Rat(boost::multiprecision::cpp_int(s));
    } catch (const std::exception&) {
        throw InputError("cannot parse capacity '" + s + "'");
    }
}

std::optional<std::pair<size_t, size_t>> prefix_violation(const std::vector<BitStr>& msgs) {
    std::vector<size_t> order(msgs.size());
    for (size_t i = 0; i < msgs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return msgs[a] < msgs[b]; });
    for (size_t k = 0; k + 1 < order.size(); ++k) {
        const BitStr& a = msgs[order[k]];
        const BitStr& b = msgs[order[k + 1]];
        if (a.size() < b.size() && a.is_prefix_of(b)) return std::make_pair(order[k], order[k + 1]);
    }
    return std::nullopt;
}

std::vector<uint8_t> parse_bits(const std::string& s) {
    std::vector<uint8_t> v;
    v.reserve(s.size());
    for (char ch : s) {
        if (ch == '0')
            v.push_back(0);
        else if (ch == '1')
            v.push_back(1);
        else
            throw InputError(std::string("bit string has character '") + ch + "'");
    }
    return v;
}

std::string bits_str(const std::vector<uint8_t>& v) {
    std::string s;
    s.reserve(v.size());
    for (uint8_t b : v) s.push_back(b ? '1' : '0');
    return s;
}

}  // namespace netshift
