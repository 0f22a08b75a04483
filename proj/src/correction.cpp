#include "netshift/correction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace netshift {

double GameSpec::epsilon() const {
    return 1.0 - std::log2(double(family.size())) / double(n);
}

void GameSpec::validate() const {
    if (n < 1 || n > 24) throw InputError("game: n outside 1..24");
    if (m < 1 || n % m != 0) throw InputError("game: m must divide n");
    if (family.empty()) throw InputError("game: empty family");
    for (uint64_t x : family)
        if (x >> n) throw InputError("game: family member wider than n bits");
}

BitStr encode_flips(uint64_t flip_mask, int block_bits) {
    BitStr out;
    const int count = __builtin_popcountll(flip_mask);
    out.append(gamma_encode(uint64_t(count) + 1));
    int prev = 0;  // previous position, 0 before the first
    for (int p = 1; p <= block_bits; ++p) {
        if ((flip_mask >> (p - 1)) & 1u) {
            out.append(gamma_encode(uint64_t(p - prev) + 1));
            prev = p;
        }
    }
    return out;
}

uint64_t decode_flips(const BitStr& msg, int block_bits) {
    size_t pos = 0;
    const uint64_t count1 = gamma_decode(msg, &pos);
    if (count1 == 0) throw InputError("decode_flips: malformed count");
    uint64_t mask = 0;
    int prev = 0;
    for (uint64_t i = 0; i + 1 < count1; ++i) {
        const uint64_t gap1 = gamma_decode(msg, &pos);
        if (gap1 < 2) throw InputError("decode_flips: malformed gap");
        prev += int(gap1 - 1);
        if (prev > block_bits) throw InputError("decode_flips: position beyond block");
        mask |= uint64_t{1} << (prev - 1);
    }
    if (pos != msg.size()) throw InputError("decode_flips: trailing bits");
    return mask;
}

CorrectionGame::CorrectionGame(GameSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int n = spec_.n;
    const uint64_t N = uint64_t{1} << n;
    // Multi-source BFS over the hypercube. dist is implicit in the sweep;
    // cand[b] becomes the smallest member at minimal Hamming distance:
    // every member at distance d from b sits at distance d-1 from some
    // neighbor, so the minimum over last-layer neighbors is exact.
    std::vector<uint32_t> cand(N, UINT32_MAX);
    std::vector<uint8_t> dist(N, 255);
    std::vector<uint32_t> frontier;
    std::vector<uint64_t> fam = spec_.family;
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
    spec_.family = fam;
    for (uint64_t x : fam) {
        cand[x] = uint32_t(x);
        dist[x] = 0;
        frontier.push_back(uint32_t(x));
    }
    uint8_t d = 0;
    while (!frontier.empty()) {
        std::vector<uint32_t> next;
        for (uint32_t b : frontier)
            for (int i = 0; i < n; ++i) {
                const uint32_t nb = b ^ (uint32_t{1} << i);
                if (dist[nb] == 255) {
                    dist[nb] = uint8_t(d + 1);
                    next.push_back(nb);
                }
            }
        // Second pass so ties take the min over all d-layer neighbors.
        for (uint32_t b : next) {
            uint32_t best = UINT32_MAX;
            for (int i = 0; i < n; ++i) {
                const uint32_t nb = b ^ (uint32_t{1} << i);
                if (dist[nb] == d && cand[nb] < best) best = cand[nb];
            }
            cand[b] = best;
        }
        frontier = std::move(next);
        ++d;
    }
    nearest_ = std::move(cand);
}

Transcript CorrectionGame::play(uint64_t beta) const {
    if (beta >> spec_.n) throw InputError("play: beta wider than n bits");
    Transcript t;
    t.beta = beta;
    t.target = nearest_[beta];
    const uint64_t diff = beta ^ t.target;
    const int bb = spec_.block_bits();
    const uint64_t block_mask = (bb == 64) ? ~uint64_t{0} : ((uint64_t{1} << bb) - 1);
    for (int l = 0; l < spec_.m; ++l) {
        const uint64_t flips = (diff >> (l * bb)) & block_mask;
        BitStr msg = encode_flips(flips, bb);
        t.total_bits += msg.size();
        // The player decodes its own message alone.
        t.outputs.push_back(decode_flips(msg, bb));
        t.messages.push_back(std::move(msg));
    }
    return t;
}

CorrectionGame::ExpectedCost CorrectionGame::expected_cost(int budget_bits,
                                                           std::optional<uint64_t> mc_samples,
                                                           uint64_t seed) const {
    ExpectedCost ec;
    ec.per_player.assign(spec_.m, Rat(0));
    const int n = spec_.n;
    const int bb = spec_.block_bits();
    const uint64_t block_mask = (bb == 64) ? ~uint64_t{0} : ((uint64_t{1} << bb) - 1);

    auto cost_of = [&](uint64_t beta, int l) -> uint64_t {
        const uint64_t diff = beta ^ nearest_[beta];
        const uint64_t flips = (diff >> (l * bb)) & block_mask;
        uint64_t bits = gamma_length(uint64_t(__builtin_popcountll(flips)) + 1);
        int prev = 0;
        for (int p = 1; p <= bb; ++p)
            if ((flips >> (p - 1)) & 1u) {
                bits += gamma_length(uint64_t(p - prev) + 1);
                prev = p;
            }
        return bits;
    };

    if (n <= budget_bits) {
        const uint64_t N = uint64_t{1} << n;
        std::vector<uint64_t> totals(spec_.m, 0);
        for (uint64_t beta = 0; beta < N; ++beta)
            for (int l = 0; l < spec_.m; ++l) totals[l] += cost_of(beta, l);
        for (int l = 0; l < spec_.m; ++l) {
            ec.per_player[l] = Rat(totals[l]) / Rat(N);
            ec.total += ec.per_player[l];
        }
        ec.exact = true;
        return ec;
    }
    if (!mc_samples)
        throw InputError("expected_cost: n exceeds the enumeration budget; pass a Monte-Carlo "
                         "sample count to estimate instead");
    ec.exact = false;
    ec.samples = *mc_samples;
    std::mt19937_64 rng(seed);
    const uint64_t mask = (n == 64) ? ~uint64_t{0} : ((uint64_t{1} << n) - 1);
    std::vector<uint64_t> totals(spec_.m, 0);
    for (uint64_t s = 0; s < *mc_samples; ++s) {
        const uint64_t beta = rng() & mask;
        for (int l = 0; l < spec_.m; ++l) totals[l] += cost_of(beta, l);
    }
    for (int l = 0; l < spec_.m; ++l) {
        ec.per_player[l] = Rat(totals[l]) / Rat(*mc_samples);
        ec.total += ec.per_player[l];
    }
    // Hoeffding at 95%: lengths are bounded by the worst-case block code.
    const double lmax = double(gamma_length(uint64_t(bb) + 1) + bb * gamma_length(uint64_t(bb) + 1));
    ec.confidence_halfwidth =
        lmax * std::sqrt(std::log(2.0 / 0.05) / (2.0 * double(*mc_samples))) * spec_.m;
    return ec;
}

CorrectionGame::PrefixFreeReport CorrectionGame::verify_prefix_free(int budget_bits) const {
    if (spec_.n > budget_bits)
        throw InputError("verify_prefix_free: n exceeds the enumeration budget");
    PrefixFreeReport rep;
    const uint64_t N = uint64_t{1} << spec_.n;
    for (int l = 0; l < spec_.m; ++l) {
        std::map<BitStr, uint64_t> hist;
        for (uint64_t beta = 0; beta < N; ++beta) {
            const auto t = play(beta);
            ++hist[t.messages[l]];
        }
        std::vector<BitStr> distinct;
        uint64_t len_total = 0;
        double h = 0.0;
        Rat kraft = 0;
        for (const auto& [msg, cnt] : hist) {
            distinct.push_back(msg);
            len_total += cnt * msg.size();
            h += double(cnt) * std::log2(double(cnt));
            kraft += Rat(1) / Rat(boost::multiprecision::cpp_int(1) << msg.size());
        }
        const double entropy = std::log2(double(N)) - h / double(N);
        rep.entropy.push_back(entropy < 0 ? 0 : entropy);
        rep.mean_len.push_back(Rat(len_total) / Rat(N));
        rep.kraft_sum.push_back(kraft);
        if (const auto viol = prefix_violation(distinct)) {
            rep.prefix_free = false;
            rep.violations.push_back("player " + std::to_string(l + 1) + ": '" +
                                     distinct[viol->first].str() + "' prefixes '" +
                                     distinct[viol->second].str() + "'");
        }
        if (double(rep.mean_len.back()) + 1e-9 < rep.entropy.back())
            rep.expectation_dominates = false;
    }
    return rep;
}

LemmaBudget lemma_budget(double n, double m, double eps) {
    if (eps < 0 || eps > 1) throw InputError("lemma_budget: eps outside [0,1]");
    if (m < 1) throw InputError("lemma_budget: m must be >= 1");
    LemmaBudget b;
    b.term_linear = 3.0 * m;
    b.term_log = 2.0 * m * std::log2(std::sqrt(eps / 2.0) * (n / m) + 1.0);
    if (eps == 0.0) {
        b.term_tail = 0.0;  // limit of sqrt(eps) lg(2/eps)
        b.eps_zero_flagged = true;
    } else {
        b.term_tail = std::sqrt(eps / 8.0) * n * std::log2(2.0 / eps);
    }
    b.value = b.term_linear + b.term_log + b.term_tail;
    return b;
}

double largest_eps_within_5nk(int k) {
    // Per-n budget at m = n/k: 3/k + (2/k) lg(k sqrt(eps/2) + 1) +
    // sqrt(eps/8) lg(2/eps), compared against 5/k. Increasing in eps on
    // (0, 1/4], so bisection applies.
    auto gap = [&](double eps) {
        const double t2 = (2.0 / k) * std::log2(k * std::sqrt(eps / 2.0) + 1.0);
        const double t3 = std::sqrt(eps / 8.0) * std::log2(2.0 / eps);
        return 3.0 / k + t2 + t3 - 5.0 / k;
    };
    double lo = 0.0, hi = 0.25;
    if (gap(hi) <= 0) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2;
        (gap(mid) <= 0 ? lo : hi) = mid;
    }
    return lo;
}

std::vector<uint64_t> full_family(int n) {
    std::vector<uint64_t> f(uint64_t{1} << n);
    for (uint64_t i = 0; i < f.size(); ++i) f[i] = i;
    return f;
}

std::vector<uint64_t> random_family(int n, uint64_t size, uint64_t seed) {
    const uint64_t N = uint64_t{1} << n;
    if (size == 0 || size > N) throw InputError("random_family: size outside 1..2^n");
    // Seeded Floyd sampling without replacement, then sorted for
    // determinism independent of hash order.
    std::mt19937_64 rng(seed);
    std::vector<uint64_t> out;
    std::map<uint64_t, bool> chosen;
    for (uint64_t j = N - size; j < N; ++j) {
        std::uniform_int_distribution<uint64_t> d(0, j);
        const uint64_t t = d(rng);
        if (chosen.count(t))
            chosen[j] = true;
        else
            chosen[t] = true;
    }
    for (const auto& [v, _] : chosen) out.push_back(v);
    return out;
}

std::vector<uint64_t> load_family(std::istream& in, int n) {
    std::vector<uint64_t> fam;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "fixedbits") {
            std::string positions, values;
            if (!(ls >> positions >> values))
                throw InputError("family line " + std::to_string(lineno) +
                                 ": fixedbits needs <positions> <values>");
            std::vector<int> pos;
            std::stringstream ps(positions);
            std::string p;
            while (std::getline(ps, p, ',')) pos.push_back(std::stoi(p));
            if (pos.size() != values.size())
                throw InputError("fixedbits: positions and values differ in count");
            uint64_t fixed_mask = 0, fixed_val = 0;
            for (size_t i = 0; i < pos.size(); ++i) {
                if (pos[i] < 1 || pos[i] > n) throw InputError("fixedbits: position outside 1..n");
                fixed_mask |= uint64_t{1} << (pos[i] - 1);
                if (values[i] == '1')
                    fixed_val |= uint64_t{1} << (pos[i] - 1);
                else if (values[i] != '0')
                    throw InputError("fixedbits: values must be 0/1");
            }
            for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
                if ((x & fixed_mask) == fixed_val) fam.push_back(x);
        } else {
            uint64_t v = 0;
            for (char ch : tok) {
                int d;
                if (ch >= '0' && ch <= '9')
                    d = ch - '0';
                else if (ch >= 'a' && ch <= 'f')
                    d = ch - 'a' + 10;
                else if (ch >= 'A' && ch <= 'F')
                    d = ch - 'A' + 10;
                else
                    throw InputError("family line " + std::to_string(lineno) + ": bad hex");
                v = (v << 4) | uint64_t(d);
            }
            if (v >> n)
                throw InputError("family line " + std::to_string(lineno) + ": member exceeds n bits");
            fam.push_back(v);
        }
    }
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
    return fam;
}

std::vector<uint64_t> load_family_file(const std::string& path, int n) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open family file " + path);
    return load_family(f, n);
}

}  // namespace netshift
