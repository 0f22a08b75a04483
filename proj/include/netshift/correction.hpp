#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netshift/bitstr.hpp"
#include "netshift/common.hpp"

namespace netshift {

// Family-correction game: a supervisor sees a random n-bit string beta
// split into m blocks of n/m bits, sends each player one prefix-free
// message about their block, and each player flips the indicated bits so
// the corrected blocks concatenate into a member of the family.
struct GameSpec {
    int n = 0;
    int m = 1;
    std::vector<uint64_t> family;  // members as n-bit words, bit 0 = position 1

    int block_bits() const { return n / m; }
    double epsilon() const;  // 1 - lg|family| / n
    void validate() const;
};

struct Transcript {
    uint64_t beta = 0;
    uint64_t target = 0;             // chosen nearest member x*
    std::vector<BitStr> messages;    // R_1..R_m
    std::vector<uint64_t> outputs;   // chi_l as block_bits-bit masks
    size_t total_bits = 0;
};

// Per-block flip-set code: gamma(flip count + 1), then gamma(gap + 1) for
// each position gap (first gap = first position). Prefix-free by
// construction; decode_flips inverts it.
BitStr encode_flips(uint64_t flip_mask, int block_bits);
uint64_t decode_flips(const BitStr& msg, int block_bits);

// The game with a fixed family. Construction builds a nearest-member
// oracle (multi-source BFS over the hypercube, lexicographically smallest
// member at minimal Hamming distance), so play() is O(m) per call.
class CorrectionGame {
public:
    explicit CorrectionGame(GameSpec spec);

    const GameSpec& spec() const { return spec_; }

    // Supervisor picks the nearest member (ties: numerically smallest),
    // encodes each block's flip set; players decode their own message only.
    Transcript play(uint64_t beta) const;

    uint64_t nearest_member(uint64_t beta) const { return nearest_[beta]; }

    struct ExpectedCost {
        std::vector<Rat> per_player;  // E|R_l|, exact over uniform beta
        Rat total = 0;
        bool exact = true;
        uint64_t samples = 0;          // Monte-Carlo mode only
        double confidence_halfwidth = 0.0;
    };

    // Exact expectation by enumerating all 2^n beta (requires n <=
    // budget_bits, default 24); refuses beyond that unless mc_samples is
    // given, in which case it samples with the given seed and reports a
    // 95% Hoeffding half-width.
    ExpectedCost expected_cost(int budget_bits = 24, std::optional<uint64_t> mc_samples = {},
                               uint64_t seed = 0) const;

    struct PrefixFreeReport {
        bool prefix_free = true;
        std::vector<std::string> violations;
        std::vector<double> entropy;     // H(R_l)
        std::vector<Rat> mean_len;       // E|R_l|
        std::vector<Rat> kraft_sum;      // sum 2^-|R| over distinct messages
        bool expectation_dominates = true;  // E|R_l| >= H(R_l) for all l
    };

    // Enumerates all beta, checks the realized message set of every player
    // for prefix violations and E|R_l| >= H(R_l).
    PrefixFreeReport verify_prefix_free(int budget_bits = 24) const;

private:
    GameSpec spec_;
    std::vector<uint32_t> nearest_;  // per beta; family fits in 32 bits (n<=24 checked)
};

struct LemmaBudget {
    double value = 0.0;
    double term_linear = 0.0;   // 3m
    double term_log = 0.0;      // 2m lg(sqrt(eps/2) n/m + 1)
    double term_tail = 0.0;     // sqrt(eps/8) n lg(2/eps)
    bool eps_zero_flagged = false;
};

// The three-term communication budget 3m + 2m lg(sqrt(eps/2)(n/m)+1) +
// sqrt(eps/8) n lg(2/eps). At eps = 0 the tail term is taken at its limit 0
// and the result is flagged.
LemmaBudget lemma_budget(double n, double m, double eps);

// Largest eps for which the budget at m = n/k stays within 5n/k (bisection;
// the budget-minus-bound gap is monotone in eps on (0, 1/4]).
double largest_eps_within_5nk(int k);

// Family helpers.
std::vector<uint64_t> full_family(int n);
std::vector<uint64_t> random_family(int n, uint64_t size, uint64_t seed);
std::vector<uint64_t> load_family(std::istream& in, int n);
std::vector<uint64_t> load_family_file(const std::string& path, int n);

}  // namespace netshift
