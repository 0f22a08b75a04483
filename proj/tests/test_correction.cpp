#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "netshift/correction.hpp"

using namespace netshift;

namespace {

// Brute-force nearest member: scan the family in increasing numeric order,
// keep the first strict improvement. Independent of the BFS oracle.
uint64_t brute_nearest(const std::vector<uint64_t>& fam, uint64_t beta) {
    uint64_t best = fam[0];
    int bestd = __builtin_popcountll(fam[0] ^ beta);
    for (uint64_t x : fam) {
        const int d = __builtin_popcountll(x ^ beta);
        if (d < bestd || (d == bestd && x < best)) {
            best = x;
            bestd = d;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("gamma code basics") {
    CHECK(gamma_encode(1).str() == "1");
    CHECK(gamma_encode(2).str() == "010");
    CHECK(gamma_encode(3).str() == "011");
    CHECK(gamma_encode(4).str() == "00100");
    for (uint64_t m = 1; m <= 200; ++m) {
        const auto code = gamma_encode(m);
        CHECK(code.size() == gamma_length(m));
        size_t pos = 0;
        CHECK(gamma_decode(code, &pos) == m);
        CHECK(pos == code.size());
    }
}

TEST_CASE("flip-set code round trips") {
    std::mt19937_64 rng(11);
    for (int bb : {1, 4, 8, 20}) {
        for (int it = 0; it < 50; ++it) {
            const uint64_t mask = rng() & ((uint64_t{1} << bb) - 1);
            const auto msg = encode_flips(mask, bb);
            CHECK(decode_flips(msg, bb) == mask);
        }
        CHECK(encode_flips(0, bb).str() == "1");  // count-0 codeword
    }
}

TEST_CASE("full family needs no correction") {
    GameSpec spec;
    spec.n = 8;
    spec.m = 2;
    spec.family = full_family(8);
    CorrectionGame game(spec);
    for (uint64_t beta = 0; beta < 256; ++beta) {
        const auto t = game.play(beta);
        CHECK(t.target == beta);
        for (const auto& msg : t.messages) CHECK(msg.str() == "1");
        for (auto chi : t.outputs) CHECK(chi == 0);
        CHECK(t.total_bits == 2);
    }
    const auto ec = game.expected_cost();
    for (const auto& c : ec.per_player) CHECK(c == Rat(1));
}

TEST_CASE("singleton zero family forces full correction") {
    GameSpec spec;
    spec.n = 8;
    spec.m = 2;
    spec.family = {0};
    CorrectionGame game(spec);
    const auto t = game.play(0xff);
    for (auto chi : t.outputs) CHECK(chi == 0xf);

    // Exact expected cost against a direct summation over block patterns.
    const auto ec = game.expected_cost();
    const int bb = 4;
    Rat direct = 0;
    for (uint64_t pat = 0; pat < 16; ++pat) {
        uint64_t bits = gamma_length(uint64_t(__builtin_popcountll(pat)) + 1);
        int prev = 0;
        for (int p = 1; p <= bb; ++p)
            if ((pat >> (p - 1)) & 1u) {
                bits += gamma_length(uint64_t(p - prev) + 1);
                prev = p;
            }
        direct += Rat(bits);
    }
    direct /= 16;
    CHECK(ec.per_player[0] == direct);
    CHECK(ec.per_player[1] == direct);
}

TEST_CASE("corrected strings always land in the family") {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 4; ++it) {
        GameSpec spec;
        spec.n = 10;
        spec.m = (it % 2) ? 5 : 2;
        spec.family = random_family(spec.n, 64 + rng() % 256, rng());
        CorrectionGame game(spec);
        const int bb = spec.block_bits();
        std::vector<uint64_t> fam = game.spec().family;
        std::sort(fam.begin(), fam.end());
        for (uint64_t beta = 0; beta < (uint64_t{1} << spec.n); ++beta) {
            const auto t = game.play(beta);
            uint64_t corrected = 0;
            for (int l = 0; l < spec.m; ++l) {
                const uint64_t blk = (beta >> (l * bb)) & ((uint64_t{1} << bb) - 1);
                corrected |= (blk ^ t.outputs[l]) << (l * bb);
            }
            CHECK(std::binary_search(fam.begin(), fam.end(), corrected));
            CHECK(corrected == t.target);
        }
    }
}

TEST_CASE("oracle nearest matches brute force with lexicographic ties") {
    std::mt19937_64 rng(123);
    for (int it = 0; it < 5; ++it) {
        GameSpec spec;
        spec.n = 9;
        spec.m = 3;
        spec.family = random_family(spec.n, 20 + rng() % 100, rng());
        CorrectionGame game(spec);
        for (uint64_t beta = 0; beta < (uint64_t{1} << spec.n); ++beta)
            CHECK(game.nearest_member(beta) == brute_nearest(game.spec().family, beta));
    }
}

TEST_CASE("single fixed bit goes to the owning player") {
    // Family: strings with bit 3 = 0 (n=8, m=2 -> bit 3 belongs to player 1).
    GameSpec spec;
    spec.n = 8;
    spec.m = 2;
    for (uint64_t x = 0; x < 256; ++x)
        if (!((x >> 2) & 1u)) spec.family.push_back(x);
    CorrectionGame game(spec);
    for (uint64_t beta = 0; beta < 256; ++beta) {
        const auto t = game.play(beta);
        const bool bit3 = (beta >> 2) & 1u;
        if (bit3) {
            CHECK(t.outputs[0] == (uint64_t{1} << 2));
            CHECK(t.outputs[1] == 0);
            CHECK(t.messages[1].str() == "1");
        } else {
            CHECK(t.outputs[0] == 0);
            CHECK(t.outputs[1] == 0);
        }
    }
}

TEST_CASE("prefix freedom and source-coding bound on random families") {
    std::mt19937_64 rng(2718);
    for (int it = 0; it < 3; ++it) {
        GameSpec spec;
        spec.n = 10;
        spec.m = 2;
        spec.family = random_family(spec.n, 128, rng());
        CorrectionGame game(spec);
        const auto rep = game.verify_prefix_free();
        CHECK(rep.prefix_free);
        CHECK(rep.expectation_dominates);
        for (int l = 0; l < spec.m; ++l) {
            CHECK(double(rep.mean_len[l]) + 1e-9 >= rep.entropy[l]);
            CHECK(rep.kraft_sum[l] <= Rat(1));
        }
    }
}

TEST_CASE("zero-correction identity on family members") {
    std::mt19937_64 rng(31);
    GameSpec spec;
    spec.n = 12;
    spec.m = 3;
    spec.family = random_family(spec.n, 500, rng());
    CorrectionGame game(spec);
    for (uint64_t x : game.spec().family) {
        const auto t = game.play(x);
        CHECK(t.target == x);
        for (auto chi : t.outputs) CHECK(chi == 0);
    }
}

TEST_CASE("player locality: outputs depend on the own message only") {
    GameSpec spec;
    spec.n = 8;
    spec.m = 4;
    spec.family = random_family(spec.n, 40, 5);
    CorrectionGame game(spec);
    for (uint64_t beta = 0; beta < 256; ++beta) {
        const auto t = game.play(beta);
        for (int l = 0; l < spec.m; ++l)
            CHECK(decode_flips(t.messages[l], spec.block_bits()) == t.outputs[l]);
    }
}

TEST_CASE("enlarging the family does not raise the expected total cost") {
    std::mt19937_64 rng(404);
    for (int it = 0; it < 3; ++it) {
        GameSpec small;
        small.n = 10;
        small.m = 2;
        small.family = random_family(small.n, 64, rng());
        GameSpec big = small;
        auto extra = random_family(big.n, 512, rng());
        big.family.insert(big.family.end(), extra.begin(), extra.end());
        GameSpec all = small;
        all.family = full_family(all.n);

        const auto cs = CorrectionGame(small).expected_cost().total;
        const auto cb = CorrectionGame(big).expected_cost().total;
        const auto ca = CorrectionGame(all).expected_cost().total;
        CHECK(cb <= cs);
        CHECK(ca <= cb);
        CHECK(ca == Rat(all.m));
    }
}

TEST_CASE("budget formula values and limits") {
    // Generic reproduction of the three-term expression.
    for (double n : {8.0, 16.0, 64.0}) {
        for (double m : {2.0, 4.0}) {
            for (double eps : {0.01, 0.1, 0.25}) {
                const auto b = lemma_budget(n, m, eps);
                const double expect = 3 * m + 2 * m * std::log2(std::sqrt(eps / 2) * (n / m) + 1) +
                                      std::sqrt(eps / 8) * n * std::log2(2 / eps);
                CHECK(b.value == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
    // eps = 0: tail term at its limit, flagged.
    const auto z = lemma_budget(16, 4, 0.0);
    CHECK(z.eps_zero_flagged);
    CHECK(z.value == doctest::Approx(12.0));
    // Tail term vanishes as eps -> 0.
    CHECK(lemma_budget(16, 4, 1e-12).term_tail < 1e-3);
}

TEST_CASE("largest eps admitted by the 5n/k bound at k=20") {
    const double e = largest_eps_within_5nk(20);
    CHECK(e > 1e-5);
    CHECK(e < 1e-3);
    // In particular 1/300 is NOT small enough for the bound at k=20.
    CHECK(e < 1.0 / 300.0);
}

TEST_CASE("family file parsing") {
    std::istringstream in("# two members and a structured block\n0f\n03\nfixedbits 1,2 00\n");
    const auto fam = load_family(in, 6);
    // fixedbits 1,2=00 gives 16 strings; 0x0f and 0x03 are among x with
    // low bits set so they add two more distinct members.
    CHECK(fam.size() == 18);
    std::istringstream bad("fixedbits 9 1\n");
    CHECK_THROWS_AS(load_family(bad, 6), InputError);
}
