#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "netshift/circuit_io.hpp"
#include "netshift/netcode_io.hpp"
#include "netshift/reduction.hpp"
#include "test_util.hpp"

using namespace netshift;
using testutil::index_bits;

TEST_CASE("choose_shift_A on the barrel shifter") {
    const Circuit c = build_barrel_shifter(8);
    const auto r = choose_shift_A(c, 8);
    CHECK(r.degree_c == 3);
    CHECK(r.l0 >= 1);
    CHECK(r.l0 <= 8);
    CHECK(r.far_count >= 0);
    CHECK(r.far_count <= 8);
    // The chosen shift maximizes the count.
    for (int l = 1; l <= 8; ++l) CHECK(r.per_shift_far[l] <= r.far_count);
    // Distances agree with a fresh BFS for a few spot pairs.
    for (int j : {1, 4, 8}) {
        const auto d = undirected_distances(c, j - 1);
        CHECK(d == r.source_dist[j - 1]);
    }
}

TEST_CASE("identity-wired circuit is a negative control") {
    // y_j = x_j directly: distance 1 pairs at l=1; such a circuit cannot
    // compute every shift, and its far count at l=1 is 0 only when the
    // threshold exceeds 1.
    const Circuit c = build_depth3_identity(8, 1);
    const auto r = choose_shift_A(c, 8, true);  // cyclic pairing, n outputs
    CHECK(r.degree_c == 1);
    // With c=1 the base-2 threshold is 0.5 lg 8 = 1.5, so the wired pairs
    // (distance 1) are close: at alpha=1 nothing is far.
    CHECK(r.per_shift_far[1] == 0);
}

TEST_CASE("build_instance_A: witness solution is correct with unit entropies") {
    const Circuit c = build_barrel_shifter(4);
    const auto chosen = choose_shift_A(c, 4);
    auto built = build_instance_A(c, 4, chosen.l0);
    CHECK(built.instance.pairs.size() == 4);
    const auto res = verify_correctness(built.instance, built.solution);
    CHECK(res.pass);
    const auto rep = measure_rate(built.instance, built.solution);
    CHECK(rep.ok);
    CHECK(rep.rate == doctest::Approx(1.0));
    for (const auto& row : rep.rows)
        if (!row.injector) CHECK(row.entropy <= 1.0 + 1e-9);
}

TEST_CASE("certify_A end to end on the 8-bit barrel shifter") {
    const Circuit c = build_barrel_shifter(8);
    const auto cert = certify_A(c);
    CHECK(cert.verdict);
    REQUIRE(cert.find("coding-rate"));
    CHECK(cert.find("coding-rate")->pass);
    REQUIRE(cert.find("consistency"));
    CHECK(cert.find("consistency")->pass);
    REQUIRE(cert.find("edge-budget"));
    CHECK(cert.find("edge-budget")->pass);
    // Small-n steps are flagged informational, not silently passed.
    REQUIRE(cert.find("far-pairs"));
    CHECK_FALSE(cert.find("far-pairs")->binding);

    std::ostringstream text, csv;
    write_certificate_text(text, cert);
    write_certificate_csv(csv, cert);
    CHECK(text.str().find("verdict") != std::string::npos);
    CHECK(csv.str().find("step,anchor") != std::string::npos);
}

TEST_CASE("choose_alpha_B on depth3 identity: far for shifted alpha only") {
    const Circuit c = build_depth3_identity(16, 1);
    const auto shape = analyze_depth3(c);
    const auto r = choose_alpha_B(c, shape, 4);
    // alpha = 1 aligns the direct wires: no block far. Any alpha > k keeps
    // every in-block pair unwired and hence infinitely far.
    CHECK(r.per_alpha_far[1] == 0);
    for (int alpha = 5; alpha <= 16; ++alpha) CHECK(r.per_alpha_far[alpha] == 4);
    CHECK(r.far_blocks == 4);
    CHECK(r.alpha0 == 5);
    CHECK(r.bound_vacuous);  // k^4 = 256 >= 16
}

TEST_CASE("extract_family: empty middle layer gives the full cube") {
    const Circuit c = build_depth3_identity(8, 1);
    const auto shape = analyze_depth3(c);
    const auto ex = extract_family(c, shape, 1, ShiftEncoding::OneHot);
    CHECK(ex.family.size() == 256);
    CHECK(ex.fhat.empty());
}

TEST_CASE("extract_family: one projection gate halves the cube") {
    // Middle gate computing x_1; fiber = half-space.
    std::ostringstream t;
    const int n = 6;
    for (int i = 1; i <= n; ++i) t << "node x" << i << " input " << i << "\n";
    t << "node f1 gate 1 2\n";
    for (int j = 1; j <= n; ++j) t << "node y" << j << " output " << j << "\n";
    t << "edge x1 f1\n";
    for (int j = 1; j <= n; ++j) t << "edge x" << j << " y" << j << "\n";
    std::istringstream in(t.str());
    const Circuit c = [&] {
        std::istringstream is(t.str());
        return load_circuit(is);
    }();
    const auto shape = analyze_depth3(c, n);
    const auto ex = extract_family(c, shape, 1, ShiftEncoding::OneHot);
    CHECK(ex.family.size() == 32);
    REQUIRE(ex.fhat.size() == 1);
    // Ties broken toward the smaller fiber value: x_1 = 0.
    CHECK(ex.fhat[0] == 0);
    for (uint64_t x : ex.family) CHECK((x & 1) == 0);
}

TEST_CASE("extract_family bucketing matches brute force on random middles") {
    std::mt19937_64 rng(55);
    for (int it = 0; it < 5; ++it) {
        // Depth-3 with 2 random middle gates feeding nothing (fiber only).
        const int n = 10;
        std::ostringstream t;
        for (int i = 1; i <= n; ++i) t << "node x" << i << " input " << i << "\n";
        std::vector<std::array<int, 2>> srcs;
        for (int j = 1; j <= 2; ++j) {
            GateFn fn = GateFn::make(2);
            for (uint64_t i = 0; i < 4; ++i) fn.set_bit(i, rng() & 1);
            t << "node f" << j << " gate 2 " << table_hex(fn) << "\n";
            srcs.push_back({1 + int(rng() % n), 1 + int(rng() % (n - 1))});
            if (srcs.back()[1] >= srcs.back()[0]) srcs.back()[1]++;
        }
        for (int j = 1; j <= n; ++j) t << "node y" << j << " output " << j << "\n";
        for (int j = 1; j <= 2; ++j) {
            auto [a, b] = srcs[j - 1];
            t << "edge x" << std::min(a, b) << " f" << j << "\n";
            t << "edge x" << std::max(a, b) << " f" << j << "\n";
        }
        for (int j = 1; j <= n; ++j) t << "edge x" << j << " y" << j << "\n";
        std::istringstream is(t.str());
        const Circuit c = load_circuit(is);
        const auto shape = analyze_depth3(c, n);
        const auto ex = extract_family(c, shape, 1, ShiftEncoding::OneHot);

        // Brute force: histogram of the two middle values.
        std::map<std::vector<uint8_t>, uint64_t> hist;
        for (uint64_t v = 0; v < 1024; ++v) {
            const auto x = index_bits(v, n);
            ++hist[evaluate_nodes(c, x, shape.f_nodes)];
        }
        uint64_t best = 0;
        for (const auto& [k2, cnt] : hist) best = std::max(best, cnt);
        CHECK(uint64_t(ex.family.size()) == best);
        CHECK(ex.family.size() >= 256);  // pigeonhole: 2^10 / 2^2
    }
}

TEST_CASE("build_network_B: counts, capacities and the rate-k protocol") {
    const int n = 8, k = 2;
    const Circuit c = build_depth3_identity(n, 1);
    const auto shape = analyze_depth3(c);
    const auto ex = extract_family(c, shape, 1, ShiftEncoding::OneHot);
    auto built = build_network_B(ex.gamma, analyze_depth3(ex.gamma, n), 1, ex.family, k);

    const int m = n / k;
    // Edge count: |E(Gamma)| + 2m + 2m + 2n (plus injectors).
    CHECK(built.instance.edges.size() == size_t(n + 4 * m + 2 * n + m));
    // Full family: one-bit messages, E|R| = 1 per player.
    for (const auto& cst : built.player_cost) CHECK(cst == Rat(1));
    CHECK(built.cost_total == Rat(m));

    const auto vres = verify_correctness(built.instance, built.solution);
    CHECK(vres.pass);
    const auto rep = measure_rate(built.instance, built.solution);
    CHECK(rep.ok);
    CHECK(rep.rate == doctest::Approx(double(k)));

    // Supervisor out-capacity equals the measured cost total exactly.
    Rat ua_total = 0;
    for (const auto& e : built.instance.edges)
        if (e.id.rfind("ua", 0) == 0) ua_total += e.cap;
    CHECK(ua_total == built.cost_total);
}

TEST_CASE("mode-B protocol with a random family stays within capacities") {
    const int n = 8, k = 4;
    const Circuit c = build_depth3_identity(n, 1);
    const auto ex = extract_family(c, analyze_depth3(c), 1, ShiftEncoding::OneHot);
    const auto fam = random_family(n, uint64_t{1} << (n - 2), 99);
    auto built = build_network_B(ex.gamma, analyze_depth3(ex.gamma, n), 1, fam, k);
    CHECK(verify_correctness(built.instance, built.solution).pass);
    const auto rep = measure_rate(built.instance, built.solution);
    CHECK(rep.ok);
    // Supervisor edges carry variable-length prefix-free messages and are
    // decided by the source-coding route; everything else by support.
    for (const auto& row : rep.rows) {
        CHECK(row.pass);
        if (row.edge_id.rfind("ua", 0) == 0 || row.edge_id.rfind("ut", 0) == 0) {
            CHECK(row.prefix_free);
            CHECK(row.mean_len == row.cap);
        }
    }
}

TEST_CASE("certify_B end to end on depth3 identity") {
    const Circuit c = build_depth3_identity(16, 1);
    const auto cert = certify_B(c, 4);
    CHECK(cert.verdict);
    REQUIRE(cert.find("coding-rate"));
    CHECK(cert.find("coding-rate")->pass);
    REQUIRE(cert.find("consistency"));
    CHECK(cert.find("consistency")->pass);
    // Distance-degenerate steps are flagged, not silently passed.
    REQUIRE(cert.find("far-low-count"));
    CHECK_FALSE(cert.find("far-low-count")->binding);
    REQUIRE(cert.find("degree-count"));
    CHECK(cert.find("degree-count")->pass);
}

TEST_CASE("certify_B on a depth3 shift circuit") {
    const auto gen = build_depth3_shift(8, 0.5, ShiftEncoding::OneHot);
    CertifyOptions opts;
    opts.data_bits = 8;
    const auto cert = certify_B(gen.circuit, 2, opts);
    CHECK(cert.verdict);
    REQUIRE(cert.find("transfer-function"));
    CHECK(cert.find("transfer-function")->pass);
    REQUIRE(cert.find("family-size"));
    CHECK(cert.find("family-size")->pass);
}

TEST_CASE("strict mode fails vacuous steps") {
    const Circuit c = build_depth3_identity(16, 1);
    CertifyOptions opts;
    opts.strict = true;
    const auto cert = certify_B(c, 4, opts);
    CHECK_FALSE(cert.verdict);  // k^4 >= n makes several steps vacuous
}

TEST_CASE("certificates are monotone under capacity increase") {
    // Raising one capacity never lowers the LP rate.
    const Circuit c = build_depth3_identity(8, 1);
    const auto ex = extract_family(c, analyze_depth3(c), 1, ShiftEncoding::OneHot);
    auto built = build_network_B(ex.gamma, analyze_depth3(ex.gamma, 8), 1, ex.family, 2);
    auto flow1 = undirect(built.instance);
    const double r1 = max_concurrent_flow(flow1).rate;
    auto flow2 = flow1;
    flow2.edges[0].cap += 5;
    const double r2 = max_concurrent_flow(flow2).rate;
    CHECK(r2 >= r1 - 1e-6);
}
