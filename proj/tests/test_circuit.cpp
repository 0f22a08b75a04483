#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "netshift/circuit.hpp"
#include "netshift/circuit_io.hpp"
#include "test_util.hpp"

using namespace netshift;
using testutil::index_bits;

namespace {

Circuit tiny_from_text(const std::string& text) {
    std::istringstream in(text);
    return load_circuit(in);
}

const char* kAndCircuit =
    "node a input 1\n"
    "node b input 2\n"
    "node g gate 2 8\n"  // AND
    "node y output 1\n"
    "edge a g\nedge b g\nedge g y\n";

}  // namespace

TEST_CASE("evaluate identity wiring") {
    Circuit c = tiny_from_text(
        "node a input 1\nnode b input 2\n"
        "node y1 output 1\nnode y2 output 2\n"
        "edge a y1\nedge b y2\n");
    CHECK(evaluate(c, std::vector<uint8_t>{0, 1}) == std::vector<uint8_t>{0, 1});
    CHECK(evaluate(c, std::vector<uint8_t>{1, 0}) == std::vector<uint8_t>{1, 0});
}

TEST_CASE("evaluate single xor gate") {
    Circuit c = tiny_from_text(
        "node a input 1\nnode b input 2\n"
        "node g gate 2 6\n"
        "node y output 1\n"
        "edge a g\nedge b g\nedge g y\n");
    CHECK(evaluate(c, std::vector<uint8_t>{1, 1}) == std::vector<uint8_t>{0});
    CHECK(evaluate(c, std::vector<uint8_t>{0, 1}) == std::vector<uint8_t>{1});
    CHECK(evaluate(c, std::vector<uint8_t>{1, 0}) == std::vector<uint8_t>{1});
    CHECK(evaluate(c, std::vector<uint8_t>{0, 0}) == std::vector<uint8_t>{0});
}

TEST_CASE("evaluate rejects length mismatch") {
    Circuit c = tiny_from_text(kAndCircuit);
    CHECK_THROWS_AS(evaluate(c, std::vector<uint8_t>{1}), InputError);
}

TEST_CASE("hardwire AND input to 1 gives unary identity") {
    Circuit c = tiny_from_text(kAndCircuit);
    Circuit h = hardwire(c, {{1, 1}});  // b := 1
    CHECK(h.n_in == 1);
    CHECK(evaluate(h, std::vector<uint8_t>{0}) == std::vector<uint8_t>{0});
    CHECK(evaluate(h, std::vector<uint8_t>{1}) == std::vector<uint8_t>{1});
    const int g = h.find_node("g");
    REQUIRE(g >= 0);
    CHECK(h.nodes[g].fn.arity == 1);
    CHECK(h.nodes[g].fn.bit(0) == false);
    CHECK(h.nodes[g].fn.bit(1) == true);
}

TEST_CASE("hardwire AND input to 0 gives constant-0 gate") {
    Circuit c = tiny_from_text(kAndCircuit);
    Circuit h = hardwire(c, {{1, 0}});
    CHECK(evaluate(h, std::vector<uint8_t>{0}) == std::vector<uint8_t>{0});
    CHECK(evaluate(h, std::vector<uint8_t>{1}) == std::vector<uint8_t>{0});
}

TEST_CASE("hardwire rejects outputs and repeats") {
    Circuit c = tiny_from_text(kAndCircuit);
    CHECK_THROWS_AS(hardwire(c, {{3, 1}}), InputError);
    CHECK_THROWS_AS(hardwire(c, {{0, 1}, {0, 0}}), InputError);
}

TEST_CASE("hardwire commutes with evaluate on random circuits") {
    std::mt19937_64 rng(12345);
    for (int iter = 0; iter < 40; ++iter) {
        const int n = 3 + int(rng() % 5);
        Circuit c = testutil::random_circuit(rng, n, 4 + int(rng() % 8), 2 + int(rng() % 3));
        // Assign a random subset of inputs.
        std::vector<std::pair<int, uint8_t>> asg;
        std::vector<int> which;
        for (int i = 0; i < n; ++i)
            if (rng() % 2) {
                asg.push_back({i, uint8_t(rng() % 2)});
                which.push_back(i);
            }
        if (asg.empty()) asg.push_back({0, 1}), which.push_back(0);
        Circuit h = hardwire(c, asg);
        const int rem = n - int(asg.size());
        for (uint64_t v = 0; v < (uint64_t{1} << rem); ++v) {
            const auto xr = index_bits(v, rem);
            // Merge assigned bits into a full input vector.
            std::vector<uint8_t> full(n);
            size_t xi = 0, ai = 0;
            for (int i = 0; i < n; ++i) {
                if (ai < which.size() && which[ai] == i)
                    full[i] = asg[ai++].second;
                else
                    full[i] = xr[xi++];
            }
            CHECK(evaluate(h, xr) == evaluate(c, full));
        }
    }
}

TEST_CASE("hardwire of inner nodes matches forced evaluation") {
    std::mt19937_64 rng(999);
    for (int iter = 0; iter < 25; ++iter) {
        const int n = 4;
        Circuit c = testutil::random_circuit(rng, n, 8, 3);
        std::vector<std::pair<int, uint8_t>> asg;
        for (int i = n; i < c.size() - c.n_out; ++i)
            if (rng() % 3 == 0) asg.push_back({i, uint8_t(rng() % 2)});
        if (asg.empty()) continue;
        Circuit h = hardwire(c, asg);
        for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
            const auto x = index_bits(v, n);
            CHECK(evaluate(h, x) == evaluate_forced(c, x, asg));
        }
    }
}

TEST_CASE("undirected distances on a path") {
    Circuit c = tiny_from_text(
        "node a input 1\n"
        "node b gate 1 2\n"
        "node y output 1\n"
        "edge a b\nedge b y\n");
    const auto d = undirected_distances(c, 0);
    CHECK(d[0] == 0);
    CHECK(d[1] == 1);
    CHECK(d[2] == 2);

    const auto dr = undirected_distances(c, 0, std::vector<int>{0, 2});
    CHECK(dr[0] == 0);
    CHECK(dr[1] == -1);
    CHECK(dr[2] == -1);  // removing b disconnects
}

TEST_CASE("distances match Floyd-Warshall on random circuits") {
    std::mt19937_64 rng(4242);
    for (int iter = 0; iter < 10; ++iter) {
        Circuit c = testutil::random_circuit(rng, 4, 10, 3);
        const auto fw = testutil::fw_distances(c);
        for (int u = 0; u < c.size(); ++u) {
            const auto d = undirected_distances(c, u);
            for (int v = 0; v < c.size(); ++v) CHECK(d[v] == fw[u][v]);
        }
    }
}

TEST_CASE("ball sizes: radius 0, path counting, growth bound") {
    std::mt19937_64 rng(7);
    Circuit c = testutil::random_circuit(rng, 4, 12, 3);
    for (int u = 0; u < c.size(); ++u) CHECK(ball_size(c, u, 0) == 1);

    // P9 endpoint, r=3 -> 4 nodes.
    std::ostringstream path;
    path << "node a input 1\n";
    for (int i = 1; i <= 7; ++i) path << "node g" << i << " gate 1 2\n";
    path << "node y output 1\nedge a g1\n";
    for (int i = 1; i < 7; ++i) path << "edge g" << i << " g" << i + 1 << "\n";
    path << "edge g7 y\n";
    Circuit p9 = tiny_from_text(path.str());
    REQUIRE(p9.size() == 9);
    CHECK(ball_size(p9, 0, 3) == 4);

    // Growth bound in max-degree-D graphs: |B(u,r)| <= 1 + D((D-1)^r - 1)/(D-2).
    for (int iter = 0; iter < 10; ++iter) {
        Circuit g = testutil::random_circuit(rng, 4, 14, 3);
        const auto prof = degree_profile(g);
        const int D = prof.max_undirected;
        if (D < 3) continue;
        for (int u = 0; u < g.size(); ++u)
            for (int r = 0; r <= 4; ++r) {
                long bound = 1, layer = D;
                for (int i = 1; i <= r; ++i) {
                    bound += layer;
                    layer *= (D - 1);
                }
                CHECK(ball_size(g, u, r) <= bound);
            }
    }
}

TEST_CASE("ball counting within half-log radius stays below sqrt(t)*D") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 8; ++iter) {
        Circuit g = testutil::random_circuit(rng, 5, 20, 3);
        const auto prof = degree_profile(g);
        const long D = prof.max_undirected;
        if (D < 2) continue;
        const long t = g.size();
        int r = 0;  // floor(0.5 * log_D t): largest r with D^(2r) <= t
        while (true) {
            long p = 1;
            bool ok = true;
            for (int i = 0; i < 2 * (r + 1); ++i) {
                p *= D;
                if (p > t) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
            ++r;
        }
        for (int u = 0; u < g.size(); ++u) {
            const long ball = ball_size(g, u, r);
            CHECK(ball * ball <= t * D * D);  // ball <= sqrt(t)*D, exactly
        }
    }
}

TEST_CASE("degree profile basics") {
    Circuit c = tiny_from_text(kAndCircuit);
    const auto p = degree_profile(c);
    CHECK(p.max_in == 2);
    CHECK(p.max_out == 1);
    CHECK(p.max_undirected <= p.max_in + p.max_out);

    const auto empty = degree_profile(c, std::vector<int>{});
    CHECK(empty.max_in == 0);
    CHECK(empty.max_out == 0);
    CHECK(empty.max_undirected == 0);
}

TEST_CASE("circuit text round trip") {
    std::mt19937_64 rng(606);
    Circuit c = testutil::random_circuit(rng, 4, 9, 3);
    std::ostringstream out;
    save_circuit(out, c, "roundtrip");
    std::istringstream in(out.str());
    Circuit c2 = load_circuit(in);
    REQUIRE(c2.size() == c.size());
    REQUIRE(c2.edges.size() == c.edges.size());
    for (uint64_t v = 0; v < 16; ++v)
        CHECK(evaluate(c, index_bits(v, 4)) == evaluate(c2, index_bits(v, 4)));
}

TEST_CASE("loader rejects invariant violations") {
    CHECK_THROWS_AS(tiny_from_text("node y output 1\nnode a input 1\nedge a y\n"), InputError);
    CHECK_THROWS_AS(tiny_from_text("node a input 1\nnode g gate 2 8\nnode y output 1\n"
                                   "edge a g\nedge g y\n"),
                    InputError);  // arity 2, in-degree 1
    CHECK_THROWS_AS(tiny_from_text("node a input 2\nnode y output 1\nedge a y\n"), InputError);
    CHECK_THROWS_AS(tiny_from_text("node a input 1\nnode y output 1\nedge y a\n"), InputError);
}

TEST_CASE("split_high_degree leaves compliant circuits unchanged") {
    Circuit c = tiny_from_text(
        "node x1 input 1\nnode x2 input 2\n"
        "node y1 output 1\nnode y2 output 2\n"
        "edge x1 y1\nedge x2 y2\n");
    Circuit s = split_high_degree(c, 3);
    CHECK(s.size() == c.size());
    CHECK(s.edges.size() == c.edges.size());
}

TEST_CASE("split_high_degree reroutes a fat output through one middle node") {
    // One output reading 7 inputs through an OR table (factors through 1 bit).
    std::ostringstream t;
    for (int i = 1; i <= 7; ++i) t << "node x" << i << " input " << i << "\n";
    GateFn orfn = GateFn::make(7);
    for (uint64_t i = 1; i < orfn.rows(); ++i) orfn.set_bit(i, true);
    t << "node y output 1 7 " << table_hex(orfn) << "\n";
    for (int i = 1; i <= 7; ++i) t << "edge x" << i << " y\n";
    Circuit c = tiny_from_text(t.str());

    Circuit s = split_high_degree(c, 3);
    const auto shape = analyze_depth3(s, 7);
    CHECK(shape.f_nodes.size() == 1);
    CHECK(shape.c <= 3);
    CHECK(shape.xy_edges.empty());  // that output's X-degree dropped to 0
    for (uint64_t v = 0; v < 128; ++v)
        CHECK(evaluate(s, index_bits(v, 7)) == evaluate(c, index_bits(v, 7)));
}

TEST_CASE("split_high_degree preserves function on random splittable instances") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 12; ++iter) {
        // Depth-3 instance: middle gates random, outputs combine middle bits
        // with an X-window whose influence factors through OR of the window.
        const int n = 6;
        std::ostringstream t;
        for (int i = 1; i <= n; ++i) t << "node x" << i << " input " << i << "\n";
        const int f = 2;
        for (int j = 1; j <= f; ++j) {
            GateFn fn = GateFn::make(2);
            for (uint64_t i = 0; i < 4; ++i) fn.set_bit(i, rng() & 1);
            t << "node f" << j << " gate 2 " << table_hex(fn) << "\n";
        }
        std::vector<std::string> edges;
        for (int j = 1; j <= f; ++j) {
            edges.push_back("edge x" + std::to_string(1 + int(rng() % n)) + " f" + std::to_string(j));
            edges.push_back("edge x" + std::to_string(1 + int(rng() % n)) + " f" + std::to_string(j));
        }
        // y1: fat output over all inputs plus both middle gates; the X-part
        // enters via parity, a 1-bit statistic.
        GateFn g = GateFn::make(n + f);
        for (uint64_t i = 0; i < g.rows(); ++i) {
            int par = 0;
            for (int bpos = 0; bpos < n; ++bpos) par ^= int((i >> bpos) & 1u);
            const uint64_t mid = i >> n;
            g.set_bit(i, (par ^ int(mid & 1u) ^ int((mid >> 1) & 1u)) != 0);
        }
        // Coordinate order inside the file: in-edges sorted by position, so
        // x's (positions 0..n-1) then f's; matches the table layout above.
        t << "node y1 output 1 " << (n + f) << " " << table_hex(g) << "\n";
        t << "node y2 output 2\n";
        for (const auto& e : edges) t << e << "\n";
        for (int i = 1; i <= n; ++i) t << "edge x" << i << " y1\n";
        for (int j = 1; j <= f; ++j) t << "edge f" << j << " y1\n";
        t << "edge x1 y2\n";
        Circuit c = tiny_from_text(t.str());

        Circuit s = split_high_degree(c, 3);
        const auto prof_after = analyze_depth3(s, n);
        CHECK(prof_after.c <= 3);
        for (uint64_t v = 0; v < (uint64_t{1} << n); ++v)
            CHECK(evaluate(s, index_bits(v, n)) == evaluate(c, index_bits(v, n)));
        // Middle layer grew by at most (edge count)/threshold.
        const auto shape_before = analyze_depth3(c, n);
        CHECK(int(prof_after.f_nodes.size() - shape_before.f_nodes.size()) <=
              int(shape_before.xy_edges.size()) / 3 + 1);
    }
}

TEST_CASE("split_high_degree refuses non-factorable outputs") {
    // The middle bit selects WHICH input reaches the output, so the
    // X-dependence cannot be carried by any single relay bit.
    std::ostringstream t;
    for (int i = 1; i <= 5; ++i) t << "node x" << i << " input " << i << "\n";
    t << "node f1 gate 1 2\n";
    GateFn sel = GateFn::make(6);
    for (uint64_t i = 0; i < sel.rows(); ++i) {
        const int x1 = int(i & 1u);
        const int rest = int((i >> 1) & 1u) ^ int((i >> 2) & 1u) ^ int((i >> 3) & 1u) ^
                         int((i >> 4) & 1u);
        sel.set_bit(i, ((i >> 5) & 1u) ? x1 : rest);
    }
    t << "node y output 1 6 " << table_hex(sel) << "\n";
    t << "edge x1 f1\n";
    for (int i = 1; i <= 5; ++i) t << "edge x" << i << " y\n";
    t << "edge f1 y\n";
    Circuit c = tiny_from_text(t.str());
    CHECK_THROWS_AS(split_high_degree(c, 3), InputError);
}

TEST_CASE("gate table restrict and permute primitives") {
    std::mt19937_64 rng(88);
    for (int iter = 0; iter < 30; ++iter) {
        const int arity = 2 + int(rng() % 4);
        GateFn fn = GateFn::make(arity);
        for (uint64_t i = 0; i < fn.rows(); ++i) fn.set_bit(i, rng() & 1);

        const int coord = int(rng() % arity);
        const bool val = rng() & 1;
        GateFn r = fn.restrict_coord(coord, val);
        for (uint64_t i = 0; i < r.rows(); ++i) {
            const uint64_t lo = i & ((uint64_t{1} << coord) - 1);
            const uint64_t full = lo | (uint64_t(val) << coord) | ((i >> coord) << (coord + 1));
            CHECK(r.bit(i) == fn.bit(full));
        }

        std::vector<int> perm(arity);
        for (int i = 0; i < arity; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        GateFn p = fn.permute_coords(perm);
        for (uint64_t i = 0; i < p.rows(); ++i) {
            uint64_t old_idx = 0;
            for (int k = 0; k < arity; ++k)
                if ((i >> k) & 1u) old_idx |= uint64_t{1} << perm[k];
            CHECK(p.bit(i) == fn.bit(old_idx));
        }
    }
}
