#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netshift/flow.hpp"
#include "netshift/lp.hpp"

using namespace netshift;

namespace {

FlowInstance single_edge() {
    FlowInstance f;
    f.node_names = {"u", "v"};
    f.edges.push_back({"e", 0, 1, 1, false});
    f.commodities = {{0, 1}};
    return f;
}

FlowInstance shared_edge(int k) {
    FlowInstance f;
    f.node_names = {"u", "v"};
    f.edges.push_back({"e", 0, 1, 1, false});
    for (int i = 0; i < k; ++i) f.commodities.push_back({0, 1});
    return f;
}

FlowInstance cycle4() {
    FlowInstance f;
    f.node_names = {"a", "b", "c", "d"};
    f.edges.push_back({"ab", 0, 1, 1, false});
    f.edges.push_back({"bc", 1, 2, 1, false});
    f.edges.push_back({"cd", 2, 3, 1, false});
    f.edges.push_back({"da", 3, 0, 1, false});
    f.commodities = {{0, 2}, {1, 3}};  // antipodal pairs
    return f;
}

}  // namespace

TEST_CASE("simplex basics") {
    // max x + y st x + y <= 1, x <= 0.6
    LinearProgram<double> lp(2);
    lp.set_objective(0, 1);
    lp.set_objective(1, 1);
    int r = lp.add_row(RowType::LessEq, 1);
    lp.add_coeff(r, 0, 1);
    lp.add_coeff(r, 1, 1);
    r = lp.add_row(RowType::LessEq, 0.6);
    lp.add_coeff(r, 0, 1);
    const auto res = lp.maximize();
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(1.0));

    // Equality row with a positive rhs goes through phase 1.
    LinearProgram<double> lp2(2);
    lp2.set_objective(0, 1);
    int q = lp2.add_row(RowType::Eq, 1);
    lp2.add_coeff(q, 0, 1);
    lp2.add_coeff(q, 1, 1);
    const auto res2 = lp2.maximize();
    REQUIRE(res2.status == LpStatus::Optimal);
    CHECK(res2.objective == doctest::Approx(1.0));

    // Unbounded detection.
    LinearProgram<double> lp3(1);
    lp3.set_objective(0, 1);
    const auto res3 = lp3.maximize();
    CHECK(res3.status == LpStatus::Unbounded);

    // Infeasible equality.
    LinearProgram<double> lp4(1);
    lp4.set_objective(0, 1);
    int s = lp4.add_row(RowType::Eq, 2);
    lp4.add_coeff(s, 0, 1);
    int u = lp4.add_row(RowType::LessEq, 1);
    lp4.add_coeff(u, 0, 1);
    const auto res4 = lp4.maximize();
    CHECK(res4.status == LpStatus::Infeasible);
}

TEST_CASE("exact rational simplex agrees with float") {
    LinearProgram<Rat> lp(2);
    lp.set_objective(0, Rat(1));
    lp.set_objective(1, Rat(1));
    int r = lp.add_row(RowType::LessEq, Rat(1));
    lp.add_coeff(r, 0, Rat(1));
    lp.add_coeff(r, 1, Rat(3));
    r = lp.add_row(RowType::LessEq, Rat(1));
    lp.add_coeff(r, 0, Rat(3));
    lp.add_coeff(r, 1, Rat(1));
    const auto res = lp.maximize();
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == Rat(1) / 2);
}

TEST_CASE("single unit pair routes at rate 1") {
    const auto sol = max_concurrent_flow(single_edge());
    CHECK(sol.rate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(verify_flow(single_edge(), sol).pass);
}

TEST_CASE("k pairs sharing one unit edge get rate 1/k") {
    for (int k = 2; k <= 6; ++k) {
        const auto inst = shared_edge(k);
        const auto sol = max_concurrent_flow(inst);
        CHECK(sol.rate == doctest::Approx(1.0 / k).epsilon(1e-6));
        CHECK(verify_flow(inst, sol).pass);
        // Weak duality: the single edge is a cut separating all k pairs.
        CHECK(sol.rate <= 1.0 / k + 1e-6);
    }
}

TEST_CASE("C4 antipodal pairs achieve rate 1") {
    const auto inst = cycle4();
    const auto sol = max_concurrent_flow(inst);
    CHECK(sol.rate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(verify_flow(inst, sol).pass);
    // Each commodity splits across two 2-paths: flow length 2.
    CHECK(flow_length(inst, sol, 0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(flow_length(inst, sol, 1) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("exact mode returns the rational rate") {
    const auto sol = max_concurrent_flow(shared_edge(3), LpMode::Exact);
    REQUIRE(sol.rate_exact.has_value());
    CHECK(*sol.rate_exact == Rat(1) / 3);
    CHECK(verify_flow(shared_edge(3), sol).pass);
}

TEST_CASE("disconnected pair is flagged with rate 0") {
    FlowInstance f;
    f.node_names = {"a", "b", "c"};
    f.edges.push_back({"ab", 0, 1, 1, false});
    f.commodities = {{0, 2}};
    const auto sol = max_concurrent_flow(f);
    CHECK(sol.rate == 0.0);
    CHECK(sol.disconnected_pairs.size() == 1);
}

TEST_CASE("degenerate pair is excluded") {
    FlowInstance f = single_edge();
    f.commodities.push_back({0, 0});
    const auto sol = max_concurrent_flow(f);
    CHECK(sol.rate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.degenerate_pairs == std::vector<int>{1});
}

TEST_CASE("verify_flow catches hand-built violations") {
    const auto inst = single_edge();
    auto sol = max_concurrent_flow(inst);
    sol.flows[0][0][0] += 0.1;  // break conservation at both ends
    const auto res = verify_flow(inst, sol);
    CHECK_FALSE(res.pass);
    bool names_node = false;
    for (const auto& v : res.violations)
        if (v.what.find("conservation") != std::string::npos) names_node = true;
    CHECK(names_node);

    // Zero flow with rate 0 passes on an instance with a degenerate pair only.
    FlowInstance z;
    z.node_names = {"a"};
    z.commodities = {{0, 0}};
    FlowSolution zs;
    zs.rate = 0.0;
    zs.flows.assign(1, std::vector<std::array<double, 2>>(0));
    zs.degenerate_pairs = {0};
    CHECK(verify_flow(z, zs).pass);
}

TEST_CASE("flow length dominates the source-sink distance") {
    // Unit flow over a 3-edge path.
    FlowInstance f;
    f.node_names = {"a", "b", "c", "d"};
    f.edges.push_back({"e1", 0, 1, 1, false});
    f.edges.push_back({"e2", 1, 2, 1, false});
    f.edges.push_back({"e3", 2, 3, 1, false});
    f.commodities = {{0, 3}};
    const auto sol = max_concurrent_flow(f);
    CHECK(flow_length(f, sol, 0) == doctest::Approx(3.0));
    CHECK(flow_distance(f, 0, 3) == 3);

    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 6; ++iter) {
        // Random connected graph, a few commodities.
        const int n = 6;
        FlowInstance g;
        for (int i = 0; i < n; ++i) g.node_names.push_back("v" + std::to_string(i));
        for (int i = 1; i < n; ++i)
            g.edges.push_back({"t" + std::to_string(i), int(rng() % i), i, 1 + int(rng() % 2), false});
        for (int e = 0; e < 4; ++e) {
            const int a = int(rng() % n), b = int(rng() % n);
            if (a != b) g.edges.push_back({"x" + std::to_string(e), a, b, 1 + int(rng() % 2), false});
        }
        g.commodities = {{0, n - 1}, {1, n - 2}};
        const auto s = max_concurrent_flow(g);
        CHECK(verify_flow(g, s).pass);
        if (s.rate >= 1.0 - 1e-6)
            for (size_t i = 0; i < g.commodities.size(); ++i)
                CHECK(flow_length(g, s, int(i)) + 1e-6 >=
                      flow_distance(g, g.commodities[i].first, g.commodities[i].second));
    }
}

TEST_CASE("node throughflow on a relay path") {
    FlowInstance f;
    f.node_names = {"s", "m", "t"};
    f.edges.push_back({"e1", 0, 1, 1, false});
    f.edges.push_back({"e2", 1, 2, 1, false});
    f.commodities = {{0, 2}};
    const auto sol = max_concurrent_flow(f);
    const auto th = node_throughflow(f, sol, 1);
    CHECK(th[0] == doctest::Approx(1.0));
    const auto th2 = node_throughflow(f, sol, 0);
    CHECK(th2[0] == doctest::Approx(1.0));  // source net flow
}

TEST_CASE("optimum is invariant under commodity relabeling and node permutation") {
    FlowInstance base = cycle4();
    const double r0 = max_concurrent_flow(base).rate;

    FlowInstance swapped = base;
    std::swap(swapped.commodities[0], swapped.commodities[1]);
    CHECK(max_concurrent_flow(swapped).rate == doctest::Approx(r0).epsilon(1e-6));

    // Relabel nodes by a rotation.
    FlowInstance rot = base;
    auto p = [&](int v) { return (v + 1) % 4; };
    for (auto& e : rot.edges) {
        e.u = p(e.u);
        e.v = p(e.v);
    }
    for (auto& cpair : rot.commodities) cpair = {p(cpair.first), p(cpair.second)};
    CHECK(max_concurrent_flow(rot).rate == doctest::Approx(r0).epsilon(1e-6));
}

TEST_CASE("undirect keeps capacities, pairs and parallel edges") {
    CommInstance inst;
    const int a = inst.add_node("a"), b = inst.add_node("b");
    inst.add_edge("ab", a, b, 1);
    inst.add_edge("ba", b, a, 2);
    inst.add_pair(a, b, 1);
    const auto f = undirect(inst);
    CHECK(f.edges.size() == 2);  // antiparallel kept as parallel undirected
    CHECK(f.node_names.size() == 2);
    CHECK(f.commodities.size() == 1);
    CHECK(f.edges[0].cap == 1);
    CHECK(f.edges[1].cap == 2);

    const auto fr = undirect(inst, true);
    CHECK(fr.node_names.size() == 3);
    CHECK(fr.edges.size() == 3);
}
