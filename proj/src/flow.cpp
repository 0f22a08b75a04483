#include "netshift/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "netshift/lp.hpp"

namespace netshift {

int FlowInstance::find_node(const std::string& name) const {
    for (int i = 0; i < int(node_names.size()); ++i)
        if (node_names[i] == name) return i;
    return -1;
}

void FlowInstance::validate() const {
    const int n = int(node_names.size());
    for (const auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw InputError("flow edge " + e.id + " has unknown endpoint");
        if (!e.infinite && e.cap < 0) throw InputError("flow edge " + e.id + " has negative capacity");
    }
    for (const auto& [s, t] : commodities)
        if (s < 0 || s >= n || t < 0 || t >= n) throw InputError("commodity endpoint unknown");
}

FlowInstance undirect(const CommInstance& inst, bool retain_injectors) {
    FlowInstance f;
    std::vector<int> remap(inst.node_names.size(), -1);
    std::vector<uint8_t> is_injector(inst.node_names.size(), 0);
    for (const auto& p : inst.pairs) is_injector[p.injector_node] = 1;
    for (size_t i = 0; i < inst.node_names.size(); ++i) {
        if (!retain_injectors && is_injector[i]) continue;
        remap[i] = int(f.node_names.size());
        f.node_names.push_back(inst.node_names[i]);
    }
    for (const auto& e : inst.edges) {
        if (!retain_injectors && e.injector) continue;
        FlowEdge fe;
        fe.id = e.id;
        fe.u = remap[e.src];
        fe.v = remap[e.dst];
        fe.cap = e.cap;
        fe.infinite = e.infinite;
        f.edges.push_back(std::move(fe));
    }
    for (const auto& p : inst.pairs) f.commodities.emplace_back(remap[p.src], remap[p.dst]);
    f.validate();
    return f;
}

namespace {

std::vector<std::vector<std::pair<int, int>>> adjacency(const FlowInstance& inst) {
    // (neighbor, edge id) both directions
    std::vector<std::vector<std::pair<int, int>>> adj(inst.node_names.size());
    for (int e = 0; e < int(inst.edges.size()); ++e) {
        adj[inst.edges[e].u].push_back({inst.edges[e].v, e});
        adj[inst.edges[e].v].push_back({inst.edges[e].u, e});
    }
    return adj;
}

// Cancel directed cycles in one commodity's raw flow (g values on edge
// orientations). Each pass finds a cycle in the positive-support graph by
// DFS and subtracts its bottleneck; terminates because the support loses at
// least one arc per cancellation.
void cancel_cycles(const FlowInstance& inst, std::vector<std::array<double, 2>>& g) {
    const double eps = 1e-12;
    const int n = int(inst.node_names.size());
    // Antiparallel flow on the same edge is a 2-cycle; clear it first.
    for (auto& ge : g) {
        const double m = std::min(ge[0], ge[1]);
        if (m > 0) {
            ge[0] -= m;
            ge[1] -= m;
        }
    }
    while (true) {
        std::vector<std::vector<std::pair<int, int>>> out(n);  // (to, arc = 2e+dir)
        for (int e = 0; e < int(inst.edges.size()); ++e) {
            if (g[e][0] > eps) out[inst.edges[e].u].push_back({inst.edges[e].v, 2 * e});
            if (g[e][1] > eps) out[inst.edges[e].v].push_back({inst.edges[e].u, 2 * e + 1});
        }
        // Iterative DFS looking for a back arc to a node on the stack.
        std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
        std::vector<int> arc_from(n, -1), parent(n, -1);
        bool cancelled = false;
        for (int s0 = 0; s0 < n && !cancelled; ++s0) {
            if (state[s0] != 0) continue;
            std::vector<std::pair<int, size_t>> stack{{s0, 0}};
            state[s0] = 1;
            while (!stack.empty() && !cancelled) {
                auto& [u, it] = stack.back();
                if (it < out[u].size()) {
                    const auto [v, arc] = out[u][it++];
                    if (state[v] == 1) {
                        // Cycle: v .. u plus arc (u->v).
                        double m = g[arc / 2][arc % 2];
                        for (int w = u; w != v; w = parent[w])
                            m = std::min(m, g[arc_from[w] / 2][arc_from[w] % 2]);
                        g[arc / 2][arc % 2] -= m;
                        for (int w = u; w != v; w = parent[w]) g[arc_from[w] / 2][arc_from[w] % 2] -= m;
                        cancelled = true;
                    } else if (state[v] == 0) {
                        state[v] = 1;
                        parent[v] = u;
                        arc_from[v] = arc;
                        stack.push_back({v, 0});
                    }
                } else {
                    state[u] = 2;
                    stack.pop_back();
                }
            }
        }
        if (!cancelled) break;
    }
}

}  // namespace

FlowSolution max_concurrent_flow(const FlowInstance& inst, LpMode mode) {
    inst.validate();
    FlowSolution sol;
    sol.flows.assign(inst.commodities.size(),
                     std::vector<std::array<double, 2>>(inst.edges.size(), {0.0, 0.0}));
    if (inst.commodities.empty()) throw InputError("max_concurrent_flow: no commodities");

    std::vector<int> active;
    for (int i = 0; i < int(inst.commodities.size()); ++i) {
        if (inst.commodities[i].first == inst.commodities[i].second)
            sol.degenerate_pairs.push_back(i);
        else
            active.push_back(i);
    }
    if (active.empty()) {
        sol.rate = 0.0;
        sol.status = "all pairs degenerate";
        return sol;
    }

    // Connectivity pre-check.
    const auto adj = adjacency(inst);
    for (int i : active) {
        const auto [s, t] = inst.commodities[i];
        std::vector<uint8_t> seen(inst.node_names.size(), 0);
        std::deque<int> q{s};
        seen[s] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (auto [v, e] : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push_back(v);
                }
        }
        if (!seen[t]) sol.disconnected_pairs.push_back(i);
    }
    if (!sol.disconnected_pairs.empty()) {
        sol.rate = 0.0;
        sol.status = "disconnected pair";
        return sol;
    }

    // Columns: r, then per active commodity per edge two orientations.
    const int K = int(active.size()), M = int(inst.edges.size());
    const int ncols = 1 + 2 * M * K;
    auto col = [&](int ki, int e, int dir) { return 1 + ki * 2 * M + 2 * e + dir; };

    auto build_and_solve = [&](auto tag) {
        using T = decltype(tag);
        LinearProgram<T> lp(ncols);
        lp.set_objective(0, T(1));
        // Conservation with demand r at the source; sink row omitted
        // (implied by the others).
        for (int ki = 0; ki < K; ++ki) {
            const auto [s, t] = inst.commodities[active[ki]];
            for (int u = 0; u < int(inst.node_names.size()); ++u) {
                if (u == t) continue;
                const bool touched = (u == s) || !adj[u].empty();
                if (!touched) continue;
                const int row = lp.add_row(RowType::Eq, T(0));
                for (int e = 0; e < M; ++e) {
                    if (inst.edges[e].u == u) {
                        lp.add_coeff(row, col(ki, e, 0), T(1));
                        lp.add_coeff(row, col(ki, e, 1), T(-1));
                    }
                    if (inst.edges[e].v == u) {
                        lp.add_coeff(row, col(ki, e, 1), T(1));
                        lp.add_coeff(row, col(ki, e, 0), T(-1));
                    }
                }
                if (u == s) lp.add_coeff(row, 0, T(-1));
            }
        }
        for (int e = 0; e < M; ++e) {
            if (inst.edges[e].infinite) continue;
            T cap;
            if constexpr (std::is_same_v<T, double>)
                cap = double(inst.edges[e].cap);
            else
                cap = inst.edges[e].cap;
            const int row = lp.add_row(RowType::LessEq, cap);
            for (int ki = 0; ki < K; ++ki) {
                lp.add_coeff(row, col(ki, e, 0), T(1));
                lp.add_coeff(row, col(ki, e, 1), T(1));
            }
        }
        return lp.maximize();
    };

    double rate = 0.0;
    std::vector<double> raw(size_t(ncols), 0.0);
    long iters = 0;
    if (mode == LpMode::Exact) {
        const auto res = build_and_solve(Rat(0));
        iters = res.iterations;
        if (res.status == LpStatus::Unbounded) throw InputError("flow LP unbounded (infinite-capacity path?)");
        if (res.status != LpStatus::Optimal)
            throw InputError("flow LP did not reach an optimal basis (exact mode)");
        sol.rate_exact = res.objective;
        rate = double(res.objective);
        for (int j = 0; j < ncols; ++j) raw[j] = double(res.x[j]);
    } else {
        const auto res = build_and_solve(double(0));
        iters = res.iterations;
        if (res.status == LpStatus::Unbounded) throw InputError("flow LP unbounded (infinite-capacity path?)");
        if (res.status != LpStatus::Optimal)
            throw InputError("flow LP did not reach an optimal basis (status " +
                             std::to_string(int(res.status)) + ")");
        rate = res.objective;
        raw = res.x;
    }
    sol.lp_iterations = iters;
    sol.rate = rate;

    // Cleanup and normalization to demand 1.
    for (int ki = 0; ki < K; ++ki) {
        std::vector<std::array<double, 2>> g(M, {0.0, 0.0});
        for (int e = 0; e < M; ++e) {
            g[e][0] = raw[col(ki, e, 0)];
            g[e][1] = raw[col(ki, e, 1)];
        }
        cancel_cycles(inst, g);
        if (rate > 1e-12)
            for (int e = 0; e < M; ++e) {
                sol.flows[active[ki]][e][0] = g[e][0] / rate;
                sol.flows[active[ki]][e][1] = g[e][1] / rate;
            }
    }
    return sol;
}

VerifyFlowResult verify_flow(const FlowInstance& inst, const FlowSolution& sol, double tol) {
    VerifyFlowResult r;
    auto flag = [&](const std::string& w) {
        r.pass = false;
        r.violations.push_back({w});
    };
    if (sol.flows.size() != inst.commodities.size()) {
        flag("flow matrix shape mismatch");
        return r;
    }
    std::vector<uint8_t> skip(inst.commodities.size(), 0);
    for (int i : sol.degenerate_pairs) skip[i] = 1;
    if (!sol.disconnected_pairs.empty()) return r;  // zero solution, nothing to check

    for (size_t i = 0; i < inst.commodities.size(); ++i) {
        if (skip[i]) continue;
        const auto [s, t] = inst.commodities[i];
        std::vector<double> net(inst.node_names.size(), 0.0);
        for (size_t e = 0; e < inst.edges.size(); ++e) {
            const auto& fe = inst.edges[e];
            const double f0 = sol.flows[i][e][0], f1 = sol.flows[i][e][1];
            if (f0 < -tol || f0 > 1 + tol || f1 < -tol || f1 > 1 + tol)
                flag("commodity " + std::to_string(i + 1) + " edge " + fe.id +
                     " flow outside [0,1]");
            if (std::min(f0, f1) > tol)
                flag("commodity " + std::to_string(i + 1) + " edge " + fe.id +
                     " flows in both directions");
            net[fe.u] += f0 - f1;
            net[fe.v] += f1 - f0;
        }
        for (size_t u = 0; u < inst.node_names.size(); ++u) {
            const double want = (int(u) == s) ? 1.0 : (int(u) == t ? -1.0 : 0.0);
            if (std::abs(net[u] - want) > tol)
                flag("commodity " + std::to_string(i + 1) + " conservation fails at node " +
                     inst.node_names[u] + " (net " + fmt_double(net[u]) + ", want " +
                     fmt_double(want) + ")");
        }
    }
    for (size_t e = 0; e < inst.edges.size(); ++e) {
        if (inst.edges[e].infinite) continue;
        double load = 0.0;
        for (size_t i = 0; i < inst.commodities.size(); ++i) {
            if (skip[i]) continue;
            load += sol.flows[i][e][0] + sol.flows[i][e][1];
        }
        if (sol.rate * load > double(inst.edges[e].cap) + tol)
            flag("edge " + inst.edges[e].id + " capacity exceeded: r*load " +
                 fmt_double(sol.rate * load) + " > " + rat_str(inst.edges[e].cap));
    }
    return r;
}

std::vector<double> node_throughflow(const FlowInstance& inst, const FlowSolution& sol, int v) {
    std::vector<double> out(inst.commodities.size(), 0.0);
    for (size_t i = 0; i < inst.commodities.size(); ++i) {
        double leaving = 0.0;
        for (size_t e = 0; e < inst.edges.size(); ++e) {
            if (inst.edges[e].u == v) leaving += sol.flows[i][e][0];
            if (inst.edges[e].v == v) leaving += sol.flows[i][e][1];
        }
        if (inst.commodities[i].second == v) {
            // Net flow for a terminal: what arrives minus what bounces.
            double entering = 0.0;
            for (size_t e = 0; e < inst.edges.size(); ++e) {
                if (inst.edges[e].u == v) entering += sol.flows[i][e][1];
                if (inst.edges[e].v == v) entering += sol.flows[i][e][0];
            }
            out[i] = entering - leaving;
        } else {
            out[i] = leaving;
        }
    }
    return out;
}

double flow_length(const FlowInstance& inst, const FlowSolution& sol, int commodity) {
    double total = 0.0;
    for (size_t e = 0; e < inst.edges.size(); ++e)
        total += sol.flows[commodity][e][0] + sol.flows[commodity][e][1];
    return total;
}

double flow_length_restricted(const FlowInstance& inst, const FlowSolution& sol, int commodity,
                              const std::vector<int>& edge_subset) {
    (void)inst;
    double total = 0.0;
    for (int e : edge_subset) total += sol.flows[commodity][e][0] + sol.flows[commodity][e][1];
    return total;
}

int flow_distance(const FlowInstance& inst, int from, int to) {
    const auto adj = adjacency(inst);
    std::vector<int> dist(inst.node_names.size(), -1);
    std::deque<int> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        if (u == to) return dist[u];
        for (auto [v, e] : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist[to];
}

void write_flow_csv(std::ostream& out, const FlowInstance& inst, const FlowSolution& sol) {
    out << "# rate " << fmt_double(sol.rate) << "\n";
    out << "commodity,edge,orientation,value\n";
    for (size_t i = 0; i < inst.commodities.size(); ++i)
        for (size_t e = 0; e < inst.edges.size(); ++e)
            for (int d = 0; d < 2; ++d) {
                const double v = sol.flows[i][e][d];
                if (v <= 1e-12) continue;
                const auto& fe = inst.edges[e];
                out << i + 1 << "," << fe.id << ","
                    << (d == 0 ? inst.node_names[fe.u] + ">" + inst.node_names[fe.v]
                               : inst.node_names[fe.v] + ">" + inst.node_names[fe.u])
                    << "," << fmt_double(v) << "\n";
            }
}

}  // namespace netshift
