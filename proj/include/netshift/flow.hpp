#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "netshift/common.hpp"
#include "netshift/netcode.hpp"

namespace netshift {

struct FlowEdge {
    std::string id;
    int u = -1, v = -1;
    Rat cap = 0;
    bool infinite = false;
};

// Undirected multicommodity flow instance; parallel edges allowed, one unit
// of demand per commodity.
struct FlowInstance {
    std::vector<std::string> node_names;
    std::vector<FlowEdge> edges;
    std::vector<std::pair<int, int>> commodities;  // (s_i, t_i)

    int find_node(const std::string& name) const;
    void validate() const;
};

// Drops edge directions, keeping capacities, parallel edges and the
// source-sink pairs. Injector nodes and their edges are an artifact of
// message delivery and are dropped by default; retain_injectors keeps them
// (their edges stay infinite).
FlowInstance undirect(const CommInstance& inst, bool retain_injectors = false);

enum class LpMode { Float, Exact };

// Normalized per-commodity flows: flows[i][e][0] is commodity i's flow
// along edge e in stored orientation (u->v), [1] the reverse, both scaled
// to demand 1. rate is the concurrent rate r (capacity holds for r times
// the normalized load).
struct FlowSolution {
    double rate = 0.0;
    std::optional<Rat> rate_exact;
    std::vector<std::vector<std::array<double, 2>>> flows;
    std::vector<int> degenerate_pairs;     // s_i == t_i, excluded from the LP
    std::vector<int> disconnected_pairs;   // no path, rate forced to 0
    long lp_iterations = 0;
    std::string status = "ok";
};

// Maximum concurrent flow by LP: variables are per-commodity flows on both
// orientations of every edge carrying demand r, maximize r under
// conservation and joint capacity. The returned flows are cleaned by
// per-commodity cycle cancellation (restores one-directionality and the
// [0,1] range without changing r) and normalized to demand 1.
FlowSolution max_concurrent_flow(const FlowInstance& inst, LpMode mode = LpMode::Float);

struct FlowViolation {
    std::string what;
};

struct VerifyFlowResult {
    bool pass = true;
    std::vector<FlowViolation> violations;
};

// Checks conservation, unit source/sink balance, one-directionality,
// per-orientation range [0,1] and r-scaled capacities, all at tolerance.
VerifyFlowResult verify_flow(const FlowInstance& inst, const FlowSolution& sol,
                             double tol = 1e-6);

// Per-commodity flow through node v (outgoing side; equals incoming by
// conservation for non-terminals; for a terminal of the commodity this is
// its net flow, i.e. 1).
std::vector<double> node_throughflow(const FlowInstance& inst, const FlowSolution& sol, int v);

// Total edge usage of commodity i: sum over edges of both orientations.
double flow_length(const FlowInstance& inst, const FlowSolution& sol, int commodity);

// Same, restricted to an edge subset (by edge id list).
double flow_length_restricted(const FlowInstance& inst, const FlowSolution& sol, int commodity,
                              const std::vector<int>& edge_subset);

// BFS hop distance between two nodes, -1 when disconnected.
int flow_distance(const FlowInstance& inst, int from, int to);

void write_flow_csv(std::ostream& out, const FlowInstance& inst, const FlowSolution& sol);

}  // namespace netshift
