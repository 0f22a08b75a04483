#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netshift/circuit.hpp"
#include "netshift/correction.hpp"
#include "netshift/flow.hpp"
#include "netshift/funcgen.hpp"
#include "netshift/netcode.hpp"

namespace netshift {

// One evaluated inequality of a certificate chain. Values carry both an
// exact rendering (integer or p/q where available) and a numeric view;
// binding=false marks steps whose hypothesis needs scales this instance
// does not reach (they are evaluated and reported, never silently passed).
struct CertStep {
    std::string id;
    std::string detail;
    std::string lhs, rhs;
    double lhs_val = 0.0, rhs_val = 0.0;
    std::string rel;  // ">=", "<=", "="
    bool pass = false;
    bool binding = true;
    std::string note;
};

struct Certificate {
    std::string mode;  // "A" or "B"
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<CertStep> steps;
    bool verdict = false;  // conjunction of binding-step passes

    void finalize();
    const CertStep* find(const std::string& id) const;
};

void write_certificate_text(std::ostream& out, const Certificate& cert);
void write_certificate_csv(std::ostream& out, const Certificate& cert);

// ---- bounded-degree route (whole-circuit distances) ----

struct ChooseShiftResult {
    int l0 = 1;
    long far_count = 0;
    std::vector<long> per_shift_far;  // count for every shift value
    int degree_c = 1;                 // max(in, out) degree, floored at 1
    std::vector<std::vector<int>> source_dist;  // per data bit j: distances from x_j
};

// For every shift l, counts data positions j whose (x_j, y_{j+l-1}) pair is
// at undirected distance >= 0.5 log_{2c} n in the whole circuit graph;
// returns the argmax shift (ties: smallest). cyclic pairs use the wrapped
// target index.
ChooseShiftResult choose_shift_A(const Circuit& c, int data_bits, bool cyclic = false);

struct BuildAResult {
    CommInstance instance;
    CodingSolution solution;
    std::vector<int> pair_source_node;  // circuit node of x_j
    std::vector<int> pair_sink_node;    // circuit node of the paired output
};

// The circuit as a network: 1-capacity edges, n pairs (x_j, y_{j+l0-1}),
// 1-bit messages; the witnessing solution evaluates the circuit with the
// shift block hardwired to l0 and sends each gate value along its wires.
BuildAResult build_instance_A(const Circuit& c, int data_bits, int l0,
                              ShiftEncoding enc = ShiftEncoding::Binary, bool cyclic = false);

struct CertifyOptions {
    bool strict = false;       // vacuous steps become failures
    bool cyclic = false;
    LpMode lp_mode = LpMode::Float;
    int budget_bits = 20;
    int split_threshold = 0;   // B route: apply split_high_degree first when > 0
    std::optional<int> data_bits;
    std::optional<double> eps_claim;  // B route: hypothesis bound on eps
};

Certificate certify_A(const Circuit& c, const CertifyOptions& opts = {});

// ---- depth-3 route (induced X u Y distances, supervisor network) ----

struct ChooseAlphaResult {
    int alpha0 = 1;
    long far_blocks = 0;
    std::vector<long> per_alpha_far;       // far-block count per alpha in [1,n]
    std::vector<double> block_far_prob;    // per block: fraction of alpha making it far
    double prob_bound = 0.0;               // 1 - k^2/sqrt(n)
    bool bound_vacuous = false;            // k^2/sqrt(n) >= 1
    std::vector<uint8_t> far_at_alpha0;    // per block flag at the chosen alpha
};

// Per-alpha far blocks: block l is far iff every in-block pair (x_u,
// y_{v+alpha-1}) is at distance >= 0.5 log_{2c} n in the X u Y induced
// graph (missing targets count as infinitely far). k must divide the data
// width.
ChooseAlphaResult choose_alpha_B(const Circuit& c, const Depth3Shape& shape, int k,
                                 bool cyclic = false);

struct ExtractResult {
    std::vector<uint8_t> fhat;      // middle-layer value defining the fiber
    std::vector<uint64_t> family;   // inputs attaining it (n-bit words)
    Circuit hardwired;              // shift block (if any) fixed to alpha0
    Circuit gamma;                  // middle layer also hardwired: 2 layers
};

// Buckets all 2^n inputs by the middle-layer value after fixing the shift
// block to alpha0; returns the largest bucket (ties: smallest value) and
// the hardwired circuits. Pigeonhole gives |family| >= 2^n / 2^|F|.
ExtractResult extract_family(const Circuit& c, const Depth3Shape& shape, int alpha0,
                             ShiftEncoding enc, int budget_bits = 24);

struct BuildBResult {
    CommInstance instance;
    CodingSolution solution;
    std::vector<Rat> player_cost;  // c_l = E|R_l|
    Rat cost_total = 0;
    int supervisor = -1;           // node id of u in the instance
    std::vector<int> gamma_edges;  // instance edge ids inside X u Y
    std::vector<int> s_nodes, a_nodes, t_nodes;
};

// Wraps the 2-layer circuit with per-block source/relay/target nodes and a
// supervisor hub: s_l -> a_l and s_l -> u at capacity k, u -> a_l and
// u -> t_l at capacity E|R_l|, unit edges a_l -> x_j and y_(j+alpha0-1) ->
// t_l for j in block l, unit capacity on the circuit wires. The bound
// solution runs the correction protocol over the hub and the circuit as a
// black box.
BuildBResult build_network_B(const Circuit& gamma, const Depth3Shape& gamma_shape, int alpha0,
                             const std::vector<uint64_t>& family, int k, bool cyclic = false);

Certificate certify_B(const Circuit& c, int k, const CertifyOptions& opts = {});

}  // namespace netshift
