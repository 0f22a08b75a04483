#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netshift/bitstr.hpp"
#include "netshift/common.hpp"

namespace netshift {

struct NetEdge {
    std::string id;
    int src = -1, dst = -1;
    Rat cap = 0;
    bool infinite = false;
    bool injector = false;  // the auto-added message-delivery edge of a pair
};

struct NetPair {
    int src = -1, dst = -1;  // s_i, t_i
    int bits = 1;            // message width b_i, A(i) = {0,1}^b_i
    int injector_node = -1;
    int injector_edge = -1;
};

// Directed acyclic k-pairs communication instance. Each pair gets an extra
// injector node S_i with an infinite-capacity edge (S_i, s_i) carrying the
// message into the network.
struct CommInstance {
    std::vector<std::string> node_names;
    std::vector<NetEdge> edges;
    std::vector<NetPair> pairs;

    int add_node(const std::string& name);
    int add_edge(const std::string& id, int src, int dst, Rat cap, bool infinite = false);
    // Adds the pair and its injector; returns the pair index.
    int add_pair(int s, int t, int bits);
    int find_node(const std::string& name) const;

    // Node order for execution; throws if the graph has a cycle.
    std::vector<int> topo_order() const;
    // In-edges per node sorted by (source node id, edge id): the order edge
    // functions and decoders see their arguments in. Nodes are declared in
    // topological order, so this is the induced incoming order.
    std::vector<std::vector<int>> in_edge_lists() const;

    int total_message_bits() const;
    void validate() const;
};

// A network coding solution: one function per edge mapping the tail node's
// incoming messages (in in-edge order) to the edge message, and one decoder
// per pair mapping the sink's incoming messages to the recovered word.
// Injector edges need no function. Message widths are free-form; fixed
// width per edge is the common case, prefix-free variable-length codes are
// allowed (rate checks handle both).
struct CodingSolution {
    std::string name;
    std::vector<std::function<BitStr(const std::vector<BitStr>&)>> edge_fn;  // by edge id
    std::vector<std::function<BitStr(const std::vector<BitStr>&)>> decoder;  // by pair

    static CodingSolution sized(const CommInstance& inst);
};

struct Execution {
    std::vector<BitStr> edge_msg;  // by edge
    std::vector<BitStr> decoded;   // by pair
};

// One topological pass: injector edges carry the given messages, every
// other edge applies its function once all tail in-messages are present.
Execution execute(const CommInstance& inst, const CodingSolution& sol,
                  const std::vector<BitStr>& messages);

struct VerifyResult {
    bool pass = false;
    uint64_t checked = 0;
    std::optional<uint64_t> counterexample;  // enumeration index
    std::string detail;
};

// Exhaustive correctness check over all message tuples. Refuses (throws
// InputError) when the total message bits exceed budget_bits.
VerifyResult verify_correctness(const CommInstance& inst, const CodingSolution& sol,
                                int budget_bits = 20);

struct EdgeRateRow {
    std::string edge_id;
    Rat cap;
    bool infinite = false;
    bool injector = false;
    double entropy = 0.0;   // binary Shannon entropy of the edge message
    uint64_t support = 0;   // distinct messages observed
    Rat mean_len = 0;       // expected message length in bits
    bool prefix_free = false;
    std::string method;     // how the capacity check was decided
    bool pass = true;
    std::string violation;
};

struct RateReport {
    std::vector<EdgeRateRow> rows;
    std::vector<double> source_entropy;  // H(A_i) = b_i for uniform sources
    double rate = 0.0;                   // min_i H(A_i) when all checks pass
    bool ok = false;
    std::vector<std::string> violations;
};

// Exact rate measurement: enumerates all input tuples (uniform independent
// sources), accumulates the exact per-edge message distribution and checks
// H(A_e) <= c(e) for every finite-capacity edge. Integer capacities are
// decided by support counting (|support| <= 2^c implies the bound); edges
// with prefix-free variable-length messages by the source-coding argument
// (E|len| <= cap with Kraft sum <= 1); remaining cases by float comparison
// at 1e-9. Refuses beyond budget_bits.
RateReport measure_rate(const CommInstance& inst, const CodingSolution& sol,
                        int budget_bits = 20);

// Forwarding solution: every edge copies the single in-message of its tail,
// every decoder copies the single in-message of the sink. Only valid for
// instances where each non-source node has exactly one in-edge on the
// relevant paths; widths follow the pair widths.
CodingSolution forwarding_solution(const CommInstance& inst);

}  // namespace netshift
