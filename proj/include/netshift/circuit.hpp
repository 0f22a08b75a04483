#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netshift/common.hpp"

namespace netshift {

// Maximum gate fan-in. Gate functions are explicit truth tables, so arity w
// costs 2^w table bits; 24 keeps the largest table at 2 MiB.
inline constexpr int kMaxArity = 24;

// A boolean function of `arity` inputs given as a truth table. Table bit i
// is the output for the input tuple whose j-th value (in incoming-edge
// order) is bit j of i; the first in-edge is the least significant bit.
struct GateFn {
    int arity = 0;
    std::vector<uint64_t> table;  // 2^arity bits, 64 per word

    static GateFn make(int arity);
    static GateFn constant(bool b);
    static GateFn identity();  // unary pass-through

    bool bit(uint64_t idx) const { return (table[idx >> 6] >> (idx & 63)) & 1u; }
    void set_bit(uint64_t idx, bool v) {
        if (v)
            table[idx >> 6] |= (uint64_t{1} << (idx & 63));
        else
            table[idx >> 6] &= ~(uint64_t{1} << (idx & 63));
    }
    uint64_t rows() const { return uint64_t{1} << arity; }

    // Table with coordinate `coord` (0-based, LSB order) fixed to `value`.
    GateFn restrict_coord(int coord, bool value) const;
    // Table re-indexed so that new coordinate p reads old coordinate
    // perm[p]. perm must be a permutation of [0, arity).
    GateFn permute_coords(const std::vector<int>& perm) const;
};

enum class NodeKind { Input, Output, Gate, Const };

struct Node {
    NodeKind kind;
    std::string name;
    int io_index = -1;   // Input/Output: 0-based position among inputs/outputs
    GateFn fn;           // Gate and Output; Const uses fn.arity==0 table
    bool const_value = false;
};

// Boolean circuit with arbitrary gates. Nodes are stored in topological
// order: inputs occupy the first n_in positions and outputs the last n_out.
// Output nodes carry truth tables like any gate; an output that merely
// forwards its single in-edge has the unary identity table.
struct Circuit {
    std::vector<Node> nodes;
    std::vector<std::pair<int, int>> edges;  // (src, dst) node positions
    int n_in = 0;
    int n_out = 0;

    int size() const { return int(nodes.size()); }
    int input_node(int i) const { return i; }
    int output_node(int i) const { return size() - n_out + i; }

    // In-edges of each node ordered by (source position, edge id); this is
    // the order gate tables are indexed by.
    std::vector<std::vector<int>> in_edge_lists() const;
    std::vector<std::vector<int>> out_edge_lists() const;
    std::vector<int> in_degrees() const;

    int find_node(const std::string& name) const;  // -1 if absent
};

// Throws InputError when any structural invariant fails: edge direction
// against the node order, input/output placement, arity/in-degree mismatch,
// table sizing, io_index numbering.
void validate(const Circuit& c);

// Evaluates the circuit on an n_in-bit input, returning the n_out output
// bits. Nodes are processed in topological order; each gate applies its
// table to the incoming values in in-edge order.
std::vector<uint8_t> evaluate(const Circuit& c, std::span<const uint8_t> x);

// evaluate() while forcing the listed nodes to fixed values (their gate
// functions are ignored). Reference semantics for hardwire().
std::vector<uint8_t> evaluate_forced(const Circuit& c, std::span<const uint8_t> x,
                                     const std::vector<std::pair<int, uint8_t>>& forced);

// Computes the values of an arbitrary node subset on input x (full circuit
// evaluation, then projection).
std::vector<uint8_t> evaluate_nodes(const Circuit& c, std::span<const uint8_t> x,
                                    std::span<const int> subset);

// Removes each assigned node and partially evaluates every downstream gate
// table on the fixed coordinate. Assigning an Output node is an error.
// Remaining inputs are renumbered in order.
Circuit hardwire(const Circuit& c, const std::vector<std::pair<int, uint8_t>>& assignments);

// BFS distances in the simple undirected graph induced by the circuit
// (edge directions dropped, parallel edges collapsed), optionally within
// the subgraph induced by `restrict`. -1 means unreachable.
std::vector<int> undirected_distances(const Circuit& c, int from,
                                      const std::optional<std::vector<int>>& restrict_set = std::nullopt);

// Number of nodes at undirected distance <= radius from `from`.
long ball_size(const Circuit& c, int from, int radius,
               const std::optional<std::vector<int>>& restrict_set = std::nullopt);

struct DegreeProfile {
    int max_in = 0;
    int max_out = 0;
    int max_undirected = 0;
    Rat avg_undirected = 0;
    std::vector<int> in_deg, out_deg, undirected_deg;  // per node (0 outside restrict)
};

DegreeProfile degree_profile(const Circuit& c,
                             const std::optional<std::vector<int>>& restrict_set = std::nullopt);

// Layer decomposition of a depth-3 circuit: inputs X, middle gates F,
// output gates Y, with every edge X->F, F->Y or X->Y.
struct Depth3Shape {
    std::vector<int> x_nodes;              // all inputs (data bits first)
    std::vector<int> f_nodes;              // middle layer
    std::vector<int> y_nodes;              // outputs
    std::vector<int> xy_edges;             // edge ids with both ends in X u Y
    int n_data = 0;                        // data input count (x_1..x_n)
    int n_shift = 0;                       // trailing shift-block inputs
    int c = 0;                             // max degree in the X u Y induced graph
    double epsilon = 0.0;                  // |F| / n_data
};

// Classifies layers and validates depth-3 shape. data_bits: how many leading
// inputs are data (rest form the shift block); by convention deduced from
// the output count when not given (n_out == n_in: all data; n_out == 2n:
// n = n_out/2).
Depth3Shape analyze_depth3(const Circuit& c, std::optional<int> data_bits = std::nullopt);

// Reroutes the X-Y edges of every X u Y node whose degree in the induced
// graph exceeds `threshold` through one fresh middle-layer node, adjusting
// tables so the computed function is unchanged. For an over-threshold
// output gate whose X-dependence does not factor through one bit (given its
// middle in-edges), throws InputError: a single relay node cannot carry it.
Circuit split_high_degree(const Circuit& c, int threshold);

}  // namespace netshift
