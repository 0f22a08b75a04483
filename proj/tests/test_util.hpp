#pragma once

// Shared test helpers: independent oracles (kept deliberately naive and
// separate from the library code paths they check) and small generators.

#include <algorithm>
#include <random>
#include <vector>

#include "netshift/circuit.hpp"

namespace testutil {

// Floyd-Warshall all-pairs distances on the simple undirected graph of a
// circuit; independent oracle for BFS-based distance code. -1 = infinity.
inline std::vector<std::vector<int>> fw_distances(const netshift::Circuit& c) {
    const int t = c.size();
    const int INF = 1 << 28;
    std::vector<std::vector<int>> d(t, std::vector<int>(t, INF));
    for (int i = 0; i < t; ++i) d[i][i] = 0;
    for (const auto& [a, b] : c.edges) {
        d[a][b] = std::min(d[a][b], 1);
        d[b][a] = std::min(d[b][a], 1);
    }
    for (int k = 0; k < t; ++k)
        for (int i = 0; i < t; ++i)
            for (int j = 0; j < t; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    for (auto& row : d)
        for (auto& v : row)
            if (v >= INF) v = -1;
    return d;
}

// Random layered DAG circuit with arbitrary gate tables, arity <= max_arity.
// Outputs are ports reading the last gates (or inputs when gates == 0).
inline netshift::Circuit random_circuit(std::mt19937_64& rng, int n_in, int gates, int n_out,
                                        int max_arity = 3) {
    using namespace netshift;
    Circuit c;
    for (int i = 0; i < n_in; ++i) {
        Node nd;
        nd.kind = NodeKind::Input;
        nd.name = "x" + std::to_string(i + 1);
        nd.io_index = i;
        c.nodes.push_back(nd);
    }
    for (int g = 0; g < gates; ++g) {
        const int pos = int(c.nodes.size());
        std::uniform_int_distribution<int> arity_d(1, std::min(max_arity, pos));
        const int arity = arity_d(rng);
        Node nd;
        nd.kind = NodeKind::Gate;
        nd.name = "g" + std::to_string(g + 1);
        nd.fn = GateFn::make(arity);
        for (uint64_t i = 0; i < nd.fn.rows(); ++i) nd.fn.set_bit(i, rng() & 1);
        // Distinct random sources among earlier nodes.
        std::vector<int> pool(pos);
        for (int i = 0; i < pos; ++i) pool[i] = i;
        std::shuffle(pool.begin(), pool.end(), rng);
        c.nodes.push_back(nd);
        for (int k = 0; k < arity; ++k) c.edges.emplace_back(pool[k], pos);
    }
    const int pool_size = n_in + gates;
    for (int o = 0; o < n_out; ++o) {
        const int pos = int(c.nodes.size());
        Node nd;
        nd.kind = NodeKind::Output;
        nd.name = "y" + std::to_string(o + 1);
        nd.io_index = o;
        nd.fn = GateFn::identity();
        c.nodes.push_back(nd);
        std::uniform_int_distribution<int> src_d(0, pool_size - 1);
        c.edges.emplace_back(src_d(rng), pos);
    }
    c.n_in = n_in;
    c.n_out = n_out;
    validate(c);
    return c;
}

inline std::vector<uint8_t> index_bits(uint64_t v, int n) {
    std::vector<uint8_t> x(n);
    for (int i = 0; i < n; ++i) x[i] = (v >> i) & 1;
    return x;
}

}  // namespace testutil
