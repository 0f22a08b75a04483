#include "netshift/circuit.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace netshift {

GateFn GateFn::make(int arity) {
    if (arity < 0 || arity > kMaxArity)
        throw InputError("gate arity " + std::to_string(arity) + " outside 0.." +
                         std::to_string(kMaxArity));
    GateFn f;
    f.arity = arity;
    f.table.assign(((uint64_t{1} << arity) + 63) / 64, 0);
    return f;
}

GateFn GateFn::constant(bool b) {
    GateFn f = make(0);
    f.set_bit(0, b);
    return f;
}

GateFn GateFn::identity() {
    GateFn f = make(1);
    f.set_bit(1, true);
    return f;
}

GateFn GateFn::restrict_coord(int coord, bool value) const {
    if (coord < 0 || coord >= arity) throw InputError("restrict_coord: bad coordinate");
    GateFn out = make(arity - 1);
    const uint64_t lo_mask = (uint64_t{1} << coord) - 1;
    for (uint64_t i = 0; i < out.rows(); ++i) {
        const uint64_t full = (i & lo_mask) | (uint64_t(value) << coord) | ((i & ~lo_mask) << 1);
        out.set_bit(i, bit(full));
    }
    return out;
}

GateFn GateFn::permute_coords(const std::vector<int>& perm) const {
    if (int(perm.size()) != arity) throw InputError("permute_coords: size mismatch");
    GateFn out = make(arity);
    for (uint64_t i = 0; i < rows(); ++i) {
        uint64_t old_idx = 0;
        for (int p = 0; p < arity; ++p)
            if ((i >> p) & 1u) old_idx |= uint64_t{1} << perm[p];
        out.set_bit(i, bit(old_idx));
    }
    return out;
}

std::vector<std::vector<int>> Circuit::in_edge_lists() const {
    std::vector<std::vector<int>> in(nodes.size());
    for (int e = 0; e < int(edges.size()); ++e) in[edges[e].second].push_back(e);
    for (auto& lst : in)
        std::sort(lst.begin(), lst.end(), [&](int a, int b) {
            if (edges[a].first != edges[b].first) return edges[a].first < edges[b].first;
            return a < b;
        });
    return in;
}

std::vector<std::vector<int>> Circuit::out_edge_lists() const {
    std::vector<std::vector<int>> out(nodes.size());
    for (int e = 0; e < int(edges.size()); ++e) out[edges[e].first].push_back(e);
    return out;
}

std::vector<int> Circuit::in_degrees() const {
    std::vector<int> d(nodes.size(), 0);
    for (const auto& [s, t] : edges) {
        (void)s;
        ++d[t];
    }
    return d;
}

int Circuit::find_node(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (nodes[i].name == name) return i;
    return -1;
}

void validate(const Circuit& c) {
    const int t = c.size();
    if (c.n_in < 0 || c.n_out < 0 || c.n_in + c.n_out > t)
        throw InputError("circuit: input/output counts exceed node count");
    for (const auto& [s, d] : c.edges) {
        if (s < 0 || s >= t || d < 0 || d >= t) throw InputError("circuit: edge endpoint out of range");
        if (s >= d) throw InputError("circuit: edge against topological order");
    }
    auto indeg = c.in_degrees();
    std::vector<int> outdeg(t, 0);
    for (const auto& [s, d] : c.edges) {
        (void)d;
        ++outdeg[s];
    }
    for (int i = 0; i < t; ++i) {
        const Node& nd = c.nodes[i];
        const bool in_prefix = i < c.n_in;
        const bool in_suffix = i >= t - c.n_out;
        switch (nd.kind) {
            case NodeKind::Input:
                if (!in_prefix) throw InputError("circuit: input node " + nd.name + " not in input prefix");
                if (nd.io_index != i) throw InputError("circuit: input index mismatch at " + nd.name);
                if (indeg[i] != 0) throw InputError("circuit: input node " + nd.name + " has in-edges");
                break;
            case NodeKind::Output:
                if (!in_suffix) throw InputError("circuit: output node " + nd.name + " not in output suffix");
                if (nd.io_index != i - (t - c.n_out))
                    throw InputError("circuit: output index mismatch at " + nd.name);
                if (outdeg[i] != 0) throw InputError("circuit: output node " + nd.name + " has out-edges");
                if (nd.fn.arity != indeg[i])
                    throw InputError("circuit: output arity/in-degree mismatch at " + nd.name);
                break;
            case NodeKind::Gate:
                if (in_prefix || in_suffix) throw InputError("circuit: gate " + nd.name + " inside io prefix/suffix");
                if (nd.fn.arity != indeg[i])
                    throw InputError("circuit: gate arity/in-degree mismatch at " + nd.name);
                break;
            case NodeKind::Const:
                if (in_prefix || in_suffix) throw InputError("circuit: const " + nd.name + " inside io prefix/suffix");
                if (indeg[i] != 0) throw InputError("circuit: const node " + nd.name + " has in-edges");
                break;
        }
        if (nd.kind == NodeKind::Gate || nd.kind == NodeKind::Output) {
            const uint64_t words = ((uint64_t{1} << nd.fn.arity) + 63) / 64;
            if (nd.fn.table.size() != words) throw InputError("circuit: table length mismatch at " + nd.name);
        }
    }
}

namespace {

void eval_all(const Circuit& c, std::span<const uint8_t> x, std::vector<uint8_t>& val,
              const std::vector<std::pair<int, uint8_t>>* forced) {
    if (int(x.size()) != c.n_in) throw InputError("evaluate: input length mismatch");
    const auto in_edges = c.in_edge_lists();
    val.assign(c.nodes.size(), 0);
    std::vector<int8_t> force(c.nodes.size(), -1);
    if (forced)
        for (auto [node, b] : *forced) force[node] = int8_t(b ? 1 : 0);
    for (int i = 0; i < c.size(); ++i) {
        if (force[i] >= 0) {
            val[i] = uint8_t(force[i]);
            continue;
        }
        const Node& nd = c.nodes[i];
        switch (nd.kind) {
            case NodeKind::Input:
                val[i] = x[nd.io_index] ? 1 : 0;
                break;
            case NodeKind::Const:
                val[i] = nd.const_value ? 1 : 0;
                break;
            case NodeKind::Gate:
            case NodeKind::Output: {
                uint64_t idx = 0;
                const auto& in = in_edges[i];
                for (size_t k = 0; k < in.size(); ++k)
                    if (val[c.edges[in[k]].first]) idx |= uint64_t{1} << k;
                val[i] = nd.fn.bit(idx) ? 1 : 0;
                break;
            }
        }
    }
}

}  // namespace

std::vector<uint8_t> evaluate(const Circuit& c, std::span<const uint8_t> x) {
    std::vector<uint8_t> val;
    eval_all(c, x, val, nullptr);
    std::vector<uint8_t> y(c.n_out);
    for (int i = 0; i < c.n_out; ++i) y[i] = val[c.output_node(i)];
    return y;
}

std::vector<uint8_t> evaluate_forced(const Circuit& c, std::span<const uint8_t> x,
                                     const std::vector<std::pair<int, uint8_t>>& forced) {
    std::vector<uint8_t> val;
    eval_all(c, x, val, &forced);
    std::vector<uint8_t> y(c.n_out);
    for (int i = 0; i < c.n_out; ++i) y[i] = val[c.output_node(i)];
    return y;
}

std::vector<uint8_t> evaluate_nodes(const Circuit& c, std::span<const uint8_t> x,
                                    std::span<const int> subset) {
    std::vector<uint8_t> val;
    eval_all(c, x, val, nullptr);
    std::vector<uint8_t> out(subset.size());
    for (size_t i = 0; i < subset.size(); ++i) out[i] = val[subset[i]];
    return out;
}

Circuit hardwire(const Circuit& c, const std::vector<std::pair<int, uint8_t>>& assignments) {
    std::vector<int8_t> assigned(c.size(), -1);
    for (auto [node, b] : assignments) {
        if (node < 0 || node >= c.size()) throw InputError("hardwire: unknown node");
        if (c.nodes[node].kind == NodeKind::Output)
            throw InputError("hardwire: cannot assign to output node " + c.nodes[node].name);
        if (assigned[node] >= 0) throw InputError("hardwire: node assigned twice");
        assigned[node] = int8_t(b ? 1 : 0);
    }

    const auto in_edges = c.in_edge_lists();
    Circuit out;
    std::vector<int> remap(c.size(), -1);
    int new_inputs = 0;
    for (int i = 0; i < c.size(); ++i) {
        if (assigned[i] >= 0) continue;
        Node nd = c.nodes[i];
        if (nd.kind == NodeKind::Gate || nd.kind == NodeKind::Output) {
            // Restrict the table on every in-edge coming from an assigned
            // node, walking coordinates in order and tracking the shift
            // caused by previously removed ones.
            int removed = 0;
            const auto& in = in_edges[i];
            for (size_t k = 0; k < in.size(); ++k) {
                const int src = c.edges[in[k]].first;
                if (assigned[src] >= 0) {
                    nd.fn = nd.fn.restrict_coord(int(k) - removed, assigned[src] != 0);
                    ++removed;
                }
            }
        }
        if (nd.kind == NodeKind::Input) nd.io_index = new_inputs++;
        remap[i] = out.size();
        out.nodes.push_back(std::move(nd));
    }
    for (const auto& [s, d] : c.edges)
        if (remap[s] >= 0 && remap[d] >= 0) out.edges.emplace_back(remap[s], remap[d]);
    out.n_in = new_inputs;
    out.n_out = c.n_out;
    validate(out);
    return out;
}

namespace {

// Simple undirected adjacency (parallel edges collapsed, directions dropped).
std::vector<std::vector<int>> undirected_adj(const Circuit& c) {
    std::vector<std::set<int>> nb(c.size());
    for (const auto& [s, d] : c.edges) {
        nb[s].insert(d);
        nb[d].insert(s);
    }
    std::vector<std::vector<int>> adj(c.size());
    for (int i = 0; i < c.size(); ++i) adj[i].assign(nb[i].begin(), nb[i].end());
    return adj;
}

}  // namespace

std::vector<int> undirected_distances(const Circuit& c, int from,
                                      const std::optional<std::vector<int>>& restrict_set) {
    if (from < 0 || from >= c.size()) throw InputError("undirected_distances: unknown node");
    std::vector<uint8_t> allowed(c.size(), restrict_set ? 0 : 1);
    if (restrict_set) {
        for (int v : *restrict_set) {
            if (v < 0 || v >= c.size()) throw InputError("undirected_distances: unknown node in restrict");
            allowed[v] = 1;
        }
        if (!allowed[from]) throw InputError("undirected_distances: source outside restrict set");
    }
    const auto adj = undirected_adj(c);
    std::vector<int> dist(c.size(), -1);
    std::deque<int> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (int v : adj[u])
            if (allowed[v] && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    if (restrict_set)
        for (int i = 0; i < c.size(); ++i)
            if (!allowed[i]) dist[i] = -1;
    return dist;
}

long ball_size(const Circuit& c, int from, int radius,
               const std::optional<std::vector<int>>& restrict_set) {
    if (radius < 0) throw InputError("ball_size: negative radius");
    const auto dist = undirected_distances(c, from, restrict_set);
    long count = 0;
    for (int d : dist)
        if (d >= 0 && d <= radius) ++count;
    return count;
}

DegreeProfile degree_profile(const Circuit& c,
                             const std::optional<std::vector<int>>& restrict_set) {
    std::vector<uint8_t> allowed(c.size(), restrict_set ? 0 : 1);
    if (restrict_set)
        for (int v : *restrict_set) allowed[v] = 1;

    DegreeProfile p;
    p.in_deg.assign(c.size(), 0);
    p.out_deg.assign(c.size(), 0);
    p.undirected_deg.assign(c.size(), 0);
    std::vector<std::set<int>> nb(c.size());
    for (const auto& [s, d] : c.edges) {
        if (!allowed[s] || !allowed[d]) continue;
        ++p.out_deg[s];
        ++p.in_deg[d];
        nb[s].insert(d);
        nb[d].insert(s);
    }
    long total = 0, nnodes = 0;
    for (int i = 0; i < c.size(); ++i) {
        if (!allowed[i]) continue;
        ++nnodes;
        p.undirected_deg[i] = int(nb[i].size());
        total += p.undirected_deg[i];
        p.max_in = std::max(p.max_in, p.in_deg[i]);
        p.max_out = std::max(p.max_out, p.out_deg[i]);
        p.max_undirected = std::max(p.max_undirected, p.undirected_deg[i]);
    }
    p.avg_undirected = nnodes ? Rat(total) / nnodes : Rat(0);
    return p;
}

Depth3Shape analyze_depth3(const Circuit& c, std::optional<int> data_bits) {
    Depth3Shape s;
    for (int i = 0; i < c.size(); ++i) {
        switch (c.nodes[i].kind) {
            case NodeKind::Input: s.x_nodes.push_back(i); break;
            case NodeKind::Output: s.y_nodes.push_back(i); break;
            case NodeKind::Gate: s.f_nodes.push_back(i); break;
            case NodeKind::Const:
                throw InputError("analyze_depth3: const nodes not part of the depth-3 shape");
        }
    }
    std::vector<int> layer(c.size(), 0);  // 0=X 1=F 2=Y
    for (int i : s.f_nodes) layer[i] = 1;
    for (int i : s.y_nodes) layer[i] = 2;
    for (int e = 0; e < int(c.edges.size()); ++e) {
        const auto [a, b] = c.edges[e];
        const bool ok = (layer[a] == 0 && layer[b] == 1) || (layer[a] == 1 && layer[b] == 2) ||
                        (layer[a] == 0 && layer[b] == 2);
        if (!ok)
            throw InputError("analyze_depth3: edge " + c.nodes[a].name + "->" + c.nodes[b].name +
                             " violates the 3-layer shape");
        if (layer[a] == 0 && layer[b] == 2) s.xy_edges.push_back(e);
    }
    if (data_bits) {
        s.n_data = *data_bits;
    } else if (c.n_out == c.n_in) {
        s.n_data = c.n_in;  // identity-style, no shift block
    } else {
        s.n_data = c.n_out / 2;
        if (c.n_out != 2 * s.n_data) throw InputError("analyze_depth3: cannot deduce data width");
    }
    if (s.n_data <= 0 || s.n_data > c.n_in) throw InputError("analyze_depth3: bad data width");
    s.n_shift = c.n_in - s.n_data;

    std::vector<int> xy;
    xy.insert(xy.end(), s.x_nodes.begin(), s.x_nodes.end());
    xy.insert(xy.end(), s.y_nodes.begin(), s.y_nodes.end());
    s.c = degree_profile(c, xy).max_undirected;
    s.epsilon = double(s.f_nodes.size()) / double(s.n_data);
    return s;
}

Circuit split_high_degree(const Circuit& c, int threshold) {
    if (threshold < 1) throw InputError("split_high_degree: threshold must be >= 1");
    const Depth3Shape shape = analyze_depth3(c, c.n_in);

    std::vector<int> xy;
    xy.insert(xy.end(), shape.x_nodes.begin(), shape.x_nodes.end());
    xy.insert(xy.end(), shape.y_nodes.begin(), shape.y_nodes.end());
    const auto prof = degree_profile(c, xy);

    std::vector<int> over;
    for (int v : xy)
        if (prof.undirected_deg[v] > threshold) over.push_back(v);
    if (over.empty()) return c;

    const auto in_edges = c.in_edge_lists();

    struct NewNode {
        Node node;
        std::vector<int> in_srcs;   // by original node id
        std::vector<long> in_tags;  // coordinate tags, creation order
    };
    // Every edge carries a semantic tag. A rerouted edge keeps the tag of
    // the edge it replaces, so downstream tables can be permuted into the
    // new in-edge order afterwards.
    struct TaggedEdge {
        int src, dst;  // original ids; fresh nodes use c.size()+k
        long tag;
    };
    std::vector<TaggedEdge> live;
    std::vector<uint8_t> edge_dead(c.edges.size(), 0);
    std::vector<NewNode> fresh;
    int fresh_serial = 0;
    long next_tag = long(c.edges.size());

    std::vector<uint8_t> is_output(c.size(), 0);
    for (int v : shape.y_nodes) is_output[v] = 1;

    // Tables built for split outputs expect (surviving coords in original
    // order..., relay); record that assumed tag order per modified node.
    std::vector<std::vector<long>> assumed_override(c.size());
    std::vector<Node> nodes = c.nodes;
    std::vector<TaggedEdge> added;

    for (int v : over) {
        if (!is_output[v]) {
            // Over-threshold input: relay its value through a fresh middle
            // node; consumers keep their tables (the relay edge inherits
            // the dead edge's coordinate tag).
            NewNode relay;
            relay.node.kind = NodeKind::Gate;
            relay.node.name = nodes[v].name + "_relay" + std::to_string(fresh_serial++);
            relay.node.fn = GateFn::identity();
            relay.in_srcs = {v};
            relay.in_tags = {next_tag++};
            const int relay_id = c.size() + int(fresh.size());
            for (int e = 0; e < int(c.edges.size()); ++e) {
                if (edge_dead[e]) continue;
                if (c.edges[e].first == v && is_output[c.edges[e].second]) {
                    edge_dead[e] = 1;
                    added.push_back({relay_id, c.edges[e].second, long(e)});
                }
            }
            fresh.push_back(std::move(relay));
        } else {
            // Over-threshold output: its X in-edges must collapse into one
            // bit. Partition the X-block patterns by the sub-function they
            // induce on the rest of the coordinates; two classes at most.
            const auto& in = in_edges[v];
            std::vector<int> x_coords, other_coords;
            for (size_t k = 0; k < in.size(); ++k) {
                const int src = c.edges[in[k]].first;
                if (c.nodes[src].kind == NodeKind::Input)
                    x_coords.push_back(int(k));
                else
                    other_coords.push_back(int(k));
            }
            const int xa = int(x_coords.size()), oa = int(other_coords.size());
            const GateFn& fn = nodes[v].fn;
            // Signature of an X-pattern: outputs over all other-coordinate
            // patterns.
            auto signature = [&](uint64_t xpat) {
                std::vector<uint64_t> sig((uint64_t{1} << oa) / 64 + 1, 0);
                for (uint64_t op = 0; op < (uint64_t{1} << oa); ++op) {
                    uint64_t idx = 0;
                    for (int i = 0; i < xa; ++i)
                        if ((xpat >> i) & 1u) idx |= uint64_t{1} << x_coords[i];
                    for (int i = 0; i < oa; ++i)
                        if ((op >> i) & 1u) idx |= uint64_t{1} << other_coords[i];
                    if (fn.bit(idx)) sig[op >> 6] |= uint64_t{1} << (op & 63);
                }
                return sig;
            };
            std::map<std::vector<uint64_t>, int> classes;
            std::vector<int> cls(uint64_t{1} << xa);
            for (uint64_t xp = 0; xp < (uint64_t{1} << xa); ++xp) {
                auto sig = signature(xp);
                auto [it, inserted] = classes.emplace(std::move(sig), int(classes.size()));
                cls[xp] = it->second;
            }
            if (classes.size() > 2)
                throw InputError("split_high_degree: output " + nodes[v].name +
                                 " depends on its direct inputs through more than one bit; "
                                 "a single relay node cannot carry it");

            // Classifier gate over the X neighbours.
            NewNode relay;
            relay.node.kind = NodeKind::Gate;
            relay.node.name = nodes[v].name + "_relay" + std::to_string(fresh_serial++);
            relay.node.fn = GateFn::make(xa);
            for (uint64_t xp = 0; xp < (uint64_t{1} << xa); ++xp)
                relay.node.fn.set_bit(xp, cls[xp] == 1);
            for (int i = 0; i < xa; ++i) {
                relay.in_srcs.push_back(c.edges[in[x_coords[i]]].first);
                relay.in_tags.push_back(next_tag++);
            }
            const int relay_id = c.size() + int(fresh.size());

            // New table for v: other coords in original relative order, the
            // relay bit as the last coordinate.
            uint64_t rep[2] = {0, 0};
            bool have[2] = {false, false};
            for (uint64_t xp = 0; xp < (uint64_t{1} << xa); ++xp)
                if (!have[cls[xp]]) {
                    have[cls[xp]] = true;
                    rep[cls[xp]] = xp;
                }
            GateFn nf = GateFn::make(oa + 1);
            for (uint64_t i = 0; i < nf.rows(); ++i) {
                const uint64_t op = i & ((uint64_t{1} << oa) - 1);
                const int cbit = int((i >> oa) & 1u);
                const uint64_t xp = have[cbit] ? rep[cbit] : rep[0];
                uint64_t idx = 0;
                for (int j = 0; j < xa; ++j)
                    if ((xp >> j) & 1u) idx |= uint64_t{1} << x_coords[j];
                for (int j = 0; j < oa; ++j)
                    if ((op >> j) & 1u) idx |= uint64_t{1} << other_coords[j];
                nf.set_bit(i, fn.bit(idx));
            }
            nodes[v].fn = nf;
            const long relay_tag = next_tag++;
            for (int k : other_coords) assumed_override[v].push_back(long(in[k]));
            assumed_override[v].push_back(relay_tag);
            for (int k : x_coords) edge_dead[in[k]] = 1;
            added.push_back({relay_id, v, relay_tag});
            fresh.push_back(std::move(relay));
        }
    }

    for (int e = 0; e < int(c.edges.size()); ++e)
        if (!edge_dead[e]) live.push_back({c.edges[e].first, c.edges[e].second, long(e)});
    for (const auto& te : added) live.push_back(te);
    for (size_t i = 0; i < fresh.size(); ++i)
        for (size_t k = 0; k < fresh[i].in_srcs.size(); ++k)
            live.push_back({fresh[i].in_srcs[k], c.size() + int(i), fresh[i].in_tags[k]});

    // Assemble node order: inputs, old middle gates, fresh relays, outputs.
    Circuit out;
    std::vector<int> pos(c.size() + fresh.size(), -1);
    auto place = [&](int old_id, Node nd) {
        pos[old_id] = out.size();
        out.nodes.push_back(std::move(nd));
    };
    for (int i = 0; i < c.size() - c.n_out; ++i) place(i, nodes[i]);
    for (size_t i = 0; i < fresh.size(); ++i) place(c.size() + int(i), fresh[i].node);
    for (int i = c.size() - c.n_out; i < c.size(); ++i) place(i, nodes[i]);
    out.n_in = c.n_in;
    out.n_out = c.n_out;

    std::sort(live.begin(), live.end(),
              [](const TaggedEdge& a, const TaggedEdge& b) { return a.tag < b.tag; });
    std::vector<long> edge_tag(live.size());
    for (size_t e = 0; e < live.size(); ++e) {
        out.edges.emplace_back(pos[live[e].src], pos[live[e].dst]);
        edge_tag[e] = live[e].tag;
    }

    // Tables index in-edges by (source position, edge id); permute each
    // table from its assumed tag order into the realized order.
    const auto new_in = out.in_edge_lists();
    std::vector<int> old_of_new(out.size(), -1);
    for (int i = 0; i < c.size() + int(fresh.size()); ++i)
        if (pos[i] >= 0) old_of_new[pos[i]] = i;
    for (int v_new = 0; v_new < out.size(); ++v_new) {
        Node& nd = out.nodes[v_new];
        if (nd.kind != NodeKind::Gate && nd.kind != NodeKind::Output) continue;
        const auto& inl = new_in[v_new];
        if (int(inl.size()) != nd.fn.arity)
            throw InputError("split_high_degree: internal arity mismatch at " + nd.name);
        const int old_id = old_of_new[v_new];
        std::vector<long> assumed;
        if (old_id < c.size() && !assumed_override[old_id].empty()) {
            assumed = assumed_override[old_id];
        } else if (old_id < c.size()) {
            // Unmodified table: assumed order is the original in-edge
            // order, tags being original edge ids (reroutes inherit them).
            for (int e : in_edges[old_id]) assumed.push_back(long(e));
        } else {
            assumed = fresh[old_id - c.size()].in_tags;
        }
        std::vector<int> perm(inl.size());
        bool identical = true;
        for (size_t k = 0; k < inl.size(); ++k) {
            const long tag = edge_tag[inl[k]];
            const auto it = std::find(assumed.begin(), assumed.end(), tag);
            if (it == assumed.end())
                throw InputError("split_high_degree: internal tag mismatch at " + nd.name);
            perm[k] = int(it - assumed.begin());
            if (perm[k] != int(k)) identical = false;
        }
        if (!identical) nd.fn = nd.fn.permute_coords(perm);
    }

    validate(out);
    return out;
}

}  // namespace netshift
