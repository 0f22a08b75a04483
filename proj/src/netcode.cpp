#include "netshift/netcode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace netshift {

int CommInstance::add_node(const std::string& name) {
    node_names.push_back(name);
    return int(node_names.size()) - 1;
}

int CommInstance::add_edge(const std::string& id, int src, int dst, Rat cap, bool infinite) {
    NetEdge e;
    e.id = id;
    e.src = src;
    e.dst = dst;
    e.cap = std::move(cap);
    e.infinite = infinite;
    edges.push_back(std::move(e));
    return int(edges.size()) - 1;
}

int CommInstance::add_pair(int s, int t, int bits) {
    NetPair p;
    p.src = s;
    p.dst = t;
    p.bits = bits;
    const int idx = int(pairs.size());
    p.injector_node = add_node("INJ" + std::to_string(idx + 1));
    p.injector_edge = add_edge("inj" + std::to_string(idx + 1), p.injector_node, s, 0, true);
    edges[p.injector_edge].injector = true;
    pairs.push_back(p);
    return idx;
}

int CommInstance::find_node(const std::string& name) const {
    for (int i = 0; i < int(node_names.size()); ++i)
        if (node_names[i] == name) return i;
    return -1;
}

std::vector<int> CommInstance::topo_order() const {
    const int n = int(node_names.size());
    std::vector<int> indeg(n, 0), order;
    std::vector<std::vector<int>> out(n);
    for (const auto& e : edges) {
        ++indeg[e.dst];
        out[e.src].push_back(e.dst);
    }
    std::deque<int> q;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(i);
    while (!q.empty()) {
        // Smallest-id first keeps the order deterministic.
        std::sort(q.begin(), q.end());
        const int u = q.front();
        q.pop_front();
        order.push_back(u);
        for (int v : out[u])
            if (--indeg[v] == 0) q.push_back(v);
    }
    if (int(order.size()) != n) throw InputError("instance graph has a directed cycle");
    return order;
}

std::vector<std::vector<int>> CommInstance::in_edge_lists() const {
    // Order by (source node id, edge id). Constructors and the file format
    // declare nodes in topological order, so this is the induced order and
    // is independent of how ties in a topological sort are broken.
    std::vector<std::vector<int>> in(node_names.size());
    for (int e = 0; e < int(edges.size()); ++e) in[edges[e].dst].push_back(e);
    for (auto& lst : in)
        std::sort(lst.begin(), lst.end(), [&](int a, int b) {
            if (edges[a].src != edges[b].src) return edges[a].src < edges[b].src;
            return a < b;
        });
    return in;
}

int CommInstance::total_message_bits() const {
    int total = 0;
    for (const auto& p : pairs) total += p.bits;
    return total;
}

void CommInstance::validate() const {
    const int n = int(node_names.size());
    for (const auto& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw InputError("edge " + e.id + " has unknown endpoint");
        if (!e.infinite && e.cap < 0) throw InputError("edge " + e.id + " has negative capacity");
    }
    for (const auto& p : pairs) {
        if (p.src < 0 || p.src >= n || p.dst < 0 || p.dst >= n)
            throw InputError("pair has unknown endpoint");
        if (p.bits < 1 || p.bits > 30) throw InputError("pair message width outside 1..30");
        if (p.injector_node < 0 || p.injector_edge < 0 || !edges[p.injector_edge].injector)
            throw InputError("pair lacks its injector");
    }
    topo_order();  // throws on cycles
}

CodingSolution CodingSolution::sized(const CommInstance& inst) {
    CodingSolution s;
    s.edge_fn.resize(inst.edges.size());
    s.decoder.resize(inst.pairs.size());
    return s;
}

Execution execute(const CommInstance& inst, const CodingSolution& sol,
                  const std::vector<BitStr>& messages) {
    if (messages.size() != inst.pairs.size()) throw InputError("execute: message count mismatch");
    for (size_t i = 0; i < inst.pairs.size(); ++i)
        if (int(messages[i].size()) != inst.pairs[i].bits)
            throw InputError("execute: message width mismatch for pair " + std::to_string(i + 1));
    if (sol.edge_fn.size() != inst.edges.size() || sol.decoder.size() != inst.pairs.size())
        throw InputError("execute: solution shape does not match the instance");

    const auto order = inst.topo_order();
    const auto in = inst.in_edge_lists();
    std::vector<int> injector_pair(inst.edges.size(), -1);
    for (size_t i = 0; i < inst.pairs.size(); ++i)
        injector_pair[inst.pairs[i].injector_edge] = int(i);

    const auto out_by_node = [&] {
        std::vector<std::vector<int>> out(inst.node_names.size());
        for (int e = 0; e < int(inst.edges.size()); ++e) out[inst.edges[e].src].push_back(e);
        return out;
    }();

    Execution ex;
    ex.edge_msg.resize(inst.edges.size());
    std::vector<BitStr> in_msgs;
    for (int u : order) {
        in_msgs.clear();
        for (int e : in[u]) in_msgs.push_back(ex.edge_msg[e]);
        for (int e : out_by_node[u]) {
            if (injector_pair[e] >= 0) {
                ex.edge_msg[e] = messages[injector_pair[e]];
            } else {
                if (!sol.edge_fn[e])
                    throw InputError("execute: no function bound to edge " + inst.edges[e].id);
                ex.edge_msg[e] = sol.edge_fn[e](in_msgs);
            }
        }
    }
    ex.decoded.resize(inst.pairs.size());
    for (size_t i = 0; i < inst.pairs.size(); ++i) {
        if (!sol.decoder[i]) throw InputError("execute: no decoder for pair " + std::to_string(i + 1));
        in_msgs.clear();
        for (int e : in[inst.pairs[i].dst]) in_msgs.push_back(ex.edge_msg[e]);
        ex.decoded[i] = sol.decoder[i](in_msgs);
    }
    return ex;
}

namespace {

std::vector<BitStr> messages_for_index(const CommInstance& inst, uint64_t idx) {
    std::vector<BitStr> msgs;
    msgs.reserve(inst.pairs.size());
    int off = 0;
    for (const auto& p : inst.pairs) {
        msgs.emplace_back(size_t(p.bits), (idx >> off));
        off += p.bits;
    }
    return msgs;
}

void check_budget(const CommInstance& inst, int budget_bits, const char* what) {
    const int total = inst.total_message_bits();
    if (budget_bits < 0 || budget_bits > 30) throw InputError("enumeration budget outside 0..30");
    if (total > budget_bits)
        throw InputError(std::string(what) + ": total message bits " + std::to_string(total) +
                         " exceed the enumeration budget " + std::to_string(budget_bits) +
                         " (no sampling fallback; raise the budget explicitly)");
}

}  // namespace

VerifyResult verify_correctness(const CommInstance& inst, const CodingSolution& sol,
                                int budget_bits) {
    check_budget(inst, budget_bits, "verify_correctness");
    const int total = inst.total_message_bits();
    VerifyResult r;
    for (uint64_t idx = 0; idx < (uint64_t{1} << total); ++idx) {
        const auto msgs = messages_for_index(inst, idx);
        const auto ex = execute(inst, sol, msgs);
        ++r.checked;
        for (size_t i = 0; i < inst.pairs.size(); ++i) {
            if (ex.decoded[i] != msgs[i]) {
                r.pass = false;
                r.counterexample = idx;
                r.detail = "pair " + std::to_string(i + 1) + ": sent " + msgs[i].str() +
                           ", decoded " + ex.decoded[i].str();
                return r;
            }
        }
    }
    r.pass = true;
    return r;
}

RateReport measure_rate(const CommInstance& inst, const CodingSolution& sol, int budget_bits) {
    check_budget(inst, budget_bits, "measure_rate");
    const int total = inst.total_message_bits();
    const uint64_t N = uint64_t{1} << total;

    std::vector<std::map<BitStr, uint64_t>> hist(inst.edges.size());
    for (uint64_t idx = 0; idx < N; ++idx) {
        const auto msgs = messages_for_index(inst, idx);
        const auto ex = execute(inst, sol, msgs);
        for (size_t e = 0; e < inst.edges.size(); ++e) ++hist[e][ex.edge_msg[e]];
    }

    RateReport rep;
    const double lgN = std::log2(double(N));
    for (size_t e = 0; e < inst.edges.size(); ++e) {
        const NetEdge& ed = inst.edges[e];
        EdgeRateRow row;
        row.edge_id = ed.id;
        row.cap = ed.cap;
        row.infinite = ed.infinite;
        row.injector = ed.injector;
        row.support = hist[e].size();
        double h = 0.0;
        uint64_t len_total = 0;
        std::vector<BitStr> distinct;
        for (const auto& [msg, cnt] : hist[e]) {
            h += double(cnt) * std::log2(double(cnt));
            len_total += cnt * msg.size();
            distinct.push_back(msg);
        }
        row.entropy = lgN - h / double(N);
        if (row.entropy < 0) row.entropy = 0;  // rounding guard
        row.mean_len = Rat(len_total) / Rat(N);
        row.prefix_free = !prefix_violation(distinct).has_value();

        if (ed.infinite) {
            row.method = "infinite";
            row.pass = true;
        } else {
            const auto num = boost::multiprecision::numerator(ed.cap);
            const auto den = boost::multiprecision::denominator(ed.cap);
            bool decided = false;
            if (den == 1 && num >= 0 && num <= 62) {
                const uint64_t cap_int = num.convert_to<uint64_t>();
                if (row.support <= (uint64_t{1} << cap_int)) {
                    // |support| <= 2^c gives H <= c outright.
                    row.method = "support";
                    row.pass = true;
                    decided = true;
                }
            }
            if (!decided && row.prefix_free && row.mean_len <= ed.cap) {
                // Prefix-free code: H <= E|len| (source coding), E|len| exact.
                row.method = "prefix-free";
                row.pass = true;
                decided = true;
            }
            if (!decided) {
                row.method = "float";
                row.pass = row.entropy <= double(ed.cap) + 1e-9;
            }
            if (!row.pass) {
                row.violation = "H=" + fmt_double(row.entropy) + " > cap=" + rat_str(ed.cap);
                rep.violations.push_back("edge " + ed.id + ": " + row.violation);
            }
        }
        rep.rows.push_back(std::move(row));
    }

    for (const auto& p : inst.pairs) rep.source_entropy.push_back(double(p.bits));
    rep.ok = rep.violations.empty();
    if (rep.ok && !inst.pairs.empty()) {
        double r = rep.source_entropy[0];
        for (double h : rep.source_entropy) r = std::min(r, h);
        rep.rate = r;
    }
    return rep;
}

CodingSolution forwarding_solution(const CommInstance& inst) {
    CodingSolution s = CodingSolution::sized(inst);
    s.name = "forward";
    for (size_t e = 0; e < inst.edges.size(); ++e) {
        if (inst.edges[e].injector) continue;
        s.edge_fn[e] = [](const std::vector<BitStr>& in) {
            if (in.size() != 1) throw InputError("forwarding needs exactly one in-message");
            return in[0];
        };
    }
    for (size_t i = 0; i < inst.pairs.size(); ++i) {
        s.decoder[i] = [](const std::vector<BitStr>& in) {
            if (in.size() != 1) throw InputError("forwarding decoder needs exactly one in-message");
            return in[0];
        };
    }
    return s;
}

}  // namespace netshift
