#include "netshift/funcgen.hpp"

#include <algorithm>
#include <map>

namespace netshift {

std::vector<uint8_t> shift_oracle(const ShiftSpec& spec, std::span<const uint8_t> x, int l) {
    const int n = spec.n;
    if (n < 1) throw InputError("shift_oracle: n must be >= 1");
    if (int(x.size()) != n) throw InputError("shift_oracle: |x| != n");
    if (l < 1 || l > n) throw InputError("shift_oracle: l out of [1,n]");
    if (spec.cyclic) {
        std::vector<uint8_t> y(n, 0);
        for (int j = 1; j <= n; ++j) y[j - 1] = x[((j - l) % n + n) % n];
        return y;
    }
    std::vector<uint8_t> y(2 * n, 0);
    for (int j = l; j <= l + n - 1; ++j) y[j - 1] = x[j - l];
    return y;
}

std::vector<uint8_t> mult_oracle(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    const int n = int(a.size());
    if (int(b.size()) != n) throw InputError("mult_oracle: operand widths differ");
    // Schoolbook with carries over base-2 digit sums.
    std::vector<uint32_t> acc(2 * n, 0);
    for (int i = 0; i < n; ++i)
        if (a[i])
            for (int j = 0; j < n; ++j)
                if (b[j]) ++acc[i + j];
    std::vector<uint8_t> out(2 * n, 0);
    uint32_t carry = 0;
    for (int i = 0; i < 2 * n; ++i) {
        const uint32_t v = acc[i] + carry;
        out[i] = uint8_t(v & 1);
        carry = v >> 1;
    }
    if (carry) throw InputError("mult_oracle: internal carry overflow");
    return out;
}

std::vector<uint8_t> shift_input(std::span<const uint8_t> x, int l, ShiftEncoding enc) {
    const int n = int(x.size());
    std::vector<uint8_t> full(x.begin(), x.end());
    if (enc == ShiftEncoding::Binary) {
        const int w = int(ceil_log2(uint32_t(n)));
        for (int s = 0; s < w; ++s) full.push_back(uint8_t(((l - 1) >> s) & 1));
    } else {
        for (int i = 1; i <= n; ++i) full.push_back(uint8_t(i == l));
    }
    return full;
}

namespace {

// sel ? a : b with the coordinate order given by the actual in-edge order.
// Roles: role_of[k] identifies coordinate k as 0=a, 1=b, 2=sel.
GateFn mux_table(const std::vector<int>& role_of) {
    GateFn fn = GateFn::make(int(role_of.size()));
    for (uint64_t idx = 0; idx < fn.rows(); ++idx) {
        int a = 0, b = 0, sel = 0;
        for (size_t k = 0; k < role_of.size(); ++k) {
            const int bit = int((idx >> k) & 1u);
            if (role_of[k] == 0) a = bit;
            if (role_of[k] == 1) b = bit;
            if (role_of[k] == 2) sel = bit;
        }
        fn.set_bit(idx, sel ? a : b);
    }
    return fn;
}

struct Builder {
    Circuit c;
    int add(Node nd) {
        c.nodes.push_back(std::move(nd));
        return c.size() - 1;
    }
    int input(const std::string& name, int idx0) {
        Node nd;
        nd.kind = NodeKind::Input;
        nd.name = name;
        nd.io_index = idx0;
        return add(std::move(nd));
    }
    int gate(const std::string& name, GateFn fn) {
        Node nd;
        nd.kind = NodeKind::Gate;
        nd.name = name;
        nd.fn = std::move(fn);
        return add(std::move(nd));
    }
    int constant(const std::string& name, bool b) {
        Node nd;
        nd.kind = NodeKind::Const;
        nd.name = name;
        nd.const_value = b;
        return add(std::move(nd));
    }
    int output(const std::string& name, int idx0, GateFn fn) {
        Node nd;
        nd.kind = NodeKind::Output;
        nd.name = name;
        nd.io_index = idx0;
        nd.fn = std::move(fn);
        return add(std::move(nd));
    }
    void edge(int s, int d) { c.edges.emplace_back(s, d); }
};

// Fan a signal out through unary copy gates so no node exceeds out-degree 2.
// Returns `uses` node ids, each safe to consume once.
std::vector<int> fanout_tree(Builder& b, int source, int uses, const std::string& prefix,
                             int* serial) {
    std::vector<int> avail{source};
    std::vector<int> out;
    size_t next = 0;
    // Each pop grants two consumptions: either two leaves or further copies.
    std::vector<int> budget{2};
    while (int(out.size()) < uses) {
        if (next >= avail.size()) throw InputError("fanout_tree: internal underflow");
        if (budget[next] == 0) {
            ++next;
            continue;
        }
        const int remaining = uses - int(out.size());
        int supply = 0;
        for (size_t i = next; i < avail.size(); ++i) supply += budget[i];
        if (supply >= remaining) {
            --budget[next];
            out.push_back(avail[next]);
        } else {
            const int cp = b.gate(prefix + std::to_string((*serial)++), GateFn::identity());
            b.edge(avail[next], cp);
            --budget[next];
            avail.push_back(cp);
            budget.push_back(2);
        }
    }
    return out;
}

}  // namespace

Circuit build_barrel_shifter(int n) {
    if (!is_pow2(uint32_t(n))) throw InputError("build_barrel_shifter: n must be a power of two");
    const int L = int(ceil_log2(uint32_t(n)));
    Builder b;
    std::vector<int> xin(n), jin(std::max(L, 1));
    for (int i = 0; i < n; ++i) xin[i] = b.input("x" + std::to_string(i + 1), i);
    for (int s = 0; s < L; ++s) jin[s] = b.input("j" + std::to_string(s + 1), n + s);
    if (L == 0) {
        // n = 1: the format needs at least the data input; shift is identity.
        const int c0 = b.constant("c0", false);
        const int y1 = b.output("y1", 0, GateFn::identity());
        b.edge(xin[0], y1);
        const int y2 = b.output("y2", 1, GateFn::identity());
        b.edge(c0, y2);
        b.c.n_in = 1;
        b.c.n_out = 2;
        validate(b.c);
        return b.c;
    }

    // lane[i-1] holds the node computing output lane i (1-based), -1 = zero.
    std::vector<int> lane(2 * n, -1);
    for (int i = 0; i < n; ++i) lane[i] = xin[i];
    int cserial = 0;
    for (int s = 0; s < L; ++s) {
        const int sh = 1 << s;
        const int hi = std::min(2 * n, n + (sh << 1) - 1);
        // Count muxes this stage to size the select fanout tree.
        std::vector<int> todo;
        for (int i = 1; i <= hi; ++i) {
            const int shifted = (i - sh >= 1) ? lane[i - sh - 1] : -1;
            const int straight = lane[i - 1];
            if (shifted >= 0 || straight >= 0) todo.push_back(i);
        }
        auto sels = fanout_tree(b, jin[s], int(todo.size()),
                                "cp" + std::to_string(s + 1) + "_", &cserial);
        std::vector<int> next_lane(2 * n, -1);
        for (size_t t = 0; t < todo.size(); ++t) {
            const int i = todo[t];
            const int shifted = (i - sh >= 1) ? lane[i - sh - 1] : -1;
            const int straight = lane[i - 1];
            const int sel = sels[t];
            // In-edge order is by node position; data lanes precede the
            // fresh select copies, and the shifted lane (lower index) was
            // created no later than the straight one within a stage.
            std::vector<std::pair<int, int>> srcs;  // (node, role)
            if (shifted >= 0) srcs.push_back({shifted, 0});
            if (straight >= 0) srcs.push_back({straight, 1});
            srcs.push_back({sel, 2});
            std::sort(srcs.begin(), srcs.end());
            std::vector<int> roles;
            for (auto& [nid, role] : srcs) roles.push_back(role);
            GateFn fn = mux_table(roles);
            if (shifted < 0) {
                // out = sel ? 0 : straight
                fn = GateFn::make(int(roles.size()));
                for (uint64_t idx = 0; idx < fn.rows(); ++idx) {
                    int straight_v = 0, sel_v = 0;
                    for (size_t k = 0; k < roles.size(); ++k) {
                        const int bit = int((idx >> k) & 1u);
                        if (roles[k] == 1) straight_v = bit;
                        if (roles[k] == 2) sel_v = bit;
                    }
                    fn.set_bit(idx, sel_v ? 0 : straight_v);
                }
            } else if (straight < 0) {
                // out = sel ? shifted : 0
                fn = GateFn::make(int(roles.size()));
                for (uint64_t idx = 0; idx < fn.rows(); ++idx) {
                    int shifted_v = 0, sel_v = 0;
                    for (size_t k = 0; k < roles.size(); ++k) {
                        const int bit = int((idx >> k) & 1u);
                        if (roles[k] == 0) shifted_v = bit;
                        if (roles[k] == 2) sel_v = bit;
                    }
                    fn.set_bit(idx, sel_v ? shifted_v : 0);
                }
            }
            const int g = b.gate("m" + std::to_string(s + 1) + "_" + std::to_string(i), std::move(fn));
            for (auto& [nid, role] : srcs) b.edge(nid, g);
            next_lane[i - 1] = g;
        }
        lane = next_lane;
    }

    int c0 = -1;
    for (int i = 0; i < 2 * n; ++i)
        if (lane[i] < 0 && c0 < 0) c0 = b.constant("c0", false);
    for (int i = 0; i < 2 * n; ++i) {
        const int src = lane[i] >= 0 ? lane[i] : c0;
        const int y = b.output("y" + std::to_string(i + 1), i, GateFn::identity());
        b.edge(src, y);
    }
    b.c.n_in = n + L;
    b.c.n_out = 2 * n;
    validate(b.c);
    return b.c;
}

Circuit build_depth3_identity(int n, int window) {
    if (n < 1) throw InputError("build_depth3_identity: n must be >= 1");
    if (window < 1) throw InputError("build_depth3_identity: window must be >= 1");
    Builder b;
    std::vector<int> xin(n);
    for (int i = 0; i < n; ++i) xin[i] = b.input("x" + std::to_string(i + 1), i);
    for (int j = 1; j <= n; ++j) {
        // Sources x_j .. x_{min(n, j+window-1)}; output projects on x_j,
        // which is the first coordinate in position order.
        const int hi = std::min(n, j + window - 1);
        const int arity = hi - j + 1;
        GateFn fn = GateFn::make(arity);
        for (uint64_t idx = 0; idx < fn.rows(); ++idx) fn.set_bit(idx, idx & 1u);
        const int y = b.output("y" + std::to_string(j), j - 1, std::move(fn));
        for (int i = j; i <= hi; ++i) b.edge(xin[i - 1], y);
    }
    b.c.n_in = n;
    b.c.n_out = n;
    validate(b.c);
    return b.c;
}

Depth3ShiftResult build_depth3_shift(int n, double eps, ShiftEncoding enc, bool cyclic) {
    if (!is_pow2(uint32_t(n))) throw InputError("build_depth3_shift: n must be a power of two");
    const int L = int(ceil_log2(uint32_t(n)));
    const int max_candidates = n;
    if (L + max_candidates > kMaxArity)
        throw InputError("build_depth3_shift: output fan-in would exceed the arity limit (n <= 16)");

    Builder b;
    std::vector<int> xin(n);
    for (int i = 0; i < n; ++i) xin[i] = b.input("x" + std::to_string(i + 1), i);
    std::vector<int> shift_in;
    if (enc == ShiftEncoding::Binary) {
        for (int s = 0; s < L; ++s)
            shift_in.push_back(b.input("j" + std::to_string(s + 1), n + s));
    } else {
        for (int i = 0; i < n; ++i)
            shift_in.push_back(b.input("h" + std::to_string(i + 1), n + i));
    }

    // Middle layer: lg n selector gates (binary value l-1), then promoted
    // copies of x_1..x_q chosen to fill the eps*n budget.
    const int budget = int(std::max(0.0, std::ceil(eps * n)));
    const int q = std::clamp(budget - std::max(L, 1), 0, n);
    std::vector<int> sel(std::max(L, 1), -1);
    for (int s = 0; s < L; ++s) {
        if (enc == ShiftEncoding::Binary) {
            sel[s] = b.gate("sel" + std::to_string(s + 1), GateFn::identity());
            b.edge(shift_in[s], sel[s]);
        } else {
            // OR of the one-hot lines h_l with bit s of (l-1) set.
            std::vector<int> srcs;
            for (int l = 1; l <= n; ++l)
                if (((l - 1) >> s) & 1) srcs.push_back(shift_in[l - 1]);
            GateFn fn = GateFn::make(int(srcs.size()));
            for (uint64_t idx = 1; idx < fn.rows(); ++idx) fn.set_bit(idx, true);
            sel[s] = b.gate("sel" + std::to_string(s + 1), std::move(fn));
            for (int src : srcs) b.edge(src, sel[s]);
        }
    }
    std::vector<int> promoted(n, -1);
    for (int i = 0; i < q; ++i) {
        promoted[i] = b.gate("p" + std::to_string(i + 1), GateFn::identity());
        b.edge(xin[i], promoted[i]);
    }

    const int n_out = cyclic ? n : 2 * n;
    for (int j = 1; j <= n_out; ++j) {
        // Candidate source index for each shift value l.
        std::vector<int> cand_of_l(n + 1, 0);  // 0 = output is 0 for this l
        std::vector<int> cand_idxs;
        for (int l = 1; l <= n; ++l) {
            int src_idx = 0;
            if (cyclic)
                src_idx = ((j - l) % n + n) % n + 1;
            else if (l <= j && j <= l + n - 1)
                src_idx = j - l + 1;
            cand_of_l[l] = src_idx;
            if (src_idx > 0) cand_idxs.push_back(src_idx);
        }
        std::sort(cand_idxs.begin(), cand_idxs.end());
        cand_idxs.erase(std::unique(cand_idxs.begin(), cand_idxs.end()), cand_idxs.end());

        // In-edge sources: selectors (middle, early), promoted copies
        // (middle), direct data inputs. Order by node position.
        struct Src {
            int node;
            int role;  // -1..-L = selector bit s, >0 = candidate index
        };
        std::vector<Src> srcs;
        for (int s = 0; s < L; ++s) srcs.push_back({sel[s], -(s + 1)});
        for (int ci : cand_idxs)
            srcs.push_back({promoted[ci - 1] >= 0 ? promoted[ci - 1] : xin[ci - 1], ci});
        std::sort(srcs.begin(), srcs.end(), [](const Src& a, const Src& b2) { return a.node < b2.node; });

        GateFn fn = GateFn::make(int(srcs.size()));
        for (uint64_t idx = 0; idx < fn.rows(); ++idx) {
            int lm1 = 0;
            for (size_t k = 0; k < srcs.size(); ++k)
                if (srcs[k].role < 0 && ((idx >> k) & 1u)) lm1 |= 1 << (-srcs[k].role - 1);
            const int l = lm1 + 1;
            const int want = l <= n ? cand_of_l[l] : 0;
            bool out_bit = false;
            if (want > 0)
                for (size_t k = 0; k < srcs.size(); ++k)
                    if (srcs[k].role == want) out_bit = ((idx >> k) & 1u) != 0;
            fn.set_bit(idx, out_bit);
        }
        const int y = b.output("y" + std::to_string(j), j - 1, std::move(fn));
        for (const auto& s : srcs) b.edge(s.node, y);
    }
    b.c.n_in = n + (enc == ShiftEncoding::Binary ? L : n);
    b.c.n_out = n_out;
    validate(b.c);

    Depth3ShiftResult r;
    r.circuit = std::move(b.c);
    r.encoding = enc;
    r.middle_size = std::max(L, 0) + q;
    r.eps_achieved = double(r.middle_size) / double(n);
    const auto shape = analyze_depth3(r.circuit, n);
    r.c_xy = shape.c;
    return r;
}

}  // namespace netshift
