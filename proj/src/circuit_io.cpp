#include "netshift/circuit_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace netshift {

std::string table_hex(const GateFn& fn) {
    const uint64_t bits = fn.rows();
    const uint64_t digits = (bits + 3) / 4;
    std::string s(digits, '0');
    for (uint64_t d = 0; d < digits; ++d) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            const uint64_t idx = 4 * d + b;
            if (idx < bits && fn.bit(idx)) v |= 1 << b;
        }
        s[digits - 1 - d] = "0123456789abcdef"[v];
    }
    return s;
}

GateFn table_from_hex(int arity, const std::string& hex) {
    GateFn fn = GateFn::make(arity);
    const uint64_t bits = fn.rows();
    const uint64_t digits = (bits + 3) / 4;
    if (hex.size() != digits)
        throw InputError("table hex has " + std::to_string(hex.size()) + " digits, expected " +
                         std::to_string(digits));
    for (uint64_t d = 0; d < digits; ++d) {
        const char ch = hex[digits - 1 - d];
        int v;
        if (ch >= '0' && ch <= '9')
            v = ch - '0';
        else if (ch >= 'a' && ch <= 'f')
            v = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F')
            v = ch - 'A' + 10;
        else
            throw InputError(std::string("bad hex digit '") + ch + "'");
        for (int b = 0; b < 4; ++b) {
            const uint64_t idx = 4 * d + b;
            if (idx < bits)
                fn.set_bit(idx, (v >> b) & 1);
            else if ((v >> b) & 1)
                throw InputError("table hex sets bits beyond 2^arity");
        }
    }
    return fn;
}

Circuit load_circuit(std::istream& in) {
    Circuit c;
    std::map<std::string, int> by_name;
    struct PendingIo {
        int node;
        int index;  // 1-based from file
        bool port = false;
    };
    std::vector<PendingIo> inputs, outputs;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InputError("circuit line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "node") {
            std::string id, kind;
            if (!(ls >> id >> kind)) fail("node record needs <id> <kind>");
            if (by_name.count(id)) fail("duplicate node id " + id);
            Node nd;
            nd.name = id;
            if (kind == "input") {
                int idx;
                if (!(ls >> idx)) fail("input needs an index");
                nd.kind = NodeKind::Input;
                inputs.push_back({int(c.nodes.size()), idx});
            } else if (kind == "output") {
                int idx;
                if (!(ls >> idx)) fail("output needs an index");
                nd.kind = NodeKind::Output;
                int arity;
                std::string hex;
                bool port = false;
                if (ls >> arity) {
                    if (!(ls >> hex)) fail("output with arity needs a table");
                    nd.fn = table_from_hex(arity, hex);
                } else {
                    ls.clear();
                    nd.fn = GateFn::identity();  // port form, checked below
                    port = true;
                }
                outputs.push_back({int(c.nodes.size()), idx, port});
            } else if (kind == "gate") {
                int arity;
                std::string hex;
                if (!(ls >> arity >> hex)) fail("gate needs <arity> <table-hex>");
                nd.kind = NodeKind::Gate;
                nd.fn = table_from_hex(arity, hex);
            } else if (kind == "const") {
                int b;
                if (!(ls >> b) || (b != 0 && b != 1)) fail("const needs 0 or 1");
                nd.kind = NodeKind::Const;
                nd.const_value = b != 0;
            } else {
                fail("unknown node kind " + kind);
            }
            by_name[id] = int(c.nodes.size());
            c.nodes.push_back(std::move(nd));
        } else if (kw == "edge") {
            std::string a, b;
            if (!(ls >> a >> b)) fail("edge needs <src> <dst>");
            const auto ia = by_name.find(a), ib = by_name.find(b);
            if (ia == by_name.end()) fail("edge references undeclared node " + a);
            if (ib == by_name.end()) fail("edge references undeclared node " + b);
            if (ia->second >= ib->second) fail("edge against declaration (topological) order");
            c.edges.emplace_back(ia->second, ib->second);
        } else {
            fail("unknown record " + kw);
        }
        std::string extra;
        if (ls >> extra) fail("trailing token " + extra);
    }
    c.n_in = int(inputs.size());
    c.n_out = int(outputs.size());
    // Check contiguous 1-based indices in declaration order.
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i].node != int(i))
            throw InputError("input " + c.nodes[inputs[i].node].name + " not in the leading block");
        if (inputs[i].index != int(i) + 1)
            throw InputError("input indices must be 1..n in order");
        c.nodes[inputs[i].node].io_index = int(i);
    }
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].node != c.size() - c.n_out + int(i))
            throw InputError("output " + c.nodes[outputs[i].node].name + " not in the trailing block");
        if (outputs[i].index != int(i) + 1)
            throw InputError("output indices must be 1..m in order");
        c.nodes[outputs[i].node].io_index = int(i);
    }
    // Port-form outputs forward a single in-edge.
    const auto indeg = c.in_degrees();
    for (const auto& io : outputs)
        if (io.port && indeg[io.node] != 1)
            throw InputError("output " + c.nodes[io.node].name +
                             " without a table must have exactly one in-edge");
    validate(c);
    return c;
}

Circuit load_circuit_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open circuit file " + path);
    return load_circuit(f);
}

void save_circuit(std::ostream& out, const Circuit& c, const std::string& header_comment) {
    if (!header_comment.empty()) {
        std::istringstream hc(header_comment);
        std::string ln;
        while (std::getline(hc, ln)) out << "# " << ln << "\n";
    }
    const auto indeg = c.in_degrees();
    for (int i = 0; i < c.size(); ++i) {
        const Node& nd = c.nodes[i];
        switch (nd.kind) {
            case NodeKind::Input:
                out << "node " << nd.name << " input " << nd.io_index + 1 << "\n";
                break;
            case NodeKind::Output: {
                const bool port = nd.fn.arity == 1 && indeg[i] == 1 && nd.fn.bit(1) && !nd.fn.bit(0);
                out << "node " << nd.name << " output " << nd.io_index + 1;
                if (!port) out << " " << nd.fn.arity << " " << table_hex(nd.fn);
                out << "\n";
                break;
            }
            case NodeKind::Gate:
                out << "node " << nd.name << " gate " << nd.fn.arity << " " << table_hex(nd.fn) << "\n";
                break;
            case NodeKind::Const:
                out << "node " << nd.name << " const " << (nd.const_value ? 1 : 0) << "\n";
                break;
        }
    }
    for (const auto& [s, d] : c.edges)
        out << "edge " << c.nodes[s].name << " " << c.nodes[d].name << "\n";
}

void save_circuit_file(const std::string& path, const Circuit& c, const std::string& header_comment) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot open " + path + " for writing");
    save_circuit(f, c, header_comment);
}

}  // namespace netshift
