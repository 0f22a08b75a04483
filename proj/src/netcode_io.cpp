#include "netshift/netcode_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace netshift {

CommInstance load_instance(std::istream& in) {
    CommInstance inst;
    std::map<std::string, int> by_name;
    std::string line;
    int lineno = 0, next_pair = 1;
    auto fail = [&](const std::string& msg) {
        throw InputError("instance line " + std::to_string(lineno) + ": " + msg);
    };
    auto node_of = [&](const std::string& id) {
        const auto it = by_name.find(id);
        if (it == by_name.end()) fail("unknown node " + id);
        return it->second;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "node") {
            std::string id;
            if (!(ls >> id)) fail("node needs an id");
            if (by_name.count(id)) fail("duplicate node " + id);
            by_name[id] = inst.add_node(id);
        } else if (kw == "edge") {
            std::string id, a, b, cap;
            if (!(ls >> id >> a >> b >> cap)) fail("edge needs <id> <src> <dst> <capacity|inf>");
            const auto c = parse_capacity(cap);
            inst.add_edge(id, node_of(a), node_of(b), c ? *c : Rat(0), !c.has_value());
        } else if (kw == "pair") {
            int i, bits;
            std::string s, t;
            if (!(ls >> i >> s >> t >> bits)) fail("pair needs <i> <s> <t> <bits>");
            if (i != next_pair) fail("pair indices must be 1..k in order");
            ++next_pair;
            inst.add_pair(node_of(s), node_of(t), bits);
        } else {
            fail("unknown record " + kw);
        }
    }
    inst.validate();
    return inst;
}

CommInstance load_instance_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open instance file " + path);
    return load_instance(f);
}

void save_instance(std::ostream& out, const CommInstance& inst, const std::string& header) {
    if (!header.empty()) {
        std::istringstream hc(header);
        std::string ln;
        while (std::getline(hc, ln)) out << "# " << ln << "\n";
    }
    std::vector<uint8_t> injector_node(inst.node_names.size(), 0);
    for (const auto& p : inst.pairs) injector_node[p.injector_node] = 1;
    for (size_t i = 0; i < inst.node_names.size(); ++i)
        if (!injector_node[i]) out << "node " << inst.node_names[i] << "\n";
    for (const auto& e : inst.edges) {
        if (e.injector) continue;
        out << "edge " << e.id << " " << inst.node_names[e.src] << " " << inst.node_names[e.dst]
            << " " << (e.infinite ? std::string("inf") : rat_str(e.cap)) << "\n";
    }
    for (size_t i = 0; i < inst.pairs.size(); ++i) {
        const auto& p = inst.pairs[i];
        out << "pair " << i + 1 << " " << inst.node_names[p.src] << " " << inst.node_names[p.dst]
            << " " << p.bits << "\n";
    }
}

void save_instance_file(const std::string& path, const CommInstance& inst,
                        const std::string& header) {
    std::ofstream f(path);
    if (!f) throw InputError("cannot open " + path + " for writing");
    save_instance(f, inst, header);
}

namespace {

int find_edge(const CommInstance& inst, const std::string& id) {
    for (int e = 0; e < int(inst.edges.size()); ++e)
        if (inst.edges[e].id == id) return e;
    throw InputError("unknown edge " + id);
}

std::vector<uint8_t> parse_hex_bits(const std::string& hex) {
    std::vector<uint8_t> bits;  // bit i of the hex number, little-endian
    for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
        int v;
        const char ch = *it;
        if (ch >= '0' && ch <= '9')
            v = ch - '0';
        else if (ch >= 'a' && ch <= 'f')
            v = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F')
            v = ch - 'A' + 10;
        else
            throw InputError(std::string("bad hex digit '") + ch + "'");
        for (int b = 0; b < 4; ++b) bits.push_back(uint8_t((v >> b) & 1));
    }
    return bits;
}

}  // namespace

CodingSolution load_solution(std::istream& in, const CommInstance& inst) {
    CodingSolution sol = CodingSolution::sized(inst);
    sol.name = "file";
    std::vector<int> width(inst.edges.size(), 1);
    for (size_t i = 0; i < inst.pairs.size(); ++i)
        width[inst.pairs[i].injector_edge] = inst.pairs[i].bits;

    struct TableSpec {
        int edge = -1;
        int pair = -1;
        std::vector<uint8_t> bits;
        bool forward = false;
    };
    std::vector<TableSpec> specs;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InputError("solution line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "width") {
            std::string id;
            int w;
            if (!(ls >> id >> w) || w < 0 || w > 30) fail("width needs <edge-id> <bits in 0..30>");
            width[find_edge(inst, id)] = w;
        } else if (kw == "func") {
            std::string id, hex;
            if (!(ls >> id >> hex)) fail("func needs <edge-id> <table-hex>");
            TableSpec ts;
            ts.edge = find_edge(inst, id);
            ts.bits = parse_hex_bits(hex);
            specs.push_back(std::move(ts));
        } else if (kw == "forward") {
            std::string id;
            if (!(ls >> id)) fail("forward needs <edge-id>");
            TableSpec ts;
            ts.edge = find_edge(inst, id);
            ts.forward = true;
            specs.push_back(std::move(ts));
        } else if (kw == "decoder") {
            int i;
            std::string hex;
            if (!(ls >> i >> hex)) fail("decoder needs <i> <table-hex>");
            if (i < 1 || i > int(inst.pairs.size())) fail("decoder pair index out of range");
            TableSpec ts;
            ts.pair = i - 1;
            ts.bits = parse_hex_bits(hex);
            specs.push_back(std::move(ts));
        } else {
            fail("unknown record " + kw);
        }
    }

    const auto in_lists = inst.in_edge_lists();
    auto make_table_fn = [&](int node, std::vector<uint8_t> bits, int out_width,
                             const std::string& what) {
        std::vector<int> in_widths;
        int in_bits = 0;
        for (int e : in_lists[node]) {
            in_widths.push_back(width[e]);
            in_bits += width[e];
        }
        if (in_bits > 24) throw InputError(what + ": in-message bits exceed 24, table too large");
        const uint64_t rows = uint64_t{1} << in_bits;
        if (bits.size() < rows * uint64_t(out_width))
            throw InputError(what + ": table too short (" + std::to_string(bits.size()) +
                             " bits for " + std::to_string(rows * out_width) + ")");
        for (size_t i = rows * out_width; i < bits.size(); ++i)
            if (bits[i]) throw InputError(what + ": table sets bits beyond its size");
        bits.resize(rows * out_width);
        return [bits = std::move(bits), in_widths, out_width, what](const std::vector<BitStr>& in) {
            if (in.size() != in_widths.size())
                throw InputError(what + ": in-message count mismatch");
            uint64_t row = 0;
            int off = 0;
            for (size_t k = 0; k < in.size(); ++k) {
                if (int(in[k].size()) != in_widths[k])
                    throw InputError(what + ": in-message width mismatch");
                row |= in[k].low_bits(in[k].size()) << off;
                off += in_widths[k];
            }
            BitStr out;
            for (int b = 0; b < out_width; ++b) out.push(bits[row * out_width + b]);
            return out;
        };
    };

    for (auto& ts : specs) {
        if (ts.pair >= 0) {
            sol.decoder[ts.pair] = make_table_fn(inst.pairs[ts.pair].dst, std::move(ts.bits),
                                                 inst.pairs[ts.pair].bits,
                                                 "decoder " + std::to_string(ts.pair + 1));
        } else if (ts.forward) {
            const int w = width[ts.edge];
            sol.edge_fn[ts.edge] = [w](const std::vector<BitStr>& in) {
                if (in.size() != 1) throw InputError("forward edge needs exactly one in-message");
                if (int(in[0].size()) != w) throw InputError("forward edge width mismatch");
                return in[0];
            };
        } else {
            sol.edge_fn[ts.edge] = make_table_fn(inst.edges[ts.edge].src, std::move(ts.bits),
                                                 width[ts.edge], "func " + inst.edges[ts.edge].id);
        }
    }
    return sol;
}

CodingSolution load_solution_file(const std::string& path, const CommInstance& inst) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open solution file " + path);
    return load_solution(f, inst);
}

void write_rate_csv(std::ostream& out, const RateReport& rep) {
    out << "edge,capacity,entropy,violation\n";
    for (const auto& r : rep.rows) {
        out << r.edge_id << "," << (r.infinite ? std::string("inf") : rat_str(r.cap)) << ","
            << fmt_double(r.entropy) << "," << r.violation << "\n";
    }
}

void write_rate_text(std::ostream& out, const RateReport& rep) {
    out << "edge            capacity     entropy      support  check\n";
    for (const auto& r : rep.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-15s %-12s %-12s %-8llu %s%s\n", r.edge_id.c_str(),
                      r.infinite ? "inf" : rat_str(r.cap).c_str(), fmt_double(r.entropy).c_str(),
                      (unsigned long long)r.support, r.method.c_str(),
                      r.pass ? "" : (" VIOLATION " + r.violation).c_str());
        out << buf;
    }
    for (size_t i = 0; i < rep.source_entropy.size(); ++i)
        out << "source " << i + 1 << ": H(A_" << i + 1 << ") = " << fmt_double(rep.source_entropy[i])
            << "\n";
    if (rep.ok)
        out << "rate: " << fmt_double(rep.rate) << "\n";
    else {
        out << "rate: none (capacity violations)\n";
        for (const auto& v : rep.violations) out << "  " << v << "\n";
    }
}

}  // namespace netshift
