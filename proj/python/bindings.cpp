// Python bindings for the main operations: oracles, generators, circuit
// evaluation, coding-rate measurement, concurrent flow and the certificate
// chains. Reports come back as plain dicts/lists so callers can poke at
// them without wrapper classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "netshift/circuit_io.hpp"
#include "netshift/netcode_io.hpp"
#include "netshift/reduction.hpp"

namespace py = pybind11;
using namespace netshift;

namespace {

std::vector<uint8_t> to_bits(const std::string& s) { return parse_bits(s); }

py::dict cert_to_dict(const Certificate& cert) {
    py::dict d;
    d["mode"] = cert.mode;
    d["verdict"] = cert.verdict;
    py::dict params;
    for (const auto& [k, v] : cert.params) params[py::str(k)] = v;
    d["params"] = params;
    py::list steps;
    for (const auto& s : cert.steps) {
        py::dict sd;
        sd["id"] = s.id;
        sd["detail"] = s.detail;
        sd["lhs"] = s.lhs;
        sd["rhs"] = s.rhs;
        sd["lhs_val"] = s.lhs_val;
        sd["rhs_val"] = s.rhs_val;
        sd["rel"] = s.rel;
        sd["pass"] = s.pass;
        sd["binding"] = s.binding;
        sd["note"] = s.note;
        steps.append(sd);
    }
    d["steps"] = steps;
    return d;
}

py::dict rate_to_dict(const RateReport& rep) {
    py::dict d;
    d["ok"] = rep.ok;
    d["rate"] = rep.rate;
    d["violations"] = rep.violations;
    py::list rows;
    for (const auto& r : rep.rows) {
        py::dict rd;
        rd["edge"] = r.edge_id;
        rd["capacity"] = r.infinite ? std::string("inf") : rat_str(r.cap);
        rd["entropy"] = r.entropy;
        rd["support"] = r.support;
        rd["method"] = r.method;
        rd["pass"] = r.pass;
        rows.append(rd);
    }
    d["edges"] = rows;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "boolean circuits, k-pairs network coding and concurrent-flow certificates";
    m.attr("__version__") = "0.1.0";

    py::register_exception<InputError>(m, "InputError");

    py::class_<Circuit>(m, "Circuit")
        .def_property_readonly("n_in", [](const Circuit& c) { return c.n_in; })
        .def_property_readonly("n_out", [](const Circuit& c) { return c.n_out; })
        .def_property_readonly("size", [](const Circuit& c) { return c.size(); })
        .def_property_readonly("edge_count", [](const Circuit& c) { return c.edges.size(); })
        .def("__repr__", [](const Circuit& c) {
            std::ostringstream s;
            s << "<Circuit " << c.size() << " nodes, " << c.edges.size() << " edges, " << c.n_in
              << " in, " << c.n_out << " out>";
            return s.str();
        });

    m.def("shift_oracle",
          [](const std::string& x, int l, bool cyclic) {
              const auto xb = to_bits(x);
              return bits_str(shift_oracle({int(xb.size()), cyclic}, xb, l));
          },
          py::arg("x"), py::arg("l"), py::arg("cyclic") = false);
    m.def("mult_oracle", [](const std::string& a, const std::string& b) {
        return bits_str(mult_oracle(to_bits(a), to_bits(b)));
    });

    m.def("build_barrel_shifter", &build_barrel_shifter, py::arg("n"));
    m.def("build_depth3_identity", &build_depth3_identity, py::arg("n"), py::arg("window") = 1);
    m.def("build_depth3_shift",
          [](int n, double eps, const std::string& enc, bool cyclic) {
              const auto r = build_depth3_shift(
                  n, eps, enc == "binary" ? ShiftEncoding::Binary : ShiftEncoding::OneHot, cyclic);
              py::dict d;
              d["circuit"] = r.circuit;
              d["eps_achieved"] = r.eps_achieved;
              d["middle_size"] = r.middle_size;
              d["xy_degree"] = r.c_xy;
              return d;
          },
          py::arg("n"), py::arg("eps"), py::arg("encoding") = "onehot", py::arg("cyclic") = false);

    m.def("evaluate", [](const Circuit& c, const std::string& bits) {
        return bits_str(evaluate(c, to_bits(bits)));
    });
    m.def("evaluate_shift",
          [](const Circuit& c, const std::string& x, int l) {
              const auto xb = to_bits(x);
              const int block = c.n_in - int(xb.size());
              const ShiftEncoding enc = block == int(xb.size()) ? ShiftEncoding::OneHot
                                                                : ShiftEncoding::Binary;
              return bits_str(evaluate(c, shift_input(xb, l, enc)));
          },
          py::arg("circuit"), py::arg("x"), py::arg("l"));
    m.def("hardwire", [](const Circuit& c, const std::vector<std::pair<int, int>>& asg) {
        std::vector<std::pair<int, uint8_t>> a;
        for (auto [node, b] : asg) a.push_back({node, uint8_t(b)});
        return hardwire(c, a);
    });
    m.def("undirected_distances",
          [](const Circuit& c, int from) { return undirected_distances(c, from); });
    m.def("ball_size",
          [](const Circuit& c, int from, int radius) { return ball_size(c, from, radius); });
    m.def("degree_profile", [](const Circuit& c) {
        const auto p = degree_profile(c);
        py::dict d;
        d["max_in"] = p.max_in;
        d["max_out"] = p.max_out;
        d["max_undirected"] = p.max_undirected;
        d["avg_undirected"] = double(p.avg_undirected);
        return d;
    });
    m.def("split_high_degree", &split_high_degree, py::arg("circuit"), py::arg("threshold"));

    m.def("load_circuit", &load_circuit_file, py::arg("path"));
    m.def("save_circuit", [](const Circuit& c, const std::string& path) {
        save_circuit_file(path, c);
    });
    m.def("circuit_text", [](const Circuit& c) {
        std::ostringstream s;
        save_circuit(s, c);
        return s.str();
    });

    m.def("lemma_budget",
          [](double n, double m_, double eps) {
              const auto b = lemma_budget(n, m_, eps);
              py::dict d;
              d["value"] = b.value;
              d["terms"] = py::make_tuple(b.term_linear, b.term_log, b.term_tail);
              d["eps_zero_flagged"] = b.eps_zero_flagged;
              return d;
          },
          py::arg("n"), py::arg("m"), py::arg("eps"));
    m.def("largest_eps_within_5nk", &largest_eps_within_5nk, py::arg("k"));

    m.def("correction_cost",
          [](int n, int m_, const std::vector<uint64_t>& family) {
              GameSpec spec;
              spec.n = n;
              spec.m = m_;
              spec.family = family.empty() ? full_family(n) : family;
              CorrectionGame game(spec);
              const auto ec = game.expected_cost(std::max(n, 1));
              py::list per;
              for (const auto& c : ec.per_player) per.append(double(c));
              py::dict d;
              d["per_player"] = per;
              d["total"] = double(ec.total);
              d["eps"] = game.spec().epsilon();
              return d;
          },
          py::arg("n"), py::arg("m"), py::arg("family") = std::vector<uint64_t>{});
    m.def("correction_play",
          [](int n, int m_, const std::vector<uint64_t>& family, uint64_t beta) {
              GameSpec spec;
              spec.n = n;
              spec.m = m_;
              spec.family = family.empty() ? full_family(n) : family;
              CorrectionGame game(spec);
              const auto t = game.play(beta);
              py::dict d;
              d["target"] = t.target;
              py::list msgs, outs;
              for (const auto& msg : t.messages) msgs.append(msg.str());
              for (auto chi : t.outputs) outs.append(chi);
              d["messages"] = msgs;
              d["outputs"] = outs;
              d["total_bits"] = t.total_bits;
              return d;
          },
          py::arg("n"), py::arg("m"), py::arg("family"), py::arg("beta"));
    m.def("random_family", &random_family, py::arg("n"), py::arg("size"), py::arg("seed"));

    m.def("flow_rate",
          [](const std::string& instance_path, bool exact) {
              const auto inst = load_instance_file(instance_path);
              const auto f = undirect(inst);
              const auto sol = max_concurrent_flow(f, exact ? LpMode::Exact : LpMode::Float);
              py::dict d;
              d["rate"] = sol.rate;
              if (sol.rate_exact) d["rate_exact"] = rat_str(*sol.rate_exact);
              d["self_check"] = verify_flow(f, sol).pass;
              return d;
          },
          py::arg("instance_path"), py::arg("exact") = false);

    m.def("coding_rate",
          [](const std::string& instance_path, const std::string& solution_path, int budget) {
              const auto inst = load_instance_file(instance_path);
              const auto sol = load_solution_file(solution_path, inst);
              py::dict d = rate_to_dict(measure_rate(inst, sol, budget));
              d["correct"] = verify_correctness(inst, sol, budget).pass;
              return d;
          },
          py::arg("instance_path"), py::arg("solution_path"), py::arg("budget") = 20);

    m.def("certify_a",
          [](const Circuit& c, bool strict, bool cyclic) {
              CertifyOptions opts;
              opts.strict = strict;
              opts.cyclic = cyclic;
              return cert_to_dict(certify_A(c, opts));
          },
          py::arg("circuit"), py::arg("strict") = false, py::arg("cyclic") = false);
    m.def("certify_b",
          [](const Circuit& c, int k, bool strict, bool cyclic, int split_threshold) {
              CertifyOptions opts;
              opts.strict = strict;
              opts.cyclic = cyclic;
              opts.split_threshold = split_threshold;
              return cert_to_dict(certify_B(c, k, opts));
          },
          py::arg("circuit"), py::arg("k"), py::arg("strict") = false, py::arg("cyclic") = false,
          py::arg("split_threshold") = 0);
}
