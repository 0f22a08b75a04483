// netshift command line: circuit generators, evaluation, circuit-to-network
// reductions, concurrent-flow LP, coding-rate measurement, the correction
// game, and certificate chains.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netshift/circuit_io.hpp"
#include "netshift/netcode_io.hpp"
#include "netshift/reduction.hpp"

using namespace netshift;

namespace {

constexpr const char* kVersion = "netshift 0.1.0";

struct OutputTarget {
    std::string path;  // empty = stdout
    void write(const std::string& content) const {
        if (path.empty()) {
            std::cout << content;
        } else {
            std::ofstream f(path);
            if (!f) throw InputError("cannot open " + path + " for writing");
            f << content;
        }
    }
};

std::string header(const std::string& config_echo, uint64_t seed) {
    std::ostringstream h;
    h << "# " << kVersion << "\n# config: " << config_echo << "\n# seed: " << seed << "\n";
    return h.str();
}

ShiftEncoding parse_encoding(const std::string& s) {
    if (s == "binary") return ShiftEncoding::Binary;
    if (s == "onehot") return ShiftEncoding::OneHot;
    throw CLI::ValidationError("--encoding must be binary or onehot");
}

int run(int argc, char** argv) {
    CLI::App app{"boolean circuits, k-pairs network coding and concurrent-flow certificates"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate a circuit");
    gen->require_subcommand(1);
    std::string gen_out;
    int gen_n = 8, gen_window = 1;
    double gen_eps = 0.5;
    std::string gen_enc = "onehot";
    bool gen_cyclic = false;

    auto* gb = gen->add_subcommand("barrel", "logarithmic shifter, binary shift block");
    gb->add_option("--n", gen_n, "data width (power of two)")->required();
    gb->add_option("-o,--output", gen_out, "output file (default stdout)");

    auto* gi = gen->add_subcommand("depth3-id", "depth-3 identity, empty middle layer");
    gi->add_option("--n", gen_n, "data width")->required();
    gi->add_option("--window", gen_window, "inputs wired per output");
    gi->add_option("-o,--output", gen_out, "output file (default stdout)");

    auto* gs = gen->add_subcommand("depth3-shift", "depth-3 shifter with selector middle layer");
    gs->add_option("--n", gen_n, "data width (power of two, <= 16)")->required();
    gs->add_option("--eps", gen_eps, "middle-layer budget as a fraction of n");
    gs->add_option("--encoding", gen_enc, "shift block encoding: binary|onehot");
    gs->add_flag("--cyclic", gen_cyclic, "cyclic shift outputs");
    gs->add_option("-o,--output", gen_out, "output file (default stdout)");

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "evaluate a circuit on one input");
    std::string ev_circ, ev_x, ev_bits;
    int ev_j = 0;
    ev->add_option("circuit", ev_circ, "circuit file")->required();
    ev->add_option("--x", ev_x, "data bits (x_1 first)");
    ev->add_option("--j", ev_j, "shift index l in [1,n], appended per the circuit's encoding");
    ev->add_option("--bits", ev_bits, "raw full input bits (alternative to --x/--j)");

    // ---- flow ----
    auto* fl = app.add_subcommand("flow", "maximum concurrent flow of an instance (undirected)");
    std::string fl_inst, fl_csv;
    bool fl_exact = false, fl_retain = false;
    fl->add_option("--instance", fl_inst, "instance file")->required();
    fl->add_flag("--exact", fl_exact, "exact rational simplex");
    fl->add_flag("--retain-injectors", fl_retain, "keep message-delivery nodes in the graph");
    fl->add_option("--csv", fl_csv, "write per-edge flows as CSV");

    // ---- coding ----
    auto* co = app.add_subcommand("coding", "verify and rate a coding solution");
    std::string co_inst, co_sol, co_csv;
    int co_budget = 20;
    co->add_option("--instance", co_inst, "instance file")->required();
    co->add_option("--solution", co_sol, "solution file")->required();
    co->add_option("--budget", co_budget, "max total message bits to enumerate")
        ->check(CLI::Range(0, 30));
    co->add_option("--csv", co_csv, "write the rate report as CSV");

    // ---- correction ----
    auto* cor = app.add_subcommand("correction", "family-correction game");
    cor->require_subcommand(1);
    std::string cor_family;
    int cor_n = 12, cor_m = 3, cor_budget = 24;
    uint64_t cor_seed = 0, cor_mc = 0, cor_randsize = 0;
    std::string cor_beta;

    auto* cc = cor->add_subcommand("cost", "expected message cost per player");
    cc->add_option("--n", cor_n, "string length")->required();
    cc->add_option("--m", cor_m, "player count (divides n)")->required();
    cc->add_option("--family", cor_family, "family file (hex members / fixedbits)");
    cc->add_option("--random-size", cor_randsize, "use a seeded random family of this size");
    cc->add_option("--seed", cor_seed, "seed for random families / sampling");
    cc->add_option("--mc", cor_mc, "Monte-Carlo samples when n exceeds the budget");
    cc->add_option("--budget", cor_budget, "max n for exact enumeration")->check(CLI::Range(0, 30));

    auto* cp = cor->add_subcommand("play", "one round against a fixed beta");
    cp->add_option("--n", cor_n, "string length")->required();
    cp->add_option("--m", cor_m, "player count (divides n)")->required();
    cp->add_option("--family", cor_family, "family file");
    cp->add_option("--random-size", cor_randsize, "use a seeded random family of this size");
    cp->add_option("--seed", cor_seed, "seed for random families");
    cp->add_option("--beta", cor_beta, "beta bits (beta_1 first)")->required();

    auto* ck = cor->add_subcommand("check", "prefix-freedom and source-coding bound");
    ck->add_option("--n", cor_n, "string length")->required();
    ck->add_option("--m", cor_m, "player count (divides n)")->required();
    ck->add_option("--family", cor_family, "family file");
    ck->add_option("--random-size", cor_randsize, "use a seeded random family of this size");
    ck->add_option("--seed", cor_seed, "seed for random families");
    ck->add_option("--budget", cor_budget, "max n for exact enumeration")->check(CLI::Range(0, 30));

    // ---- reduce ----
    auto* rd = app.add_subcommand("reduce", "build the network instance from a circuit");
    rd->require_subcommand(1);
    std::string rd_circ, rd_out;
    int rd_k = 4, rd_data = 0;
    bool rd_cyclic = false;

    auto* ra = rd->add_subcommand("A", "bounded-degree route: circuit graph as the network");
    ra->add_option("--circuit", rd_circ, "circuit file")->required();
    ra->add_flag("--cyclic", rd_cyclic, "cyclic pairing");
    ra->add_option("--data-bits", rd_data, "data width override");
    ra->add_option("-o,--output", rd_out, "write the instance (default stdout)");

    auto* rb = rd->add_subcommand("B", "depth-3 route: hub network around the 2-layer circuit");
    rb->add_option("--circuit", rd_circ, "circuit file")->required();
    rb->add_option("--k", rd_k, "block size (divides the data width)")->required();
    rb->add_flag("--cyclic", rd_cyclic, "cyclic pairing");
    rb->add_option("--data-bits", rd_data, "data width override");
    rb->add_option("-o,--output", rd_out, "write the instance (default stdout)");

    // ---- certify ----
    auto* ce = app.add_subcommand("certify", "evaluate the full inequality chain");
    ce->require_subcommand(1);
    std::string ce_circ, ce_csv;
    int ce_k = 4, ce_data = 0, ce_budget = 20, ce_split = 0;
    double ce_eps = 0.0;
    bool ce_cyclic = false, ce_strict = false, ce_exact = false;
    uint64_t ce_seed = 0;

    auto* ca = ce->add_subcommand("A", "bounded-degree chain");
    ca->add_option("--circuit", ce_circ, "circuit file")->required();
    ca->add_flag("--cyclic", ce_cyclic, "cyclic pairing");
    ca->add_flag("--strict", ce_strict, "vacuous steps become failures");
    ca->add_flag("--exact", ce_exact, "exact rational LP");
    ca->add_option("--data-bits", ce_data, "data width override");
    ca->add_option("--budget", ce_budget, "enumeration budget in bits")->check(CLI::Range(0, 30));
    ca->add_option("--seed", ce_seed, "report seed echo");
    ca->add_option("--csv", ce_csv, "write the certificate as CSV");

    auto* cb = ce->add_subcommand("B", "depth-3 chain");
    cb->add_option("--circuit", ce_circ, "circuit file")->required();
    cb->add_option("--k", ce_k, "block size")->required();
    cb->add_option("--eps", ce_eps, "claimed middle-layer bound (0 = skip the claim step)");
    cb->add_flag("--cyclic", ce_cyclic, "cyclic pairing");
    cb->add_flag("--strict", ce_strict, "vacuous steps become failures");
    cb->add_flag("--exact", ce_exact, "exact rational LP");
    cb->add_option("--split-threshold", ce_split, "reroute X-Y edges above this degree first");
    cb->add_option("--data-bits", ce_data, "data width override");
    cb->add_option("--budget", ce_budget, "enumeration budget in bits")->check(CLI::Range(0, 30));
    cb->add_option("--seed", ce_seed, "report seed echo");
    cb->add_option("--csv", ce_csv, "write the certificate as CSV");

    CLI11_PARSE(app, argc, argv);

    auto load_named_family = [&](int n) -> std::vector<uint64_t> {
        if (!cor_family.empty()) return load_family_file(cor_family, n);
        if (cor_randsize > 0) return random_family(n, cor_randsize, cor_seed);
        return full_family(n);
    };
    auto config_echo = [&](const CLI::App* sub) {
        std::string s = sub->get_name();
        for (const auto* o : sub->get_options()) {
            if (o->count() == 0 || o->get_name().empty()) continue;
            s += " " + o->get_name() + "=" + o->as<std::string>();
        }
        return s;
    };

    if (gb->parsed() || gi->parsed() || gs->parsed()) {
        Circuit c;
        std::ostringstream meta;
        if (gb->parsed()) {
            c = build_barrel_shifter(gen_n);
            meta << "barrel shifter n=" << gen_n << " shift block: binary l-1, bit 1 least significant";
        } else if (gi->parsed()) {
            c = build_depth3_identity(gen_n, gen_window);
            meta << "depth-3 identity n=" << gen_n << " window=" << gen_window;
        } else {
            const auto r = build_depth3_shift(gen_n, gen_eps, parse_encoding(gen_enc), gen_cyclic);
            c = r.circuit;
            meta << "depth-3 shifter n=" << gen_n << " encoding=" << gen_enc
                 << (gen_cyclic ? " cyclic" : "") << "\nachieved eps=" << fmt_double(r.eps_achieved)
                 << " middle=" << r.middle_size << " xy-degree-c=" << r.c_xy;
        }
        std::ostringstream out;
        save_circuit(out, c, meta.str());
        OutputTarget{gen_out}.write(out.str());
        return 0;
    }

    if (ev->parsed()) {
        const Circuit c = load_circuit_file(ev_circ);
        std::vector<uint8_t> full;
        if (!ev_bits.empty()) {
            full = parse_bits(ev_bits);
        } else {
            const auto x = parse_bits(ev_x);
            const int n = int(x.size());
            const int block = c.n_in - n;
            if (block == 0 && ev_j == 0) {
                full = x;
            } else {
                ShiftEncoding enc;
                if (block == int(ceil_log2(uint32_t(n))))
                    enc = ShiftEncoding::Binary;
                else if (block == n)
                    enc = ShiftEncoding::OneHot;
                else
                    throw InputError("cannot deduce the shift encoding from the input counts; use --bits");
                if (ev_j < 1 || ev_j > n) throw InputError("--j must lie in [1,n]");
                full = shift_input(x, ev_j, enc);
            }
        }
        std::cout << bits_str(evaluate(c, full)) << "\n";
        return 0;
    }

    if (fl->parsed()) {
        const auto inst = load_instance_file(fl_inst);
        const auto f = undirect(inst, fl_retain);
        const auto sol = max_concurrent_flow(f, fl_exact ? LpMode::Exact : LpMode::Float);
        const auto ver = verify_flow(f, sol);
        std::ostringstream out;
        out << header(config_echo(fl), 0);
        out << "rate: " << fmt_double(sol.rate);
        if (sol.rate_exact) out << " (exact " << rat_str(*sol.rate_exact) << ")";
        out << "\n";
        if (!sol.disconnected_pairs.empty()) out << "disconnected pairs flagged; rate forced to 0\n";
        for (int i : sol.degenerate_pairs) out << "pair " << i + 1 << " degenerate (s = t), excluded\n";
        out << "self-check: " << (ver.pass ? "pass" : "FAIL") << "\n";
        for (const auto& v : ver.violations) out << "  " << v.what << "\n";
        std::cout << out.str();
        if (!fl_csv.empty()) {
            std::ostringstream csv;
            write_flow_csv(csv, f, sol);
            OutputTarget{fl_csv}.write(csv.str());
        }
        return ver.pass ? 0 : 1;
    }

    if (co->parsed()) {
        const auto inst = load_instance_file(co_inst);
        const auto sol = load_solution_file(co_sol, inst);
        const auto ver = verify_correctness(inst, sol, co_budget);
        const auto rep = measure_rate(inst, sol, co_budget);
        std::ostringstream out;
        out << header(config_echo(co), 0);
        out << "correct: " << (ver.pass ? "yes" : "NO " + ver.detail) << "\n";
        write_rate_text(out, rep);
        std::cout << out.str();
        if (!co_csv.empty()) {
            std::ostringstream csv;
            write_rate_csv(csv, rep);
            OutputTarget{co_csv}.write(csv.str());
        }
        return (ver.pass && rep.ok) ? 0 : 1;
    }

    if (cc->parsed() || cp->parsed() || ck->parsed()) {
        GameSpec spec;
        spec.n = cor_n;
        spec.m = cor_m;
        spec.family = load_named_family(cor_n);
        CorrectionGame game(spec);
        std::ostringstream out;
        if (cc->parsed()) {
            out << header(config_echo(cc), cor_seed);
            const auto ec = game.expected_cost(
                cor_budget, cor_mc > 0 ? std::optional<uint64_t>(cor_mc) : std::nullopt, cor_seed);
            out << "family size: " << spec.family.size()
                << "  eps: " << fmt_double(game.spec().epsilon()) << "\n";
            Rat total = 0;
            for (int l = 0; l < spec.m; ++l) {
                out << "player " << l + 1 << ": E|R| = " << rat_str(ec.per_player[l]) << " ("
                    << fmt_double(double(ec.per_player[l])) << ")\n";
                total += ec.per_player[l];
            }
            out << "total: " << rat_str(total) << " (" << fmt_double(double(total)) << ")";
            if (!ec.exact)
                out << "  [Monte-Carlo " << ec.samples << " samples, 95% halfwidth "
                    << fmt_double(ec.confidence_halfwidth) << "]";
            out << "\n";
            const auto lb = lemma_budget(cor_n, cor_m, game.spec().epsilon());
            out << "three-term budget: " << fmt_double(lb.value) << "\n";
        } else if (cp->parsed()) {
            out << header(config_echo(cp), cor_seed);
            const auto beta_bits = parse_bits(cor_beta);
            if (int(beta_bits.size()) != cor_n) throw InputError("--beta must have n bits");
            uint64_t beta = 0;
            for (int i = 0; i < cor_n; ++i)
                if (beta_bits[i]) beta |= uint64_t{1} << i;
            const auto t = game.play(beta);
            out << "target: ";
            for (int i = 0; i < cor_n; ++i) out << (((t.target >> i) & 1) ? '1' : '0');
            out << "\n";
            for (int l = 0; l < spec.m; ++l) {
                out << "player " << l + 1 << ": R = " << t.messages[l].str() << "  chi = ";
                for (int i = 0; i < spec.block_bits(); ++i)
                    out << (((t.outputs[l] >> i) & 1) ? '1' : '0');
                out << "\n";
            }
            out << "total bits: " << t.total_bits << "\n";
        } else {
            out << header(config_echo(ck), cor_seed);
            const auto rep = game.verify_prefix_free(cor_budget);
            out << "prefix-free: " << (rep.prefix_free ? "pass" : "FAIL") << "\n";
            for (const auto& v : rep.violations) out << "  " << v << "\n";
            for (int l = 0; l < spec.m; ++l)
                out << "player " << l + 1 << ": H(R) = " << fmt_double(rep.entropy[l])
                    << "  E|R| = " << rat_str(rep.mean_len[l])
                    << "  kraft = " << rat_str(rep.kraft_sum[l]) << "\n";
            out << "E|R| >= H(R): " << (rep.expectation_dominates ? "pass" : "FAIL") << "\n";
            std::cout << out.str();
            return (rep.prefix_free && rep.expectation_dominates) ? 0 : 1;
        }
        std::cout << out.str();
        return 0;
    }

    if (ra->parsed() || rb->parsed()) {
        const Circuit c = load_circuit_file(rd_circ);
        std::ostringstream out;
        if (ra->parsed()) {
            const int n = rd_data > 0 ? rd_data : (rd_cyclic ? c.n_out : c.n_out / 2);
            const auto chosen = choose_shift_A(c, n, rd_cyclic);
            auto built = build_instance_A(c, n, chosen.l0,
                                          c.n_in - n == n ? ShiftEncoding::OneHot
                                                          : ShiftEncoding::Binary,
                                          rd_cyclic);
            std::ostringstream hdr;
            hdr << "route A instance: n=" << n << " l0=" << chosen.l0
                << " far-count=" << chosen.far_count << " degree-c=" << chosen.degree_c;
            save_instance(out, built.instance, hdr.str());
        } else {
            const auto shape = analyze_depth3(c, rd_data > 0 ? std::optional<int>(rd_data)
                                                             : std::nullopt);
            const int n = shape.n_data;
            const ShiftEncoding enc =
                shape.n_shift == n ? ShiftEncoding::OneHot : ShiftEncoding::Binary;
            const int alpha0 = shape.n_shift > 0 ? choose_alpha_B(c, shape, rd_k, rd_cyclic).alpha0 : 1;
            auto ex = extract_family(c, shape, alpha0, enc);
            auto built = build_network_B(ex.gamma, analyze_depth3(ex.gamma, n), alpha0, ex.family,
                                         rd_k, rd_cyclic);
            std::ostringstream hdr;
            hdr << "route B instance: n=" << n << " k=" << rd_k << " alpha0=" << alpha0
                << " family-size=" << ex.family.size() << " cost-total="
                << rat_str(built.cost_total);
            save_instance(out, built.instance, hdr.str());
        }
        OutputTarget{rd_out}.write(out.str());
        return 0;
    }

    if (ca->parsed() || cb->parsed()) {
        const Circuit c = load_circuit_file(ce_circ);
        CertifyOptions opts;
        opts.strict = ce_strict;
        opts.cyclic = ce_cyclic;
        opts.lp_mode = ce_exact ? LpMode::Exact : LpMode::Float;
        opts.budget_bits = ce_budget;
        opts.split_threshold = ce_split;
        if (ce_data > 0) opts.data_bits = ce_data;
        if (ce_eps > 0) opts.eps_claim = ce_eps;
        const Certificate cert = ca->parsed() ? certify_A(c, opts) : certify_B(c, ce_k, opts);
        std::ostringstream out;
        out << header(config_echo(ca->parsed() ? (const CLI::App*)ca : (const CLI::App*)cb), ce_seed);
        write_certificate_text(out, cert);
        std::cout << out.str();
        if (!ce_csv.empty()) {
            std::ostringstream csv;
            csv << header(config_echo(ca->parsed() ? (const CLI::App*)ca : (const CLI::App*)cb),
                          ce_seed);
            write_certificate_csv(csv, cert);
            OutputTarget{ce_csv}.write(csv.str());
        }
        return cert.verdict ? 0 : 1;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
