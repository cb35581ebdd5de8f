#include "bnlie/run.hpp"

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace bnlie {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

void only_keys(const json& o, const std::set<std::string>& keys, const std::string& path) {
    if (!o.is_object()) fail(path, "expected an object");
    for (auto it = o.begin(); it != o.end(); ++it)
        if (!keys.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

const json& need(const json& o, const std::string& key, const std::string& path) {
    if (!o.contains(key)) fail(path + "." + key, "missing");
    return o.at(key);
}

double get_num(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& path, int lo) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > 1000000) fail(path, "out of range");
    return int(x);
}

double get_pos(const json& v, const std::string& path) {
    const double x = get_num(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

cplx get_cplx(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(path, "expected [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

RootSet get_roots(const json& v, const std::string& path, RootFamily fam, const ModelSpec& spec) {
    if (!v.is_array()) fail(path, "expected a list of [re, im]");
    RootSet r{{}, fam};
    for (std::size_t i = 0; i < v.size(); ++i) r.roots.push_back(get_cplx(v[i], path + "[" + std::to_string(i) + "]"));
    if (int(r.size()) != spec.N) fail(path, "expected N = " + std::to_string(spec.N) + " roots");
    try {
        check_distinct(r, spec.mp);
    } catch (const DomainError& e) {
        fail(path, e.what());
    }
    const double c = constraint_residual(r, spec);
    if (c > 1e-10) {
        std::ostringstream os;
        os << "roots violate the " << (fam == RootFamily::Delta ? "sum" : "product") << " constraint (residual " << c
           << ")";
        fail(path, os.str());
    }
    return r;
}

json hill_json(const HillFactorization& hf) {
    json d = json::array();
    for (cplx z : hf.delta.roots) d.push_back(to_json(z));
    return {{"delta", d},
            {"h_const", to_json(hf.h_const)},
            {"residual", hf.residual},
            {"sum_residual", hf.sum_residual},
            {"newton_iterations", hf.newton_iterations},
            {"ladder_rungs", hf.ladder_rungs}};
}

json nlie_json(const NlieSolution& s) {
    return {{"contour", {{"dual", s.contour.dual}, {"s0", s.contour.s0}, {"n_nodes", s.contour.n}}},
            {"iterations", s.iterations},
            {"converged", s.converged},
            {"certified", s.certified},
            {"contraction_estimate", s.contraction_estimate},
            {"observed_ratio", s.observed_ratio},
            {"update", s.update}};
}

json roots_json(const RootSet& r) {
    json a = json::array();
    for (cplx z : r.roots) a.push_back(to_json(z));
    return a;
}

json list_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (cplx z : v) a.push_back(to_json(z));
    return a;
}

json bethe_json(const BetheState& s) {
    return {{"delta", roots_json(s.delta)},
            {"xi", to_json(s.xi)},
            {"residuals", list_json(s.residuals)},
            {"residual_norm", s.residual_norm},
            {"converged", s.converged},
            {"iterations", s.iterations},
            {"trace", s.trace},
            {"diagnostic", s.diagnostic}};
}

json spectrum_json(const SpectrumResult& r) {
    return {{"newton_sums", list_json(r.newton_sums)},
            {"newton_sums_dual", list_json(r.newton_sums_dual)},
            {"elementary_syms", list_json(r.elementary_syms)},
            {"elementary_syms_dual", list_json(r.elementary_syms_dual)},
            {"tau", roots_json(r.tau)},
            {"tau_dual", roots_json(r.tau_dual)},
            {"shifts", r.shifts},
            {"shifts_dual", r.shifts_dual},
            {"crosscheck_direct", r.crosscheck_direct},
            {"crosscheck_dual", r.crosscheck_dual},
            {"crosscheck_residual", r.crosscheck_residual},
            {"correction_direct", r.correction_direct},
            {"correction_dual", r.correction_dual},
            {"warning", r.warning}};
}

std::string csv_of(const NlieSolution& s) {
    std::ostringstream os;
    write_csv(os, s);
    return os.str();
}

std::string hill_grid_csv(const HillFactorization& hf, const RootSet& tau, const ModelSpec& spec) {
    std::ostringstream os;
    os << "re_lambda,im_lambda,re_H,im_H,re_Hfact,im_Hfact\n" << std::setprecision(17);
    for (cplx l : hf.grid) {
        const cplx h = hill_det(l, tau, spec), f = hill_factorized(l, hf, tau, spec);
        os << l.real() << ',' << l.imag() << ',' << h.real() << ',' << h.imag() << ',' << f.real() << ',' << f.imag()
           << '\n';
    }
    return os.str();
}

std::string q_grid_csv(const QSolution& qp, const QSolution& qm, int n) {
    std::ostringstream os;
    os << "x,y,re_lambda,im_lambda,re_qplus,im_qplus,re_qminus,im_qminus\n" << std::setprecision(17);
    const ModularPair& mp = qp.spec.mp;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -0.5 + (i + 0.5) / n, y = -0.5 + (j + 0.5) / n;
            const cplx l = mp.point(x, y);
            try {
                const cplx a = q_eval(qp, l), b = q_eval(qm, l);
                os << x << ',' << y << ',' << l.real() << ',' << l.imag() << ',' << a.real() << ',' << a.imag() << ','
                   << b.real() << ',' << b.imag() << '\n';
            } catch (const PoleError&) {
                // grid point on a pole: left out
            }
        }
    return os.str();
}

bool reality_applicable(const ModelSpec& s) {
    return s.kind == ModelKind::QToda && std::abs(s.mp.omega1() - std::conj(s.mp.omega2())) < 1e-14 &&
           s.kappa.imag() == 0.0 && s.p0.imag() == 0.0 && !s.rho_zero;
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Suite& s) {
    json o = json::object();
    for (const auto& c : s.checks) {
        json e = {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
        if (!c.note.empty()) e["note"] = c.note;
        o[c.name] = e;
    }
    return o;
}

RunConfig parse_config(const json& j) {
    only_keys(j, {"model", "periods", "rho_override", "contour", "truncation", "solver", "seeds", "outputs"}, "$");
    RunConfig c;
    c.echo = j;

    const json& m = need(j, "model", "$");
    only_keys(m, {"kind", "N", "kappa", "p0"}, "$.model");
    const json& kind = need(m, "kind", "$.model");
    if (!kind.is_string() || (kind != "qtoda" && kind != "toda2")) fail("$.model.kind", "expected \"qtoda\" or \"toda2\"");
    const int N = get_int(need(m, "N", "$.model"), "$.model.N", 1);
    const cplx kappa = get_cplx(need(m, "kappa", "$.model"), "$.model.kappa");
    const cplx p0 = m.contains("p0") ? get_cplx(m.at("p0"), "$.model.p0") : cplx(0.0);

    const json& p = need(j, "periods", "$");
    only_keys(p, {"omega1", "omega2"}, "$.periods");
    const cplx w1 = get_cplx(need(p, "omega1", "$.periods"), "$.periods.omega1");
    const cplx w2 = get_cplx(need(p, "omega2", "$.periods"), "$.periods.omega2");
    try {
        const ModularPair mp(w1, w2);
        c.spec = ModelSpec::make(kind == "qtoda" ? ModelKind::QToda : ModelKind::Toda2, N, kappa, p0, mp);
    } catch (const DomainError& e) {
        fail("$.periods", e.what());
    }
    if (j.contains("rho_override")) {
        const json& r = j.at("rho_override");
        if (r.is_string() && r == "zero")
            c.spec = c.spec.with_rho_zero();
        else
            c.spec = c.spec.with_log_rho(get_cplx(r, "$.rho_override"));
    }
    if (c.spec.kind == ModelKind::Toda2) {
        try {
            c.spec.check_gate();
        } catch (const DomainError& e) {
            fail("$.model", e.what());
        }
    }

    if (j.contains("contour")) {
        const json& k = j.at("contour");
        only_keys(k, {"x0", "n_nodes", "x0_dual", "n_nodes_dual"}, "$.contour");
        if (k.contains("x0")) c.x0 = get_num(k.at("x0"), "$.contour.x0");
        if (k.contains("x0_dual")) c.x0_dual = get_num(k.at("x0_dual"), "$.contour.x0_dual");
        if (k.contains("n_nodes")) c.n_nodes = get_int(k.at("n_nodes"), "$.contour.n_nodes", 8);
        if (k.contains("n_nodes_dual")) c.n_nodes_dual = get_int(k.at("n_nodes_dual"), "$.contour.n_nodes_dual", 8);
        if (std::abs(c.x0) >= 0.5 || std::abs(c.x0_dual) >= 0.5) fail("$.contour", "x0 must lie in (-1/2, 1/2)");
    }
    if (j.contains("truncation")) {
        const json& t = j.at("truncation");
        only_keys(t, {"tol", "n_min", "n_max"}, "$.truncation");
        if (t.contains("tol")) c.truncation.tol = get_pos(t.at("tol"), "$.truncation.tol");
        if (t.contains("n_min")) c.truncation.n_min = get_int(t.at("n_min"), "$.truncation.n_min", 1);
        if (t.contains("n_max")) c.truncation.n_max = get_int(t.at("n_max"), "$.truncation.n_max", 1);
        if (c.truncation.n_max < c.truncation.n_min) fail("$.truncation.n_max", "must not be below n_min");
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        only_keys(s, {"tol", "max_iter", "damping"}, "$.solver");
        if (s.contains("tol")) c.solver_tol = get_pos(s.at("tol"), "$.solver.tol");
        if (s.contains("max_iter")) c.solver_max_iter = get_int(s.at("max_iter"), "$.solver.max_iter", 1);
        if (s.contains("damping")) c.damping = get_int(s.at("damping"), "$.solver.damping", 0);
    }
    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        only_keys(s, {"tau", "tau_dual", "delta"}, "$.seeds");
        if (s.contains("tau")) c.tau = get_roots(s.at("tau"), "$.seeds.tau", RootFamily::TauDirect, c.spec);
        if (s.contains("tau_dual"))
            c.tau_dual = get_roots(s.at("tau_dual"), "$.seeds.tau_dual", RootFamily::TauDual, c.spec);
        else if (c.tau) {
            if (c.spec.kind == ModelKind::Toda2) fail("$.seeds.tau_dual", "missing (required for toda2)");
            c.tau_dual = get_roots(s.at("tau"), "$.seeds.tau", RootFamily::TauDual, c.spec);
        }
        if (s.contains("delta")) c.delta = get_roots(s.at("delta"), "$.seeds.delta", RootFamily::Delta, c.spec);
        if (!c.tau && !c.delta) fail("$.seeds", "needs a tau or a delta list");
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        only_keys(o, {"directory", "emit_csv", "emit_grid"}, "$.outputs");
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) fail("$.outputs.directory", "expected a string");
            c.directory = o.at("directory").get<std::string>();
        }
        if (o.contains("emit_csv")) c.emit_csv = get_bool(o.at("emit_csv"), "$.outputs.emit_csv");
        if (o.contains("emit_grid")) c.emit_grid = get_bool(o.at("emit_grid"), "$.outputs.emit_grid");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot read config");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"specfun-check", "hill", "nlie", "bethe", "spectrum", "verify"};
    return s;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, p);
}

RunResult run_command(const std::string& cmd, const RunConfig& cfg, const RunOptions& opt) {
    if (std::find(subcommands().begin(), subcommands().end(), cmd) == subcommands().end())
        throw ConfigError("unknown subcommand '" + cmd + "'");
    const ModelSpec& spec = cfg.spec;
    const bool wants_tau = cmd == "hill" || cmd == "nlie";
    if (wants_tau && !cfg.tau) throw ConfigError("$.seeds.tau: required by '" + cmd + "'");
    if ((cmd == "bethe" || cmd == "spectrum") && !cfg.tau && !cfg.delta)
        throw ConfigError("$.seeds: required by '" + cmd + "'");

    RunResult out;
    json& res = out.results;
    res["command"] = cmd;
    res["config"] = cfg.echo;
    json timings = json::object();
    std::map<std::string, std::string> files;
    using clock = std::chrono::steady_clock;
    auto timed = [&](const std::string& name, auto&& f) {
        const auto t0 = clock::now();
        f();
        timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
    };

    NlieConfig ncfg;
    ncfg.threads = std::max(1, opt.threads);
    BetheConfig bcfg;
    bcfg.tol = cfg.solver_tol;
    bcfg.max_iter = cfg.solver_max_iter;
    bcfg.max_halvings = cfg.damping;
    bcfg.n_nodes = cfg.n_nodes;
    bcfg.s0 = cfg.x0;
    bcfg.s0_dual = cfg.x0_dual;
    bcfg.nlie = ncfg;
    bcfg.concurrent = opt.threads > 1;

    HillFactorization hf, hfd;
    std::shared_ptr<const NlieSolution> direct, dual;
    auto add_suite = [&](Suite s) { out.suites.push_back(std::move(s)); };

    auto run_hill = [&] {
        timed("hill", [&] {
            hf = find_delta(*cfg.tau, spec, cfg.truncation);
            hfd = find_delta(*cfg.tau_dual, spec, cfg.truncation);
        });
        res["hill"] = {{"direct", hill_json(hf)}, {"dual", hill_json(hfd)}};
        timed("hill_invariants", [&] {
            add_suite(determinant_suite(*cfg.tau, spec));
            Suite d = determinant_suite(*cfg.tau_dual, spec);
            d.name = "determinant_dual";
            add_suite(d);
            add_suite(hill_suite(*cfg.tau, hf, spec));
            Suite h = hill_suite(*cfg.tau_dual, hfd, spec);
            h.name = "hill_dual";
            add_suite(h);
        });
        if (cfg.emit_grid) {
            files["hill_grid.csv"] = hill_grid_csv(hf, *cfg.tau, spec);
            files["hill_grid_dual.csv"] = hill_grid_csv(hfd, *cfg.tau_dual, spec);
        }
    };
    auto run_nlie = [&] {
        run_hill();
        timed("nlie", [&] {
            direct = std::make_shared<const NlieSolution>(
                solve_Y(hf.delta, spec, contour_for(hf.delta, spec, cfg.n_nodes, cfg.x0), ncfg));
            dual = std::make_shared<const NlieSolution>(
                solve_Y(hfd.delta, spec, contour_for(hfd.delta, spec, cfg.n_nodes_dual, cfg.x0_dual), ncfg));
        });
        res["nlie"] = {{"direct", nlie_json(*direct)}, {"dual", nlie_json(*dual)}};
        for (const auto* s : {direct.get(), dual.get()}) {
            if (!s->converged) throw NonConvergence("NLIE did not converge", s->update);
            if (!s->certified) out.warnings.push_back("NLIE contraction not certified (Lipschitz bound >= 1)");
        }
        timed("nlie_invariants", [&] {
            add_suite(nlie_suite(*cfg.tau, hf, *direct, cmd == "nlie" || cmd == "verify"));
            add_suite(nlie_suite(*cfg.tau_dual, hfd, *dual, cmd == "nlie" || cmd == "verify"));
        });
        if (cfg.emit_csv) {
            files["nlie_direct.csv"] = csv_of(*direct);
            files["nlie_dual.csv"] = csv_of(*dual);
        }
    };
    BetheState state;
    auto run_bethe = [&] {
        RootSet seed = cfg.delta ? *cfg.delta : find_delta(*cfg.tau, spec, cfg.truncation).delta;
        timed("bethe", [&] { state = solve_bethe(seed, spec, bcfg); });
        res["bethe"] = bethe_json(state);
        if (!state.direct) throw NonConvergence("Bethe solve failed: " + state.diagnostic, state.residual_norm);
        timed("bethe_invariants", [&] { add_suite(bethe_suite(state, spec, bcfg)); });
        if (!state.converged) throw NonConvergence("Bethe solve: " + state.diagnostic, state.residual_norm);
    };

    try {
        if (cmd == "specfun-check") {
            timed("specfun", [&] { add_suite(specfun_suite(spec.mp)); });
        } else if (cmd == "hill") {
            run_hill();
        } else if (cmd == "nlie") {
            run_nlie();
        } else if (cmd == "bethe") {
            run_bethe();
        } else if (cmd == "spectrum") {
            if (cfg.tau) {
                run_nlie();
                SpectrumResult sr;
                timed("spectrum", [&] { sr = reconstruct_tau(*direct, *dual); });
                res["spectrum"] = spectrum_json(sr);
                add_suite(spectrum_suite(sr, spec, &*cfg.tau, &*cfg.tau_dual));
                if (!sr.warning.empty()) out.warnings.push_back(sr.warning);
            } else {
                run_bethe();
                SpectrumResult sr;
                timed("spectrum", [&] { sr = reconstruct_tau(state); });
                res["spectrum"] = spectrum_json(sr);
                add_suite(spectrum_suite(sr, spec));
                if (!sr.warning.empty()) out.warnings.push_back(sr.warning);
            }
        } else {  // verify
            timed("specfun", [&] { add_suite(specfun_suite(spec.mp)); });
            if (cfg.tau) {
                run_nlie();
                const QSolution qp = make_q(QSign::Plus, direct, dual), qm = make_q(QSign::Minus, direct, dual);
                // the override keeps κ and g finite, so q₋/q₊ cross terms of order κg^{2N} survive
                // in the Wronskians; the q-function identities are only stated for ρ ≠ 0
                if (spec.rho_zero)
                    res["skipped"] = json::array({"qfunctions"});
                else
                    timed("qfunctions", [&] { add_suite(qfunction_suite(qp, qm)); });
                SpectrumResult sr;
                timed("spectrum", [&] { sr = reconstruct_tau(*direct, *dual); });
                res["spectrum"] = spectrum_json(sr);
                add_suite(spectrum_suite(sr, spec, &*cfg.tau, &*cfg.tau_dual));
                if (!sr.warning.empty()) out.warnings.push_back(sr.warning);
                if (cfg.emit_grid) files["q_grid.csv"] = q_grid_csv(qp, qm, 16);
            }
            if (cfg.delta) {
                run_bethe();
                SpectrumResult sb = reconstruct_tau(state);
                res["spectrum_bethe"] = spectrum_json(sb);
                Suite s = spectrum_suite(sb, spec);
                s.name = "spectrum_bethe";
                add_suite(s);
            }
            if (reality_applicable(spec)) timed("reality", [&] { add_suite(reality_suite(spec)); });
        }
        out.exit_code = EXIT_PASS;
    } catch (const ConfigError&) {
        throw;
    } catch (const NonConvergence& e) {
        res["error"] = {{"kind", "non_convergence"}, {"message", e.what()}, {"achieved", e.achieved()}};
        out.exit_code = EXIT_NUMERIC;
    } catch (const PoleError& e) {
        res["error"] = {{"kind", "pole"}, {"message", e.what()}, {"m", e.m()}, {"n", e.n()}};
        out.exit_code = EXIT_NUMERIC;
    } catch (const std::exception& e) {
        res["error"] = {{"kind", "domain"}, {"message", e.what()}};
        out.exit_code = EXIT_NUMERIC;
    }

    json inv = json::object();
    bool all = true;
    for (const auto& s : out.suites) {
        inv[s.name] = to_json(s);
        all = all && s.pass();
    }
    res["invariants"] = inv;
    res["warnings"] = out.warnings;
    if (out.exit_code == EXIT_PASS && (!all || (opt.strict && !out.warnings.empty()))) out.exit_code = EXIT_NUMERIC;
    res["status"] = out.exit_code == EXIT_PASS ? "pass" : "fail";
    res["exit_code"] = out.exit_code;
    res["timings"] = timings;

    const fs::path dir = opt.out_dir.empty() ? fs::path(cfg.directory) : fs::path(opt.out_dir);
    for (const auto& [name, content] : files) write_atomic((dir / name).string(), content);
    out.results_path = (dir / "results.json").string();
    write_atomic(out.results_path, res.dump(2) + "\n");
    return out;
}

}  // namespace bnlie
