// Acceptance gate: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "bnlie/invariants.hpp"
#include "pipeline.hpp"

using namespace bnlie;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " failed:" << what;
        }
    }
    void suite(const Suite& s) {
        for (const auto& c : s.checks) need(c.pass, s.name + "." + c.name + "=" + fmt(c.value));
    }
    static std::string fmt(double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.2e", v);
        return b;
    }
};

// suite values restricted to the named checks
void suite_subset(Outcome& o, const Suite& s, std::initializer_list<const char*> names) {
    for (const auto& c : s.checks)
        for (const char* n : names)
            if (c.name == n) o.need(c.pass, s.name + "." + c.name + "=" + Outcome::fmt(c.value));
}

double max_check(const Suite& s, const std::string& name) {
    for (const auto& c : s.checks)
        if (c.name == name) return c.value;
    return INFINITY;
}

const std::vector<double> decades{1e-2, 1e-3, 1e-4};

Outcome c1_specfun() {
    Outcome o;
    const Suite s = specfun_suite(fx::ref_pair(), 20);
    o.suite(s);
    o.detail << " worst=" << Outcome::fmt([&] {
        double w = 0;
        for (const auto& c : s.checks) w = std::max(w, c.value);
        return w;
    }());
    return o;
}

Outcome c2_determinant() {
    Outcome o;
    for (double r : decades) {
        const Suite s = determinant_suite(fx::tau2(), fx::qtoda(2, r));
        suite_subset(o, s, {"truncation_slope"});
        o.detail << " slope_dev(" << r << ")=" << Outcome::fmt(max_check(s, "truncation_slope"));
    }
    return o;
}

Outcome c3_hill() {
    Outcome o;
    std::vector<double> gaps, rhos;
    for (double r : decades) {
        const auto s = fx::qtoda(2, r);
        const auto hf = find_delta(fx::tau2(), s);
        o.need(hf.grid.size() == 12, "grid size");
        o.suite(hill_suite(fx::tau2(), hf, s));
        const auto hd = find_delta(fx::as_dual(fx::tau2_alt()), s);
        o.suite(hill_suite(fx::as_dual(fx::tau2_alt()), hd, s));
        double gap = 0;
        for (int k = 0; k < 2; ++k) {
            double best = 1e300;
            for (cplx d : hf.delta.roots) best = std::min(best, std::abs(d - fx::tau2().roots[k]));
            gap = std::max(gap, best);
        }
        gaps.push_back(gap);
        rhos.push_back(std::abs(s.rho_omega(false)));
    }
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double ratio = (gaps[i] / gaps[i + 1]) / (rhos[i] / rhos[i + 1]);
        o.need(std::abs(ratio - 1.0) < 0.2, "gap scaling " + Outcome::fmt(ratio));
        o.detail << " gap(" << decades[i] << ")=" << Outcome::fmt(gaps[i]);
    }
    o.detail << " gap(" << decades.back() << ")=" << Outcome::fmt(gaps.back());
    return o;
}

Outcome c4_nlie() {
    Outcome o;
    for (double r : decades) {
        const auto s = fx::qtoda(2, r);
        const auto run = fx::qrun(s, fx::tau2(), fx::as_dual(fx::tau2_alt()), 256);
        for (auto [tau, hf, sol] : {std::tuple{fx::tau2(), run.hf, run.direct},
                                    std::tuple{fx::as_dual(fx::tau2_alt()), run.hf_dual, run.dual}}) {
            const Suite su = nlie_suite(tau, hf, *sol, false);
            suite_subset(o, su, {"converged", "contraction", "expY_vs_determinants", "K_plus_eq_u_v_up",
                                 "K_minus_eq_u_v_down"});
            o.need(sol->observed_ratio < 0.5, "observed ratio " + Outcome::fmt(sol->observed_ratio));
        }
        o.detail << " L(" << r << ")=" << Outcome::fmt(run.direct->contraction_estimate) << "/"
                 << Outcome::fmt(run.dual->contraction_estimate);
    }
    return o;
}

std::vector<fx::QRun>& q_runs() {
    static std::vector<fx::QRun> runs = [] {
        const auto t2 = fx::toda2(2, 1e-3, cplx(0.05, 0.0));
        return std::vector<fx::QRun>{fx::qrun(fx::qtoda(2), fx::tau2(), fx::as_dual(fx::tau2_alt())),
                                     fx::qrun(fx::qtoda(3), fx::tau3(), fx::as_dual(fx::tau3())),
                                     fx::qrun(t2, fx::toda2_tau(t2), fx::toda2_tau(t2, true))};
    }();
    return runs;
}

Outcome c5_wronskian() {
    Outcome o;
    for (const auto& r : q_runs()) {
        const Suite s = qfunction_suite(r.qp, r.qm);
        suite_subset(o, s, {"selfdual_wronskian", "W_omega1_closed_form", "W_omega2_closed_form",
                            "W_combination_closed_form", "W_omega1_shift_ratio", "W_omega2_shift_ratio"});
        o.detail << " W1(N=" << r.spec.N << ")=" << Outcome::fmt(max_check(s, "W_omega1_closed_form"));
    }
    return o;
}

Outcome c6_baxter() {
    Outcome o;
    for (const auto& r : q_runs()) {
        const Suite s = qfunction_suite(r.qp, r.qm);
        suite_subset(o, s, {"t_fit_residual", "t_fit_constraint", "baxter_equations"});
        o.detail << " bx(N=" << r.spec.N << ")=" << Outcome::fmt(max_check(s, "baxter_equations"));
    }
    return o;
}

Outcome c7_roundtrip() {
    Outcome o;
    std::vector<double> corr, rhos;
    for (double r : {1e-3, 1e-4, 1e-5}) {
        const auto s = fx::qtoda(2, r);
        const auto run = fx::qrun(s, fx::tau2(), fx::as_dual(fx::tau2_alt()));
        const auto res = reconstruct_tau(*run.direct, *run.dual);
        if (r == 1e-3) {
            const Suite su = spectrum_suite(res, s, &run.tau, &run.tau_dual);
            o.suite(su);
            o.detail << " mismatch=" << Outcome::fmt(max_check(su, "roundtrip_direct"));
        }
        corr.push_back(res.correction_direct);
        rhos.push_back(std::abs(s.rho_omega(false)));
    }
    for (std::size_t i = 0; i + 1 < corr.size(); ++i) {
        const double ratio = (corr[i] / corr[i + 1]) / (rhos[i] / rhos[i + 1]);
        o.need(std::abs(ratio - 1.0) < 0.2, "correction scaling " + Outcome::fmt(ratio));
        o.detail << " corr_ratio=" << Outcome::fmt(ratio);
    }
    return o;
}

Outcome c8_bethe_n1() {
    Outcome o;
    // ξ seeded from the left-hand side (exact at N = 1) and from ξ = 1
    for (auto [p0, xi0] : {std::pair{0.0, cplx(0.0)}, std::pair{0.3, cplx(0.0)}, std::pair{0.3, cplx(1.0)}}) {
        auto s = fx::qtoda(1);
        s.p0 = p0;
        const RootSet seed{{s.mp.omega1() * s.mp.omega2() * p0 / (2.0 * PI)}, RootFamily::Delta};
        BetheConfig cfg;
        const auto st = solve_bethe(seed, s, cfg, xi0);
        o.need(st.converged, "converged");
        o.need(st.iterations <= 10, "iterations " + std::to_string(st.iterations));
        const Suite su = bethe_suite(st, s, cfg);
        suite_subset(o, su, {"residual_norm", "entirety_ratio", "idempotence"});
        o.detail << " p0=" << p0 << ",xi0=" << xi0.real() << ":it=" << st.iterations
                 << ",ent=" << Outcome::fmt(max_check(su, "entirety_ratio")) << ",idem=" << Outcome::fmt(max_check(su, "idempotence"));
    }
    return o;
}

Outcome c9_modular() {
    Outcome o;
    const auto s = fx::qtoda(2), sw = s.swapped();
    const auto st = solve_bethe({{cplx(0.2, 0.15), cplx(-0.2, -0.15)}, RootFamily::Delta}, s);
    o.need(st.converged, "bethe converged");
    double worst = 0;
    // at the solution and at a generic point, where the residuals are O(1)
    const std::vector<std::pair<RootSet, cplx>> pts{
        {st.delta, st.xi}, {{{cplx(0.12, 0.09), cplx(-0.12, -0.09)}, RootFamily::Delta}, cplx(0.7, -0.4)}};
    for (const auto& [d, xi] : pts) {
        const auto a = evaluate_state(d, xi, s, {}), b = evaluate_state(d, xi, sw, {});
        for (int k = 0; k < 2; ++k)
            worst = std::max(worst, std::abs(a.residuals[k] - b.residuals[k]) / (1.0 + std::abs(a.residuals[k])));
    }
    o.need(worst < 1e-7, "residuals " + Outcome::fmt(worst));
    o.detail << " residuals=" << Outcome::fmt(worst);

    const auto r = fx::qrun_selfdual(s, st.delta), w = fx::qrun_selfdual(sw, st.delta);
    std::vector<cplx> avoid = st.delta.roots;
    double qw = 0;
    for (cplx l : probe_points(10, avoid, s.mp, 61)) {
        qw = std::max(qw, fx::rel(q_eval(w.qp, l), q_eval(r.qp, l)));
        qw = std::max(qw, fx::rel(q_eval(w.qm, l), q_eval(r.qm, l)));
    }
    o.need(qw < 1e-7, "q values " + Outcome::fmt(qw));
    o.detail << " q=" << Outcome::fmt(qw);
    return o;
}

Outcome c10_reality() {
    Outcome o;
    const ModularPair mp(std::exp(I * PI / 4.0), std::exp(-I * PI / 4.0));
    for (int N : {1, 2, 3}) {
        const Suite s = reality_suite(fx::qtoda(N, 1e-3, mp));
        o.suite(s);
        double w = 0;
        for (const auto& c : s.checks) w = std::max(w, c.value);
        o.detail << " N=" << N << ":" << Outcome::fmt(w);
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;  // seconds, 0 for none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {"1 special-function identities", 5, c1_specfun},
        {"2 determinant convergence", 10, c2_determinant},
        {"3 Hill quasi-periodicity and factorization", 0, c3_hill},
        {"4 NLIE contraction and oracle equivalence", 60, c4_nlie},
        {"5 Wronskians", 0, c5_wronskian},
        {"6 Baxter residuals", 0, c6_baxter},
        {"7 round-trip spectrum", 120, c7_roundtrip},
        {"8 Bethe solve at N=1", 0, c8_bethe_n1},
        {"9 modular invariance", 0, c9_modular},
        {"10 reality regime", 0, c10_reality},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0 && dt > c.budget) o.need(false, "runtime budget " + Outcome::fmt(c.budget) + " s");
        std::printf("[%s] %s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", c.name, dt, o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}
