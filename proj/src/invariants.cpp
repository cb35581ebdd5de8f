#include "bnlie/invariants.hpp"

#include <algorithm>
#include <cmath>

namespace bnlie {

void Suite::add(const std::string& check, double value, double threshold, const std::string& note) {
    checks.push_back({check, value, threshold, std::isfinite(value) && value < threshold, note});
}

bool Suite::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

bool conjugate_pair(const ModularPair& mp) { return std::abs(mp.omega1() - std::conj(mp.omega2())) < 1e-14; }

// roots spaced on a short real segment with the prescribed sum
std::vector<cplx> centered(int N, double spacing, cplx total) {
    std::vector<cplx> r;
    for (int k = 0; k < N; ++k) r.push_back(total / double(N) + spacing * (k - 0.5 * (N - 1)));
    return r;
}

}  // namespace

Suite specfun_suite(const ModularPair& mp, int n, unsigned seed) {
    Suite s{"specfun", {}};
    const cplx w1 = mp.omega1(), w2 = mp.omega2();
    double td = 0, tr = 0, tm = 0, sq1 = 0, sq2 = 0, sr = 0, sp = 0, wd = 0;
    for (cplx l : probe_points(n, {}, mp, seed)) {
        const cplx th = theta(l, mp);
        td = std::max(td, std::abs(theta(l - I * w1, mp) + std::exp(2.0 * PI * l / w2) * th) / (1.0 + std::abs(th)));
        tr = std::max(tr, rel(theta(-l - I * w1, mp), th));
        tm = std::max(tm, rel(theta_dual(l, mp) * std::exp(I * modular_B(l, mp)), th));
        const cplx S = double_sine(l, mp);
        sq1 = std::max(sq1, rel(double_sine(l - I * w1, mp) * (1.0 - std::exp(-2.0 * PI * l / w2)), S));
        sq2 = std::max(sq2, rel(double_sine(l - I * w2, mp) * (1.0 - std::exp(-2.0 * PI * l / w1)), S));
        sr = std::max(sr, rel(S * double_sine(-l - I * mp.Omega(), mp), std::exp(I * modular_B(l, mp))));
        sp = std::max(sp, rel(double_sine_alt(l, mp), S));
        wd = std::max(wd, std::abs(quantum_dilog(l, mp) * quantum_dilog(-l, mp) - 1.0));
    }
    s.add("theta_difference", td, 1e-9);
    s.add("theta_reflection", tr, 1e-9);
    s.add("theta_modular", tm, 1e-9);
    s.add("double_sine_shift_omega1", sq1, 1e-9);
    s.add("double_sine_shift_omega2", sq2, 1e-9);
    s.add("double_sine_reflection", sr, 1e-9);
    s.add("double_sine_product_forms", sp, 1e-9);
    s.add("dilog_inversion", wd, 1e-9);
    if (conjugate_pair(mp)) {
        double wc = 0;
        for (cplx l : probe_points(n, {}, mp, seed + 1)) {
            const cplx h = 0.5 * l;  // keep ϖ away from its strip edges
            wc = std::max(wc, rel(std::conj(quantum_dilog(h, mp)), quantum_dilog(-std::conj(h), mp)));
        }
        s.add("dilog_conjugation", wc, 1e-9);
    }
    return s;
}

Suite determinant_suite(const RootSet& tau, const ModelSpec& spec) {
    Suite s{"determinant", {}};
    const cplx l0(0.13, 0.31);
    if (spec.rho_zero) {
        s.add("trivial_rho_zero", std::abs(k_plus(l0, tau, spec).value - 1.0), 1e-15);
        return s;
    }
    const std::vector<double> ns{8, 16, 32, 64};
    std::vector<double> ls;
    for (double n : ns) ls.push_back(k_increment_log(KSide::Plus, l0, tau, spec, int(n)));
    double mx = 0, my = 0, sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) mx += ns[i] / 4, my += ls[i] / 4;
    for (int i = 0; i < 4; ++i) sxy += (ns[i] - mx) * (ls[i] - my), sxx += (ns[i] - mx) * (ns[i] - mx);
    const double slope = sxy / sxx, expect = 2.0 * spec.N * std::log(std::abs(spec.mp.q()));
    s.add("truncation_slope", std::abs(slope / expect - 1.0), 0.2, "relative deviation from 2N log|q|");

    const bool dual = tau.dual();
    const cplx a = I * spec.mp.shift(dual), r = spec.rho_omega(dual), ez = std::exp(omega_zeta(tau, spec));
    const cplx ep = dual ? ez : 1.0, em = dual ? 1.0 : ez;
    auto t = [&](cplx l) { return t_eval(l, tau, spec); };
    auto Kp = [&](cplx l) { return k_plus(l, tau, spec).value; };
    auto Km = [&](cplx l) { return k_minus(l, tau, spec).value; };
    const cplx rp = Kp(l0 - a) - ep * Kp(l0) + ep * ep * r * Kp(l0 + a) / (t(l0) * t(l0 + a));
    const cplx rm = Km(l0 + a) - em * Km(l0) + em * em * r * Km(l0 - a) / (t(l0) * t(l0 - a));
    s.add("k_plus_recurrence", std::abs(rp) / std::abs(Kp(l0)), 1e-10);
    s.add("k_minus_recurrence", std::abs(rm) / std::abs(Km(l0)), 1e-10);
    return s;
}

Suite hill_suite(const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec) {
    Suite s{"hill", {}};
    const bool dual = tau.dual();
    const cplx b = I * spec.mp.period(dual), a = I * spec.mp.shift(dual);
    const cplx m = std::exp((dual ? 1.0 : -1.0) * omega_zeta(tau, spec));
    double qp = 0, qs = 0;
    for (cplx l : probe_points(6, tau.roots, spec.mp, 3, 0.4)) {
        const cplx H = hill_det(l, tau, spec);
        qp = std::max(qp, rel(hill_det(l + b, tau, spec), H));
        qs = std::max(qs, rel(hill_det(l - a, tau, spec), m * H));
    }
    s.add("hill_periodicity", qp, 1e-8);
    s.add("hill_quasi_periodicity", qs, 1e-8);
    s.add("hill_factorization", hf.residual, 1e-8, "12-point grid");
    s.add("delta_sum_constraint", hf.sum_residual, 1e-9);
    return s;
}

Suite nlie_suite(const RootSet& tau, const HillFactorization& hf, const NlieSolution& sol, bool refine) {
    Suite s{sol.contour.dual ? "nlie_dual" : "nlie", {}};
    const ModelSpec& spec = sol.spec;
    s.add("converged", sol.converged ? 0.0 : 1.0, 0.5);
    s.add("contraction", sol.contraction_estimate, 0.5, sol.certified ? "certified" : "uncertified");
    double err = 0.0;
    for (int j = 0; j < sol.contour.n; ++j)
        err = std::max(err, rel(std::exp(sol.Y[j]), y_from_determinants(sol.contour.nodes[j], tau, hf, spec)));
    s.add("expY_vs_determinants", err, 1e-7);

    const bool dual = sol.contour.dual;
    const cplx a = I * spec.mp.shift(dual);
    std::vector<cplx> probes{sol.contour.nodes[sol.contour.n / 7], sol.contour.nodes[(5 * sol.contour.n) / 7]};
    for (double x : {0.3, -0.3, 0.8, -0.8, 1.7, -1.7})
        probes.push_back(dual ? spec.mp.point(0.23, sol.contour.s0 + x) : spec.mp.point(sol.contour.s0 + x, 0.23));
    double up = 0.0, dn = 0.0;
    for (cplx l : probes) {
        up = std::max(up, rel(u_plus(l, tau, hf, spec) * v_up(l, sol), k_plus(l, tau, spec).value));
        dn = std::max(dn, rel(u_minus(l - a, tau, hf, spec) * v_down_shift(l, sol), k_minus(l, tau, spec).value));
    }
    s.add("K_plus_eq_u_v_up", up, 1e-7);
    s.add("K_minus_eq_u_v_down", dn, 1e-7);
    if (refine && !spec.rho_zero) {
        Contour c2 = make_contour(spec.mp, dual, sol.contour.s0, 2 * sol.contour.n);
        NlieSolution fine = solve_Y(sol.delta, spec, c2);
        double d = 0.0;
        for (int j = 0; j < sol.contour.n; ++j) d = std::max(d, std::abs(sol.Y[j] - fine.Y[2 * j]));
        s.add("grid_refinement", d, 1e-9, "sup |Y_n - Y_2n| on the coarse nodes");
    }
    return s;
}

Suite qfunction_suite(const QSolution& qp, const QSolution& qm, unsigned seed) {
    Suite s{"qfunctions", {}};
    const ModelSpec& spec = qp.spec;
    std::vector<cplx> avoid = qp.delta.roots;
    avoid.insert(avoid.end(), qp.delta_dual.roots.begin(), qp.delta_dual.roots.end());
    const auto w = wronskians(qp, qm, probe_points(10, avoid, spec.mp, seed));
    s.add("selfdual_wronskian", w.selfdual_residual, 1e-8);
    s.add("W_omega1_closed_form", w.w1_residual, 1e-7);
    s.add("W_omega2_closed_form", w.w2_residual, 1e-7);
    s.add("W_combination_closed_form", w.combo_residual, 1e-7);
    s.add("W_omega1_shift_ratio", w.w1_ratio_residual, 1e-8);
    s.add("W_omega2_shift_ratio", w.w2_ratio_residual, 1e-8);

    const TFit fd = fit_t(qp, qm, false), ft = fit_t(qp, qm, true);
    s.add("t_fit_residual", std::max(fd.residual, ft.residual), 1e-7);
    s.add("t_fit_constraint", std::max(constraint_residual(fd.tau, spec), constraint_residual(ft.tau, spec)), 1e-8);
    double bx = 0.0;
    for (const QSolution* q : {&qp, &qm}) {
        QFun f = [q](cplx l) { return q_eval(*q, l); };
        for (cplx l : probe_points(10, avoid, spec.mp, seed + 30)) {
            const auto r = baxter_residual(f, fd.tau, ft.tau, spec, l);
            const cplx fl = f(l);
            bx = std::max(bx, std::abs(r.first) / std::abs(t_eval(l, fd.tau, spec) * fl));
            bx = std::max(bx, std::abs(r.second) / std::abs(t_eval(l, ft.tau, spec) * fl));
        }
    }
    s.add("baxter_equations", bx, 1e-6);
    return s;
}

Suite bethe_suite(const BetheState& state, const ModelSpec& spec, const BetheConfig& cfg) {
    Suite s{"bethe", {}};
    s.add("residual_norm", state.residual_norm, cfg.tol, state.diagnostic);
    if (!state.direct || !state.dual) return s;
    cplx sum = 0.0;
    for (cplx d : state.delta.roots) sum += d;
    s.add("sum_constraint", std::abs(sum - spec.mp.omega1() * spec.mp.omega2() * spec.p0 / (2.0 * PI)), 1e-14);
    const auto e = entirety_check(state, spec);
    s.add("entirety_ratio", e.max_ratio_error, 1e-5);
    s.add("entirety_residue", e.max_residue, 1e-5);
    BetheConfig fresh = cfg;
    fresh.s0 += 0.05;
    fresh.s0_dual -= 0.05;
    fresh.n_nodes = cfg.n_nodes + cfg.n_nodes / 4;
    s.add("idempotence", evaluate_state(state.delta, state.xi, spec, fresh).residual_norm, 2.0 * cfg.tol,
          "fresh contours and node count");
    return s;
}

double exp_mismatch(const RootSet& got, const RootSet& want, const ModelSpec& spec) {
    const cplx b = spec.mp.period(want.dual());
    double worst = 0.0;
    for (cplx w : want.roots) {
        const cplx xw = std::exp(-2.0 * PI * w / b);
        double best = 1e300;
        for (cplx g : got.roots) best = std::min(best, std::abs(std::exp(-2.0 * PI * g / b) - xw) / std::abs(xw));
        worst = std::max(worst, best);
    }
    return worst;
}

Suite spectrum_suite(const SpectrumResult& r, const ModelSpec& spec, const RootSet* tau_seed,
                     const RootSet* tau_dual_seed) {
    Suite s{"spectrum", {}};
    s.add("crosscheck", r.crosscheck_residual, 1e-6, r.warning);
    s.add("constraint_direct", constraint_residual(r.tau, spec), 1e-8);
    s.add("constraint_dual", constraint_residual(r.tau_dual, spec), 1e-8);
    if (tau_seed) s.add("roundtrip_direct", exp_mismatch(r.tau, *tau_seed, spec), 1e-6);
    if (tau_dual_seed) s.add("roundtrip_dual", exp_mismatch(r.tau_dual, *tau_dual_seed, spec), 1e-6);
    return s;
}

Suite reality_suite(const ModelSpec& spec) {
    if (!conjugate_pair(spec.mp)) throw DomainError("reality_suite: needs omega1 = conj(omega2)");
    if (spec.kind != ModelKind::QToda || std::abs(spec.kappa.imag()) > 0.0 || std::abs(spec.p0.imag()) > 0.0)
        throw DomainError("reality_suite: needs the q-Toda chain with real kappa and p0");
    Suite s{"reality", {}};
    const int N = spec.N;
    const cplx total = spec.mp.omega1() * spec.mp.omega2() * spec.p0 / (2.0 * PI);
    RootSet tr{centered(N, 0.3, total), RootFamily::TauDirect};
    for (int k = 0; k < N; ++k) tr.roots[k] += cplx(0.0, 0.02 * (k - 0.5 * (N - 1)));
    RootSet td{{}, RootFamily::TauDual};
    for (cplx t : tr.roots) td.roots.push_back(std::conj(t));
    double kc = 0.0, hc = 0.0;
    for (cplx l : probe_points(6, tr.roots, spec.mp, 5, 0.4)) {
        kc = std::max(kc, rel(std::conj(k_plus(l, tr, spec).value), k_minus(std::conj(l), td, spec).value));
        kc = std::max(kc, rel(std::conj(k_minus(l, tr, spec).value), k_plus(std::conj(l), td, spec).value));
        hc = std::max(hc, rel(std::conj(hill_det(l, tr, spec)), hill_det(std::conj(l) - I * spec.mp.omega2(), td, spec)));
    }
    s.add("K_conjugation", kc, 1e-8, "conj K+-(l) = K~-+(conj l) with conj tau");
    s.add("hill_conjugation", hc, 1e-8);

    const RootSet d{centered(N, 0.3, total), RootFamily::Delta};
    const RootSet dd{d.roots, RootFamily::DeltaDual};
    const NlieSolution a = solve_Y(d, spec, contour_for(d, spec, 256));
    const NlieSolution b = solve_Y(dd, spec, contour_for(dd, spec, 256));
    double im = 0.0, md = 0.0;
    for (double x : {-0.35, -0.2, -0.05, 0.1, 0.25, 0.4}) {
        const cplx v = i_delta(x, a) + i_delta(x, b);
        im = std::max(im, std::abs(v.real()) / (1.0 + std::abs(v)));
    }
    const double e = std::abs(std::exp(0.5 * spec.mp.Omega() * spec.p0));
    for (int k = 0; k < N; ++k) md = std::max(md, std::abs(std::abs(bethe_lhs(k, a, b)) * e - 1.0));
    s.add("I_plus_Itilde_imaginary", im, 1e-8, "real lambda, real delta");
    s.add("bethe_lhs_unimodular", md, 1e-8);
    return s;
}

}  // namespace bnlie
