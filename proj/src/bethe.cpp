#include "bnlie/bethe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace bnlie {

namespace {

cplx coth(cplx z) { return 1.0 / std::tanh(z); }

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (cplx x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

cplx i_delta(cplx lambda, const NlieSolution& sol) {
    if (sol.spec.rho_zero) return 0.0;
    const Contour& c = sol.contour;
    const double eps = 1e-6 * sol.spec.mp.min_abs();
    cplx s = 0.0;
    for (int j = 0; j < c.n; ++j) {
        const cplx zp = lambda - c.nodes[j] + 0.5 * I * c.a, zm = lambda - c.nodes[j] - 0.5 * I * c.a;
        if (std::min(lattice_distance(zp, sol.spec.mp), lattice_distance(zm, sol.spec.mp)) < eps)
            throw PoleError("i_delta: lambda -+ i a/2 on the contour");
        s += (coth(PI * zp / c.b) + coth(PI * zm / c.b) + 2.0) * sol.logV[j];
    }
    return -s * c.weight / (2.0 * I * c.b);
}

namespace {

// ∏_ℓ ϖ(δ_ℓ − λ + iΩ/2)/ϖ(λ − δ_ℓ + iΩ/2), optionally skipping ℓ = skip
cplx dilog_product(cplx lambda, const RootSet& delta, const ModelSpec& spec, int skip) {
    const cplx h = 0.5 * I * spec.mp.Omega();
    cplx p = 1.0;
    for (int l = 0; l < int(delta.size()); ++l) {
        if (l == skip) continue;
        const cplx d = delta.roots[l];
        p *= quantum_dilog(d - lambda + h, spec.mp, spec.products) /
             quantum_dilog(lambda - d + h, spec.mp, spec.products);
    }
    return p;
}

// the λ-dependent exponential prefactor: ρ^{−iλ}, with the Toda₂ quadratic term
cplx ratio_exponent(cplx lambda, const RootSet& delta, const ModelSpec& spec) {
    const ModularPair& mp = spec.mp;
    const cplx w12 = mp.omega1() * mp.omega2();
    cplx sum = 0.0;
    for (cplx d : delta.roots) sum += d;
    cplx e = -I * lambda * spec.L_rho - PI * mp.Omega() * sum / w12;
    if (spec.kind == ModelKind::Toda2)
        e += -I * PI * double(spec.N) * lambda * lambda / w12 - 2.0 * I * PI * lambda * sum / w12;
    return e;
}

}  // namespace

cplx ratio_closed(cplx lambda, const NlieSolution& direct, const NlieSolution& dual) {
    const ModelSpec& spec = direct.spec;
    const RootSet& delta = direct.delta;
    return std::exp(ratio_exponent(lambda, delta, spec) + i_delta(lambda, direct) + i_delta(lambda, dual)) *
           dilog_product(lambda, delta, spec, -1);
}

cplx bethe_lhs(int k, const NlieSolution& direct, const NlieSolution& dual) {
    const ModelSpec& spec = direct.spec;
    const RootSet& delta = direct.delta;
    if (k < 0 || k >= int(delta.size())) throw DomainError("bethe_lhs: root index out of range");
    const cplx d = delta.roots[k];
    return -std::exp(ratio_exponent(d, delta, spec) + i_delta(d, direct) + i_delta(d, dual)) *
           dilog_product(d, delta, spec, k);
}

cplx bethe_residual(const BetheState& state, const ModelSpec& /*spec*/, int k) {
    if (!state.direct || !state.dual) throw DomainError("bethe_residual: state carries no NLIE solutions");
    return bethe_lhs(k, *state.direct, *state.dual) / state.xi - 1.0;
}

namespace {

struct Solver {
    const ModelSpec& spec;
    const BetheConfig& cfg;
    Contour cd, ct;  // contours fixed for the whole solve

    std::shared_ptr<const NlieSolution> solve(const RootSet& delta, bool dual) const {
        RootSet d{delta.roots, dual ? RootFamily::DeltaDual : RootFamily::Delta};
        const Contour& c = dual ? ct : cd;
        if (!separation_ok(d, spec.mp, c.s0)) {
            std::ostringstream os;
            os << "bethe: delta left the contour strip (" << (dual ? "dual" : "direct") << ")";
            throw DomainError(os.str());
        }
        auto sol = std::make_shared<NlieSolution>(solve_Y(d, spec, c, cfg.nlie));
        if (!sol->converged) {
            std::ostringstream os;
            os << "bethe: NLIE failed at delta =";
            for (cplx x : delta.roots) os << ' ' << x;
            throw NonConvergence(os.str(), sol->update);
        }
        return sol;
    }

    BetheState eval(const RootSet& delta, cplx xi) const {
        check_distinct(delta, spec.mp, 1e-6 * spec.mp.min_abs());  // collisions are outside scope
        BetheState s;
        s.delta = delta;
        s.xi = xi;
        if (cfg.concurrent) {
            auto f = std::async(std::launch::async, [&] { return solve(delta, true); });
            s.direct = solve(delta, false);
            s.dual = f.get();
        } else {
            s.direct = solve(delta, false);
            s.dual = solve(delta, true);
        }
        for (int k = 0; k < int(delta.size()); ++k) s.residuals.push_back(bethe_residual(s, spec, k));
        s.residual_norm = max_abs(s.residuals);
        return s;
    }
};

RootSet from_params(const Eigen::VectorXcd& x, int N, cplx total) {
    RootSet d{{}, RootFamily::Delta};
    cplx s = 0.0;
    for (int k = 0; k < N - 1; ++k) {
        d.roots.push_back(x(k));
        s += x(k);
    }
    d.roots.push_back(total - s);
    return d;
}

cplx delta_total(const ModelSpec& spec) {
    return spec.mp.omega1() * spec.mp.omega2() * spec.p0 / (2.0 * PI);
}

}  // namespace

BetheState evaluate_state(const RootSet& delta, cplx xi, const ModelSpec& spec, const BetheConfig& cfg) {
    Solver sv{spec, cfg, contour_for(delta, spec, cfg.n_nodes, cfg.s0),
              contour_for({delta.roots, RootFamily::DeltaDual}, spec, cfg.n_nodes, cfg.s0_dual)};
    BetheState s = sv.eval(delta, xi);
    s.converged = s.residual_norm < cfg.tol;
    return s;
}

BetheState solve_bethe(const RootSet& seed, const ModelSpec& spec, const BetheConfig& cfg, cplx xi_seed) {
    const int N = spec.N;
    if (int(seed.size()) != N) throw DomainError("solve_bethe: seed must carry N roots");
    const cplx total = delta_total(spec);
    cplx ssum = 0.0;
    for (cplx d : seed.roots) ssum += d;
    if (std::abs(ssum - total) > 1e-10 * (1.0 + std::abs(total)))
        throw DomainError("solve_bethe: seed violates the sum constraint");
    check_distinct(seed, spec.mp);

    RootSet d0{seed.roots, RootFamily::Delta};
    Solver sv{spec, cfg, contour_for(d0, spec, cfg.n_nodes, cfg.s0),
              contour_for({seed.roots, RootFamily::DeltaDual}, spec, cfg.n_nodes, cfg.s0_dual)};

    // unknowns (δ_1..δ_{N−1}, η = 1/ξ): the residuals are linear in η
    Eigen::VectorXcd x(N);
    for (int k = 0; k < N - 1; ++k) x(k) = seed.roots[k];
    BetheState cur;
    {
        BetheState probe = sv.eval(from_params(x, N, total), 1.0);
        x(N - 1) = 1.0 / (xi_seed == cplx(0.0) ? bethe_lhs(0, *probe.direct, *probe.dual) : xi_seed);
        cur = sv.eval(from_params(x, N, total), 1.0 / x(N - 1));
    }
    cur.trace.push_back(cur.residual_norm);
    const double h = cfg.fd_step > 0 ? cfg.fd_step : 1e-5 * spec.mp.min_abs();

    auto residual_vec = [&](const BetheState& s) {
        Eigen::VectorXcd r(N);
        for (int k = 0; k < N; ++k) r(k) = s.residuals[k];
        return r;
    };

    int it = 0;
    try {
        for (; it < cfg.max_iter && cur.residual_norm >= cfg.tol; ++it) {
            const Eigen::VectorXcd r0 = residual_vec(cur);
            Eigen::MatrixXcd J(N, N);
            for (int j = 0; j < N; ++j) {
                Eigen::VectorXcd xp = x;
                const cplx step = j == N - 1 ? h * std::max(1.0, std::abs(x(j))) : cplx(h);
                xp(j) += step;
                BetheState sp = sv.eval(from_params(xp, N, total), 1.0 / xp(N - 1));
                J.col(j) = (residual_vec(sp) - r0) / step;
            }
            const Eigen::VectorXcd dx = J.partialPivLu().solve(-r0);
            double lam = 1.0;
            bool accepted = false;
            BetheState best;
            for (int hv = 0; hv <= cfg.max_halvings; ++hv, lam *= 0.5) {
                Eigen::VectorXcd xn = x + lam * dx;
                BetheState sn;
                try {
                    sn = sv.eval(from_params(xn, N, total), 1.0 / xn(N - 1));
                } catch (const std::exception&) {
                    continue;  // trial left the admissible region; shorten the step
                }
                if (sn.residual_norm < cur.residual_norm) {
                    x = xn;
                    best = std::move(sn);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                cur.diagnostic = "Newton stagnation: no decrease after step halving";
                break;
            }
            auto trace = std::move(cur.trace);
            cur = std::move(best);
            cur.trace = std::move(trace);
            cur.trace.push_back(cur.residual_norm);
        }
    } catch (const std::exception& e) {
        cur.diagnostic = e.what();
    }
    cur.iterations = it;
    cur.converged = cur.residual_norm < cfg.tol;
    if (!cur.converged && cur.diagnostic.empty()) cur.diagnostic = "iteration budget exhausted";
    return cur;
}

QSolution state_q(const BetheState& state, QSign sign) { return make_q(sign, state.direct, state.dual); }

EntiretyReport entirety_check(const BetheState& state, const ModelSpec& spec) {
    const QSolution qp = state_q(state, QSign::Plus), qm = state_q(state, QSign::Minus);
    const double r = 1e-4 * std::abs(spec.mp.omega2());
    const int m = 8;
    EntiretyReport rep;
    for (cplx d : state.delta.roots) {
        // q₊/q₋ is regular at δ_k: its circle mean is the center value. The residues of q₊
        // and q = q₊ − ξq₋ are circle means of (λ − δ_k)·q.
        cplx ratio = 0.0, res_q = 0.0, res_p = 0.0;
        for (int j = 0; j < m; ++j) {
            const cplx h = r * std::exp(2.0 * PI * I * (j + 0.5) / double(m));
            const cplx a = q_eval(qp, d + h), b = q_eval(qm, d + h);
            ratio += a / b;
            res_q += h * (a - state.xi * b);
            res_p += h * a;
        }
        ratio /= double(m);
        rep.ratio_error.push_back(std::abs(ratio - state.xi) / std::abs(state.xi));
        rep.residue.push_back(std::abs(res_q) / std::abs(res_p));
    }
    rep.max_ratio_error = *std::max_element(rep.ratio_error.begin(), rep.ratio_error.end());
    rep.max_residue = *std::max_element(rep.residue.begin(), rep.residue.end());
    return rep;
}

}  // namespace bnlie
