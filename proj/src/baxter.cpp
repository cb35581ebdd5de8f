#include "bnlie/baxter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "bnlie/spectrum.hpp"

namespace bnlie {

QSolution make_q(QSign sign, std::shared_ptr<const NlieSolution> direct,
                 std::shared_ptr<const NlieSolution> dual) {
    if (!direct || !dual) throw DomainError("make_q: both NLIE solutions are required");
    if (direct->contour.dual || !dual->contour.dual)
        throw DomainError("make_q: expected a direct and a dual solution");
    QSolution s;
    s.sign = sign;
    s.delta = direct->delta;
    s.delta_dual = dual->delta;
    s.spec = direct->spec;
    s.direct = std::move(direct);
    s.dual = std::move(dual);
    return s;
}

cplx f_p0(QSign sign, cplx lambda, const ModelSpec& spec) {
    const cplx w12 = spec.mp.omega1() * spec.mp.omega2();
    const cplx Om = spec.mp.Omega();
    const double N = spec.N;
    if (spec.kind == ModelKind::QToda) {
        const double s = sign == QSign::Plus ? 1.0 : -1.0;
        return std::exp(I * N * PI * lambda * lambda / (2.0 * w12) - s * N * PI * Om * lambda / (2.0 * w12) -
                        0.5 * I * spec.p0 * lambda);
    }
    if (sign == QSign::Plus) return std::exp(-I * spec.p0 * lambda);
    return std::exp(I * N * PI * lambda * lambda / w12 + N * PI * lambda * Om / w12);
}

namespace {

cplx poch_over(cplx lambda, const std::vector<cplx>& roots, cplx pre, cplx expo, cplx p,
               const ThetaProductConfig& cfg) {
    cplx r = 1.0;
    for (cplx d : roots) r *= q_pochhammer_ext(pre * std::exp(expo * (lambda - d)), p, cfg);
    return r;
}

// (pre, expo, p) of the q-product attached to ψ± / ψ̃±
struct PochShape {
    cplx pre, expo, p;
};

PochShape poch_shape(QSign sign, bool dual, const ModularPair& mp) {
    const double s = sign == QSign::Plus ? 1.0 : -1.0;
    if (!dual) {
        const cplx q2 = mp.q() * mp.q();
        return {q2, s * 2.0 * PI / mp.omega2(), q2};
    }
    const cplx pt = 1.0 / (mp.q_dual() * mp.q_dual());
    return {pt, -s * 2.0 * PI / mp.omega1(), pt};
}

void check_q_pole(cplx lambda, const std::vector<cplx>& delta, const ModularPair& mp) {
    const double eps = 1e-12 * mp.min_abs();
    for (cplx d : delta) {
        if (lattice_distance(lambda - d, mp) < eps) {
            const auto xy = mp.coords(lambda - d);
            throw PoleError("q: lambda on the pole lattice of 1/theta_delta", std::lround(xy[0]),
                            std::lround(xy[1]));
        }
    }
}

cplx neg_theta(cplx lambda, const std::vector<cplx>& delta, const ModelSpec& spec) {
    // θ_{−δ}(−λ) = ∏ θ(−λ + δ_a)
    std::vector<cplx> m;
    for (cplx d : delta) m.push_back(-d);
    return theta_prod(-lambda, m, spec.mp, spec.products);
}

cplx prefactor(QSign sign, cplx lambda, const ModelSpec& spec) {
    if (sign == QSign::Plus) return std::exp(-I * lambda * (spec.L_kappa + double(spec.N) * spec.L_g));
    return std::exp(I * lambda * double(spec.N) * spec.L_g);
}

}  // namespace

cplx psi(QSign sign, cplx lambda, const NlieSolution& sol) {
    const bool dual = sol.contour.dual;
    const PochShape ps = poch_shape(sign, dual, sol.spec.mp);
    const cplx v = sign == QSign::Plus ? v_up(lambda, sol) : v_down_shift(lambda, sol);
    return v * poch_over(lambda, sol.delta.roots, ps.pre, ps.expo, ps.p, sol.spec.products);
}

cplx Q_eval(const QSolution& s, cplx lambda) {
    return prefactor(s.sign, lambda, s.spec) * psi(s.sign, lambda, *s.direct) *
           psi(s.sign, lambda, *s.dual) * f_p0(s.sign, lambda, s.spec);
}

namespace {

cplx q_generic(const QSolution& s, cplx lambda) {
    const cplx Q = Q_eval(s, lambda);
    if (s.sign == QSign::Plus) return Q / theta_prod(lambda, s.delta.roots, s.spec.mp, s.spec.products);
    return Q / neg_theta(lambda, s.delta.roots, s.spec);
}

cplx q_double_sine(const QSolution& s, cplx lambda) {
    const ModelSpec& spec = s.spec;
    cplx S = 1.0;
    for (cplx d : s.delta.roots) {
        const cplx z = s.sign == QSign::Plus ? lambda - d : d - lambda;
        S *= double_sine(z, spec.mp, spec.products, 0.0);
    }
    const cplx v = s.sign == QSign::Plus ? v_up(lambda, *s.direct) * v_up(lambda, *s.dual)
                                         : v_down_shift(lambda, *s.direct) * v_down_shift(lambda, *s.dual);
    return prefactor(s.sign, lambda, spec) * v / S * f_p0(s.sign, lambda, spec);
}

bool same_roots(const RootSet& a, const RootSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a.roots[k] - b.roots[k]) > 1e-14 * (1.0 + std::abs(a.roots[k]))) return false;
    return true;
}

}  // namespace

cplx q_eval(const QSolution& s, cplx lambda, QForm form, bool verify) {
    check_q_pole(lambda, s.delta.roots, s.spec.mp);
    if (form == QForm::Generic) return q_generic(s, lambda);
    if (!same_roots(s.delta, s.delta_dual))
        throw DomainError("q_eval: the double-sine form needs delta = delta dual");
    const cplx v = q_double_sine(s, lambda);
    if (verify) {
        const cplx g = q_generic(s, lambda);
        if (std::abs(v - g) > 1e-8 * std::abs(g))
            throw NonConvergence("q_eval: double-sine and generic forms disagree", std::abs(v - g) / std::abs(g));
    }
    return v;
}

cplx q_from_determinants(QSign sign, cplx lambda, const RootSet& tau, const RootSet& tau_dual,
                         const HillFactorization& hf, const HillFactorization& hf_dual,
                         const ModelSpec& spec, const TruncationPolicy& pol) {
    check_q_pole(lambda, hf.delta.roots, spec.mp);
    const PochShape pd = poch_shape(sign, false, spec.mp), pt = poch_shape(sign, true, spec.mp);
    cplx psi_d, psi_t;
    if (sign == QSign::Plus) {
        psi_d = k_plus(lambda, tau, spec, pol).value;
        psi_t = k_plus(lambda, tau_dual, spec, pol).value / hf_dual.h_const;
    } else {
        psi_d = k_minus(lambda, tau, spec, pol).value / hf.h_const;
        psi_t = k_minus(lambda, tau_dual, spec, pol).value;
    }
    psi_d *= poch_over(lambda, tau.roots, pd.pre, pd.expo, pd.p, spec.products);
    psi_t *= poch_over(lambda, tau_dual.roots, pt.pre, pt.expo, pt.p, spec.products);
    const cplx Q = prefactor(sign, lambda, spec) * psi_d * psi_t * f_p0(sign, lambda, spec);
    if (sign == QSign::Plus) return Q / theta_prod(lambda, hf.delta.roots, spec.mp, spec.products);
    return Q / neg_theta(lambda, hf.delta.roots, spec);
}

cplx wronskian(const QFun& a, const QFun& b, cplx lambda, const ModelSpec& spec, bool dual) {
    const cplx l1 = lambda + I * spec.mp.shift(dual);
    return a(lambda) * b(l1) - b(lambda) * a(l1);
}

cplx selfdual_wronskian(const QFun& u, cplx lambda, const ModelSpec& spec) {
    const ModularPair& mp = spec.mp;
    return u(lambda) * u(lambda + I * mp.Omega()) -
           std::exp(2.0 * spec.L_sigma) * u(lambda + I * mp.omega1()) * u(lambda + I * mp.omega2());
}

cplx wronskian_closed(const QSolution& qp, const QSolution& /*qm*/, cplx lambda, bool dual) {
    const ModelSpec& spec = qp.spec;
    const ModularPair& mp = spec.mp;
    const cplx a = mp.shift(dual);
    const double N = spec.N;
    // the ψ's of the other side are periodic under the shift and survive as a product
    const NlieSolution& other = dual ? *qp.direct : *qp.dual;
    cplx w = std::exp(-I * lambda * spec.L_kappa) * spec.g_pow(-N * a) * psi(QSign::Plus, lambda, other) *
             psi(QSign::Minus, lambda, other) * f_p0(QSign::Plus, lambda, spec) *
             f_p0(QSign::Minus, lambda + I * a, spec);
    if (!dual) return w / neg_theta(lambda + I * a, qp.delta.roots, spec);
    w *= theta_dual_prod(lambda, qp.delta_dual.roots, mp, spec.products);
    return w / (theta_prod(lambda, qp.delta.roots, mp, spec.products) * neg_theta(lambda, qp.delta.roots, spec));
}

cplx c_delta_tilde(const RootSet& delta_dual, const ModelSpec& spec) {
    const ModularPair& mp = spec.mp;
    const cplx w1 = mp.omega1(), w2 = mp.omega2(), w12 = w1 * w2;
    const double N = spec.N;
    cplx s2 = 0.0, s1 = 0.0;
    for (cplx d : delta_dual.roots) {
        s2 += d * d;
        s1 += d;
    }
    cplx e = -I * PI * s2 / w12 + I * PI * N * (w1 * w1 + 3.0 * w12 + w2 * w2) / (6.0 * w12);
    // Toda₂: the linear term carries no factor N (checked against 𝒲 of q₊ + c q₋ at N = 2, 3)
    if (spec.kind == ModelKind::Toda2) e -= PI * mp.Omega() * s1 / w12;
    return std::exp(e);
}

cplx selfdual_closed(const QSolution& qp, cplx lambda) {
    const ModelSpec& spec = qp.spec;
    const ModularPair& mp = spec.mp;
    return std::exp(-I * lambda * spec.L_kappa) * spec.g_pow(-double(spec.N) * mp.Omega()) *
           c_delta_tilde(qp.delta_dual, spec) * theta_prod(lambda, qp.delta_dual.roots, mp, spec.products) /
           theta_prod(lambda, qp.delta.roots, mp, spec.products);
}

WronskianReport wronskians(const QSolution& qp, const QSolution& qm, const std::vector<cplx>& probe) {
    const ModelSpec& spec = qp.spec;
    const ModularPair& mp = spec.mp;
    QFun fp = [&](cplx l) { return q_eval(qp, l); };
    QFun fm = [&](cplx l) { return q_eval(qm, l); };
    const cplx c(-0.7, 0.3);
    QFun fc = [&](cplx l) { return fp(l) + c * fm(l); };
    WronskianReport r;
    r.c_delta_tilde = c_delta_tilde(qp.delta_dual, spec);
    r.min_w1 = INFINITY;
    const cplx s2 = std::exp(2.0 * spec.L_sigma);
    for (cplx l : probe) {
        for (bool dual : {false, true}) {
            const cplx a = mp.shift(dual);
            const cplx w = wronskian(fp, fm, l, spec, dual);
            const cplx wc = wronskian_closed(qp, qm, l, dual);
            const cplx ws = wronskian(fp, fm, l + I * a, spec, dual);
            const double res = std::abs(w - wc) / std::abs(wc);
            const double rr = std::abs(ws / w - s2 * spec.kappa_pow(a)) / std::abs(s2 * spec.kappa_pow(a));
            (dual ? r.w2_residual : r.w1_residual) = std::max(dual ? r.w2_residual : r.w1_residual, res);
            (dual ? r.w2_ratio_residual : r.w1_ratio_residual) =
                std::max(dual ? r.w2_ratio_residual : r.w1_ratio_residual, rr);
            if (!dual) r.min_w1 = std::min(r.min_w1, std::abs(w));
        }
        for (const QFun* u : {&fp, &fm}) {
            const cplx t1 = (*u)(l) * (*u)(l + I * mp.Omega());
            const cplx t2 = s2 * (*u)(l + I * mp.omega1()) * (*u)(l + I * mp.omega2());
            r.selfdual_residual = std::max(r.selfdual_residual, std::abs(t1 - t2) / (std::abs(t1) + std::abs(t2)));
        }
        const cplx sd = selfdual_wronskian(fc, l, spec);
        const cplx cl = c * selfdual_closed(qp, l);
        r.combo_residual = std::max(r.combo_residual, std::abs(sd - cl) / std::abs(cl));
    }
    return r;
}

cplx t_from_q(const QSolution& qp, const QSolution& qm, cplx lambda, bool dual) {
    const ModelSpec& spec = qp.spec;
    const cplx ia = I * spec.mp.shift(dual);
    cplx den = q_eval(qp, lambda) * q_eval(qm, lambda + ia);
    cplx num = q_eval(qp, lambda - ia) * q_eval(qm, lambda + ia);
    // the subtracted terms carry (q₋/q₊)-ratios of order ρ^{ω}, ρ^{2ω}; they vanish at ρ = 0
    if (!spec.rho_zero) {
        den -= q_eval(qm, lambda) * q_eval(qp, lambda + ia);
        num -= q_eval(qm, lambda - ia) * q_eval(qp, lambda + ia);
    }
    const cplx a = spec.mp.shift(dual);
    return spec.sigma() * spec.g_pow(double(spec.N) * a) * spec.kappa_pow(a) * num / den;
}

cplx t_from_v(cplx lambda, const NlieSolution& sol) {
    const ModelSpec& spec = sol.spec;
    const cplx ia = I * sol.contour.a;
    const RootSet& d = sol.delta;
    const cplx first = t_eval(lambda, d, spec) * v_up(lambda - ia, sol) * v_down_shift(lambda + ia, sol);
    if (spec.rho_zero) return first;
    const cplx second = spec.rho_pow(2.0 * sol.contour.a) * v_up(lambda + ia, sol) * v_down_shift(lambda, sol) /
                        (t_eval(lambda - ia, d, spec) * t_eval(lambda, d, spec) * t_eval(lambda + ia, d, spec));
    return first - second;
}

std::vector<cplx> probe_points(int n, const std::vector<cplx>& avoid, const ModularPair& mp,
                               unsigned seed, double extent) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-extent, extent);
    const double dmin = 0.05 * mp.min_abs();
    std::vector<cplx> out;
    for (int tries = 0; int(out.size()) < n; ++tries) {
        if (tries > 100000) throw DomainError("probe_points: rejection sampling failed");
        const cplx z = mp.point(u(rng), u(rng));
        bool ok = true;
        for (cplx m : avoid) ok = ok && lattice_distance(z - m, mp) >= dmin;
        if (ok) out.push_back(z);
    }
    return out;
}

TFit fit_t(const QSolution& qp, const QSolution& qm, bool dual, unsigned seed) {
    const ModelSpec& spec = qp.spec;
    const ModularPair& mp = spec.mp;
    const int N = spec.N;
    const cplx b = mp.period(dual), a = mp.shift(dual);
    std::vector<cplx> avoid = qp.delta.roots;
    avoid.insert(avoid.end(), qp.delta_dual.roots.begin(), qp.delta_dual.roots.end());
    TFit fit;
    fit.samples = probe_points(4 * N, avoid, mp, seed, 0.4);
    const bool qt = spec.kind == ModelKind::QToda;
    Eigen::MatrixXcd A(4 * N, N + 1);
    Eigen::VectorXcd y(4 * N);
    for (int i = 0; i < 4 * N; ++i) {
        const cplx l = fit.samples[i];
        const cplx t = t_from_q(qp, qm, l, dual);
        // q-Toda: x^N t = Σ c_j X^j with x = e^{πλ/b}, X = x²; Toda₂: t = Σ c_j X^j, X = e^{−2πλ/b}
        const cplx X = qt ? std::exp(2.0 * PI * l / b) : std::exp(-2.0 * PI * l / b);
        y(i) = qt ? std::pow(std::exp(PI * l / b), N) * t : t;
        cplx p = 1.0;
        for (int j = 0; j <= N; ++j, p *= X) A(i, j) = p;
    }
    // column scaling keeps the Vandermonde system well conditioned
    Eigen::VectorXd scale(N + 1);
    for (int j = 0; j <= N; ++j) scale(j) = std::max(A.col(j).norm(), 1e-300);
    Eigen::MatrixXcd As = A;
    for (int j = 0; j <= N; ++j) As.col(j) /= scale(j);
    Eigen::VectorXcd c = As.colPivHouseholderQr().solve(y);
    for (int j = 0; j <= N; ++j) c(j) /= scale(j);
    const Eigen::VectorXcd r = A * c - y;
    fit.residual = r.cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff();
    fit.coeffs.assign(c.data(), c.data() + N + 1);

    std::vector<cplx> X = durand_kerner(fit.coeffs);
    std::vector<cplx> tau;
    for (cplx x : X) tau.push_back(qt ? b * std::log(x) / (2.0 * PI) : -b * std::log(x) / (2.0 * PI));
    if (qt) {
        // τ is fixed by X only modulo ib; the leading coefficient ∏e^{−πτ/b} fixes the sign
        cplx prod = 1.0;
        for (cplx t : tau) prod *= std::exp(-PI * t / b);
        if (std::abs(prod + c(N)) < std::abs(prod - c(N))) tau[0] += I * b;
        fit.constraint_residual = std::abs(c(N) - std::exp(-0.5 * a * spec.p0)) / std::abs(c(N));
    } else {
        cplx prod = 1.0;
        for (cplx x : X) prod *= x;
        const cplx target = tau_product_target(spec, dual);
        fit.constraint_residual = std::abs(prod - target) / std::abs(target);
    }
    fit.tau = {tau, dual ? RootFamily::TauDual : RootFamily::TauDirect};
    return fit;
}

Decomposition decompose(const QFun& q, const QSolution& qp, const QSolution& qm, int n) {
    const ModelSpec& spec = qp.spec;
    const ModularPair& mp = spec.mp;
    QFun fp = [&](cplx l) { return q_eval(qp, l); };
    QFun fm = [&](cplx l) { return q_eval(qm, l); };
    std::vector<cplx> avoid = qp.delta.roots;
    avoid.insert(avoid.end(), qp.delta_dual.roots.begin(), qp.delta_dual.roots.end());
    const double dmin = 0.05 * mp.min_abs();
    Decomposition d;
    auto P = [&](cplx l, cplx& pp, cplx& pm) {
        const cplx w = wronskian(fp, fm, l, spec, false);
        if (std::abs(w) < 1e-300) throw PoleError("decompose: vanishing Wronskian at a grid point");
        pp = wronskian(q, fm, l, spec, false) / w;
        pm = -wronskian(q, fp, l, spec, false) / w;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx l = mp.point((i + 0.5) / n - 0.5, (j + 0.5) / n - 0.5);
            for (int k = 0; k < 16; ++k) {
                bool ok = true;
                for (cplx m : avoid) ok = ok && lattice_distance(l - m, mp) >= dmin;
                if (ok) break;
                l += mp.point(0.013, 0.029);
            }
            cplx pp, pm;
            P(l, pp, pm);
            d.grid.push_back(l);
            d.P_plus.push_back(pp);
            d.P_minus.push_back(pm);
            const double sc = std::abs(pp) + std::abs(pm);
            for (bool dual : {false, true}) {
                // shift towards the contour strip, where the continuation of v↑/v↓ is shallow
                const double sc0 = mp.coords(l)[dual ? 1 : 0];
                cplx pp2, pm2;
                P(l + (sc0 < 0 ? 1.0 : -1.0) * I * mp.shift(dual), pp2, pm2);
                d.ellipticity_residual =
                    std::max(d.ellipticity_residual, (std::abs(pp2 - pp) + std::abs(pm2 - pm)) / sc);
            }
        }
    return d;
}

}  // namespace bnlie
