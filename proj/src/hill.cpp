#include "bnlie/hill.hpp"

#include <cmath>
#include <sstream>

namespace bnlie {

namespace {

struct KShape {
    cplx step;  // shift per row
    cplx diag;
    cplx beta_scale;  // ρ^{ω} times e^{2ωζ} when present
};

KShape shape(KSide side, const RootSet& tau, const ModelSpec& spec) {
    const bool dual = tau.dual();
    const cplx a = spec.mp.shift(dual);
    const cplx wz = omega_zeta(tau, spec);
    const cplx r = spec.rho_omega(dual);
    // K₋ and K̃₊ carry the ζ factors
    const bool zeta_side = (side == KSide::Minus) != dual;
    const cplx step = (side == KSide::Plus ? 1.0 : -1.0) * I * a;
    if (zeta_side) return {step, std::exp(wz), r * std::exp(2.0 * wz)};
    return {step, 1.0, r};
}

void check_k_pole(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec, double eps) {
    // poles at λ = τ ∓ ikω + (period lattice), k ≥ 1
    if (eps < 0) eps = 1e-6 * spec.mp.min_abs();
    const bool dual = tau.dual();
    const double sgn = side == KSide::Plus ? -1.0 : 1.0;
    for (cplx t : tau.roots) {
        auto xy = spec.mp.coords(lambda - t);
        const double s = dual ? xy[1] : xy[0];
        const double u = dual ? xy[0] : xy[1];
        const long k = std::lround(sgn * s);
        if (k < 1) continue;
        const double ur = std::round(u);
        const cplx pole = dual ? spec.mp.point(ur, sgn * k) : spec.mp.point(sgn * k, ur);
        if (std::abs(lambda - t - pole) < eps) {
            std::ostringstream os;
            os << "K determinant: lambda within " << eps << " of a pole (shift " << k << ")";
            throw PoleError(os.str(), dual ? long(ur) : k, dual ? k : long(ur));
        }
    }
}

// log of 2 sinh(z) without overflow
cplx log_2sinh(cplx z) {
    if (z.real() >= 0) return z + std::log(1.0 - std::exp(-2.0 * z));
    return -z + std::log(std::exp(2.0 * z) - 1.0);
}

cplx log_t(cplx lambda, const RootSet& tau, const ModelSpec& spec) {
    const bool dual = tau.dual();
    const cplx b = spec.mp.period(dual);
    cplx s = 0.0;
    for (cplx t : tau.roots) {
        if (spec.kind == ModelKind::QToda) {
            s += log_2sinh(PI * (lambda - t) / b);
        } else {
            const cplx u = -2.0 * PI * lambda / b, v = -2.0 * PI * t / b;
            if (u.real() >= v.real())
                s += u + std::log(1.0 - std::exp(v - u));
            else
                s += v + std::log(std::exp(u - v) - 1.0);
        }
    }
    return s;
}

}  // namespace

DetValue k_det(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec,
               const TruncationPolicy& pol) {
    check_k_pole(side, lambda, tau, spec, pol.pole_eps);
    const KShape sh = shape(side, tau, spec);
    cplx Dm2 = 1.0, Dm1 = sh.diag;
    if (spec.rho_zero) return {std::pow(sh.diag, 1), 1, 0.0};
    cplx tprev = t_eval(lambda + sh.step, tau, spec);
    int quiet = 0;
    double tail = 0.0;
    for (int k = 2; k <= pol.n_max; ++k) {
        const cplx tk = t_eval(lambda + double(k) * sh.step, tau, spec);
        const cplx beta = sh.beta_scale / (tprev * tk);
        const cplx D = sh.diag * Dm1 - beta * Dm2;
        tail = std::abs(D - Dm1);
        Dm2 = Dm1;
        Dm1 = D;
        tprev = tk;
        if (!std::isfinite(std::abs(D))) break;
        if (tail < pol.tol * std::abs(D)) {
            if (++quiet >= 2 && k >= pol.n_min) return {D, k, tail};
        } else {
            quiet = 0;
        }
    }
    std::ostringstream os;
    os << "K determinant did not converge within n_max=" << pol.n_max << " (last increment "
       << tail << ")";
    throw NonConvergence(os.str(), tail);
}

DetValue k_plus(cplx lambda, const RootSet& tau, const ModelSpec& spec,
                const TruncationPolicy& pol) {
    return k_det(KSide::Plus, lambda, tau, spec, pol);
}

DetValue k_minus(cplx lambda, const RootSet& tau, const ModelSpec& spec,
                 const TruncationPolicy& pol) {
    return k_det(KSide::Minus, lambda, tau, spec, pol);
}

cplx k_truncated(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec, int n) {
    const KShape sh = shape(side, tau, spec);
    if (n <= 0) return 1.0;
    cplx Dm2 = 1.0, Dm1 = sh.diag;
    if (spec.rho_zero) return std::pow(sh.diag, n);
    cplx tprev = t_eval(lambda + sh.step, tau, spec);
    for (int k = 2; k <= n; ++k) {
        const cplx tk = t_eval(lambda + double(k) * sh.step, tau, spec);
        const cplx D = sh.diag * Dm1 - sh.beta_scale / (tprev * tk) * Dm2;
        Dm2 = Dm1;
        Dm1 = D;
        tprev = tk;
    }
    return Dm1;
}

double k_increment_log(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec,
                       int n) {
    const KShape sh = shape(side, tau, spec);
    if (std::abs(sh.diag - 1.0) > 0.0)
        throw DomainError("k_increment_log: only unit-diagonal determinants are supported");
    if (spec.rho_zero || n < 1) return -INFINITY;
    // D_m − D_{m−1} = −β_m D_{m−2}; β_m kept in log form
    const cplx lrho = std::log(sh.beta_scale);
    std::vector<cplx> D(2 * n + 1);
    std::vector<cplx> lbeta(2 * n + 1);
    D[0] = 1.0;
    D[1] = 1.0;
    cplx lt_prev = log_t(lambda + sh.step, tau, spec);
    for (int m = 2; m <= 2 * n; ++m) {
        const cplx lt = log_t(lambda + double(m) * sh.step, tau, spec);
        lbeta[m] = lrho - lt_prev - lt;
        D[m] = D[m - 1] - std::exp(lbeta[m]) * D[m - 2];
        lt_prev = lt;
    }
    const cplx ref = lbeta[n + 1];
    cplx acc = 0.0;
    for (int m = n + 1; m <= 2 * n; ++m) acc -= std::exp(lbeta[m] - ref) * D[m - 2];
    return ref.real() + std::log(std::abs(acc));
}

cplx hill_det(cplx lambda, const RootSet& tau, const ModelSpec& spec,
              const TruncationPolicy& pol) {
    const bool dual = tau.dual();
    const cplx a = spec.mp.shift(dual);
    const cplx l1 = lambda + I * a;
    const cplx kp0 = k_plus(lambda, tau, spec, pol).value;
    const cplx km1 = k_minus(l1, tau, spec, pol).value;
    if (spec.rho_zero) return kp0 * km1;
    const cplx kp1 = k_plus(l1, tau, spec, pol).value;
    const cplx km0 = k_minus(lambda, tau, spec, pol).value;
    return kp0 * km1 - spec.rho_omega(dual) * std::exp(omega_zeta(tau, spec)) * kp1 * km0 /
                           (t_eval(lambda, tau, spec) * t_eval(l1, tau, spec));
}

cplx theta_side(cplx lambda, const std::vector<cplx>& mu, const ModelSpec& spec, bool dual) {
    return dual ? theta_dual_prod(lambda, mu, spec.mp, spec.products)
                : theta_prod(lambda, mu, spec.mp, spec.products);
}

cplx hill_factorized(cplx lambda, const HillFactorization& hf, const RootSet& tau,
                     const ModelSpec& spec) {
    const bool dual = tau.dual();
    return hf.h_const * theta_side(lambda, hf.delta.roots, spec, dual) /
           theta_side(lambda, tau.roots, spec, dual);
}

namespace {

double min_lattice_dist(cplx z, const std::vector<cplx>& pts, const ModularPair& mp) {
    double d = 1e300;
    for (cplx p : pts) d = std::min(d, lattice_distance(z - p, mp));
    return d;
}

// Newton on F = ℋ·θ_τ, which is entire and vanishes at δ + lattice.
bool newton_zero(const RootSet& tau, const ModelSpec& spec, const TruncationPolicy& pol,
                 const NewtonOptions& nopt, cplx& z, int& iters) {
    const bool dual = tau.dual();
    const double h = 1e-6 * spec.mp.min_abs();
    // ℋ has poles at τ that θ_τ cancels, so the iterates may sit very close to them
    TruncationPolicy p = pol;
    p.pole_eps = 1e-13 * spec.mp.min_abs();
    auto F = [&](cplx l) { return hill_det(l, tau, spec, p) * theta_side(l, tau.roots, spec, dual); };
    for (int it = 0; it < nopt.max_iter; ++it) {
        const cplx f = F(z);
        const cplx d = (F(z + h) - F(z - h)) / (2.0 * h);
        if (d == 0.0 || !std::isfinite(std::abs(d))) return false;
        const cplx step = f / d;
        z -= step;
        iters = it + 1;
        if (!std::isfinite(std::abs(z))) return false;
        if (std::abs(step) < nopt.step_tol * std::max(1.0, std::abs(z))) return true;
    }
    return false;
}

}  // namespace

HillFactorization find_delta(const RootSet& tau, const ModelSpec& spec,
                             const TruncationPolicy& pol, const NewtonOptions& nopt) {
    if (tau.family != RootFamily::TauDirect && tau.family != RootFamily::TauDual)
        throw DomainError("find_delta: expects a tau root set");
    if (int(tau.size()) != spec.N) throw DomainError("find_delta: root count differs from N");
    check_distinct(tau, spec.mp);
    const bool dual = tau.dual();
    const ModularPair& mp = spec.mp;
    const double off = 1e-3 * mp.min_abs();
    const cplx nudge = off * std::exp(I * 0.37);

    HillFactorization hf;
    hf.delta.family = dual ? RootFamily::DeltaDual : RootFamily::Delta;

    auto solve_all = [&](const ModelSpec& s, std::vector<cplx>& seeds) {
        int total = 0;
        for (auto& z : seeds) {
            int it = 0;
            cplx w = z;
            if (min_lattice_dist(w, tau.roots, mp) < off) w += nudge;
            if (!newton_zero(tau, s, pol, nopt, w, it)) return false;
            z = w;
            total += it;
        }
        hf.newton_iterations += total;
        return true;
    };

    std::vector<cplx> roots = tau.roots;
    bool ok = spec.rho_zero;
    if (!ok) {
        try {
            ok = solve_all(spec, roots);
        } catch (const NonConvergence&) {
            ok = false;
        }
    }
    if (!ok && !spec.rho_zero && spec.kind == ModelKind::QToda) {
        // continuation ladder ρ/256, ρ/128, ..., ρ
        roots = tau.roots;
        ok = true;
        for (int j = 0; j <= 8 && ok; ++j) {
            const ModelSpec s = spec.with_log_rho(spec.L_rho + std::log(std::ldexp(1.0, j - 8)));
            ok = solve_all(s, roots);
            hf.ladder_rungs = j + 1;
        }
    }
    if (!ok) throw NonConvergence("find_delta: Newton did not converge from the tau seeds", 0.0);

    hf.delta.roots = roots;
    check_distinct(hf.delta, mp);

    // lattice normalisation of the sum
    const cplx target = mp.omega1() * mp.omega2() * spec.p0 / (2.0 * PI);
    cplx S = -target;
    for (cplx d : roots) S += d;
    const auto ab = mp.coords(S);
    const double m = std::round(ab[0]), n = std::round(ab[1]);
    if (m != 0.0 || n != 0.0) {
        // move the root whose shifted position stays closest to the seed cloud
        std::size_t best = 0;
        double bestd = 1e300;
        cplx mean = 0.0;
        for (cplx t : tau.roots) mean += t / double(tau.size());
        for (std::size_t k = 0; k < roots.size(); ++k) {
            const double d = std::abs(roots[k] - mp.point(m, n) - mean);
            if (d < bestd) bestd = d, best = k;
        }
        hf.delta.roots[best] -= mp.point(m, n);
    }
    S = -target;
    for (cplx d : hf.delta.roots) S += d;
    hf.sum_residual = std::abs(S);

    // 𝔥 from a probe point far from every lattice
    std::vector<cplx> avoid = tau.roots;
    avoid.insert(avoid.end(), hf.delta.roots.begin(), hf.delta.roots.end());
    cplx probe = 0.0;
    double pd = -1.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const cplx c = mp.point((i + 0.5) / 8.0 - 0.5, (j + 0.5) / 8.0 - 0.5);
            const double d = min_lattice_dist(c, avoid, mp);
            if (d > pd) pd = d, probe = c;
        }
    hf.h_const = hill_det(probe, tau, spec, pol) * theta_side(probe, tau.roots, spec, dual) /
                 theta_side(probe, hf.delta.roots, spec, dual);

    // 12-point verification grid (3 × 4), nudged away from the lattices
    const double dmin = 0.05 * mp.min_abs();
    double res = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) {
            double x = -0.35 + 0.35 * i + 0.013, y = -0.375 + 0.25 * j + 0.021;
            cplx c = mp.point(x, y);
            for (int tries = 0; tries < 16 && min_lattice_dist(c, avoid, mp) < dmin; ++tries)
                c = mp.point(x += 0.031, y += 0.017);
            hf.grid.push_back(c);
            const cplx Hd = hill_det(c, tau, spec, pol);
            const cplx Hf = hill_factorized(c, hf, tau, spec);
            res = std::max(res, std::abs(Hd - Hf) / std::max(std::abs(Hd), 1e-300));
        }
    hf.residual = res;
    return hf;
}

}  // namespace bnlie
