#include "bnlie/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bnlie {

std::vector<cplx> durand_kerner(const std::vector<cplx>& coeffs, int max_iter, double tol) {
    std::vector<cplx> c = coeffs;
    while (c.size() > 1 && c.back() == cplx(0.0)) c.pop_back();
    const int n = int(c.size()) - 1;
    if (n < 1) throw DomainError("durand_kerner: constant polynomial");
    for (cplx& x : c) x /= coeffs[n];
    auto eval = [&](cplx x) {
        cplx s = 0.0;
        for (int j = n; j >= 0; --j) s = s * x + c[j];
        return s;
    };
    const double r = std::max(std::pow(std::abs(c[0]), 1.0 / n), 1e-3);
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) z[k] = r * std::exp(I * (2.0 * PI * k / n + 0.4));
    for (int it = 0; it < max_iter; ++it) {
        double step = 0.0;
        for (int k = 0; k < n; ++k) {
            cplx den = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != k) den *= z[k] - z[j];
            const cplx dz = eval(z[k]) / den;
            z[k] -= dz;
            step = std::max(step, std::abs(dz) / std::max(std::abs(z[k]), 1e-300));
        }
        if (step < tol) return z;
    }
    double worst = 0.0;
    for (cplx x : z) worst = std::max(worst, std::abs(eval(x)));
    if (worst > 1e-8 * std::max(1.0, std::abs(c[0])))
        throw NonConvergence("durand_kerner: root extraction did not converge", worst);
    return z;
}

std::vector<cplx> newton_to_elementary(const std::vector<cplx>& p, cplx sigma_N, int N) {
    if (int(p.size()) < N - 1) throw DomainError("newton_to_elementary: missing power sums");
    std::vector<cplx> e(N + 1, 0.0);
    e[0] = 1.0;
    for (int k = 1; k <= N - 1; ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) s += (j % 2 == 1 ? 1.0 : -1.0) * e[k - j] * p[j - 1];
        e[k] = s / double(k);
    }
    e[N] = sigma_N;
    return {e.begin() + 1, e.end()};
}

cplx alpha_k(int k, cplx lambda, const ModularPair& mp, bool dual) {
    return std::exp(-2.0 * PI * double(k) * lambda / mp.period(dual));
}

NewtonSumParts newton_sum_parts(int k, const NlieSolution& sol) {
    const int N = sol.spec.N;
    if (k < 1 || k > N - 1) throw DomainError("newton_sum: k must lie in 1..N-1");
    const Contour& c = sol.contour;
    const bool dual = c.dual;
    NewtonSumParts out{0.0, 0.0};
    for (cplx d : sol.delta.roots) out.roots += alpha_k(k, d, sol.spec.mp, dual);
    if (sol.spec.rho_zero) return out;
    // α_k′ = −(2πk/b) α_k
    const cplx dk = -2.0 * PI * double(k) / c.b;
    cplx s = 0.0;
    for (int j = 0; j < c.n; ++j) {
        const cplx m = c.nodes[j];
        s += (alpha_k(k, m - 0.5 * I * c.a, sol.spec.mp, dual) - alpha_k(k, m + 0.5 * I * c.a, sol.spec.mp, dual)) *
             sol.logV[j];
    }
    out.correction = dk * s * c.weight / (2.0 * I * PI);
    return out;
}

cplx newton_sum(int k, const NlieSolution& sol) { return newton_sum_parts(k, sol).value(); }

namespace {

struct Side {
    std::vector<cplx> sums, sym;
    RootSet tau;
    std::vector<int> shifts;
    double crosscheck = 0.0;
    double correction = 0.0;
};

double crosscheck(const RootSet& tau, const QSolution& qp, const QSolution& qm, const std::vector<cplx>& probes,
                  bool dual) {
    double worst = 0.0;
    for (cplx l : probes) {
        const cplx ref = t_from_q(qp, qm, l, dual);
        worst = std::max(worst, std::abs(t_eval(l, tau, qp.spec) - ref) / std::max(std::abs(ref), 1e-300));
    }
    return worst;
}

Side reconstruct_side(const NlieSolution& sol, const QSolution& qp, const QSolution& qm,
                      const std::vector<cplx>& probes, const SpectrumConfig& cfg) {
    const ModelSpec& spec = sol.spec;
    const bool dual = sol.contour.dual;
    const int N = spec.N;
    const cplx b = spec.mp.period(dual), a = spec.mp.shift(dual);
    Side out;
    for (int k = 1; k <= N - 1; ++k) {
        const auto p = newton_sum_parts(k, sol);
        out.sums.push_back(p.value());
        out.correction = std::max(out.correction, std::abs(p.correction) / std::max(1.0, std::abs(p.roots)));
    }
    const cplx sigmaN = tau_product_target(spec, dual);
    out.sym = newton_to_elementary(out.sums, sigmaN, N);

    // ∏(X − X_a) = Σ_j (−1)^{N−j} e_{N−j} X^j, X = e^{−2πτ/b}
    std::vector<cplx> poly(N + 1);
    poly[N] = 1.0;
    for (int j = 0; j < N; ++j) poly[j] = ((N - j) % 2 == 0 ? 1.0 : -1.0) * out.sym[N - j - 1];
    const std::vector<cplx> X = N == 1 ? std::vector<cplx>{sigmaN} : durand_kerner(poly);

    RootSet base{{}, dual ? RootFamily::TauDual : RootFamily::TauDirect};
    for (cplx x : X) base.roots.push_back(-b * std::log(x) / (2.0 * PI));
    // q-Toda: the sum constraint fixes the parity of the ib representatives
    if (spec.kind == ModelKind::QToda && constraint_residual(base, spec) > 1e-6 * std::abs(std::exp(-0.5 * a * spec.p0)))
        base.roots.back() += I * b;

    out.tau = base;
    out.shifts.assign(N, 0);
    out.crosscheck = crosscheck(base, qp, qm, probes, dual);
    if (cfg.shift_search && out.crosscheck > cfg.crosscheck_tol && N <= 6) {
        int combos = 1;
        for (int k = 0; k < N; ++k) combos *= 3;
        for (int c = 1; c < combos; ++c) {
            std::vector<int> p(N);
            RootSet t = base;
            for (int k = 0, r = c; k < N; ++k, r /= 3) {
                p[k] = r % 3 - 1;
                t.roots[k] -= I * double(p[k]) * a;
            }
            const double res = crosscheck(t, qp, qm, probes, dual);
            if (res < out.crosscheck) {
                out.crosscheck = res;
                out.tau = t;
                out.shifts = p;
            }
        }
    }
    return out;
}

}  // namespace

SpectrumResult reconstruct_tau(const NlieSolution& direct, const NlieSolution& dual, const SpectrumConfig& cfg) {
    if (direct.contour.dual || !dual.contour.dual) throw DomainError("reconstruct_tau: expected a direct and a dual solution");
    auto d = std::make_shared<const NlieSolution>(direct);
    auto t = std::make_shared<const NlieSolution>(dual);
    const QSolution qp = make_q(QSign::Plus, d, t), qm = make_q(QSign::Minus, d, t);
    std::vector<cplx> avoid = direct.delta.roots;
    avoid.insert(avoid.end(), dual.delta.roots.begin(), dual.delta.roots.end());
    const auto probes = probe_points(4 * direct.spec.N, avoid, direct.spec.mp, cfg.probe_seed, 0.4);

    const Side a = reconstruct_side(direct, qp, qm, probes, cfg);
    const Side b = reconstruct_side(dual, qp, qm, probes, cfg);
    SpectrumResult r;
    r.newton_sums = a.sums;
    r.newton_sums_dual = b.sums;
    r.elementary_syms = a.sym;
    r.elementary_syms_dual = b.sym;
    r.tau = a.tau;
    r.tau_dual = b.tau;
    r.shifts = a.shifts;
    r.shifts_dual = b.shifts;
    r.crosscheck_direct = a.crosscheck;
    r.crosscheck_dual = b.crosscheck;
    r.crosscheck_residual = std::max(a.crosscheck, b.crosscheck);
    r.correction_direct = a.correction;
    r.correction_dual = b.correction;
    if (r.crosscheck_residual > cfg.crosscheck_tol) {
        std::ostringstream os;
        os << "cross-check residual " << r.crosscheck_residual
           << " above tolerance: the side conditions tau_k -+ i a/2 in B-+ may fail, so the recovered roots can be "
              "off by shifts tau_k -> tau_k + i p_k a beyond the searched range";
        r.warning = os.str();
    }
    return r;
}

SpectrumResult reconstruct_tau(const BetheState& state, const SpectrumConfig& cfg) {
    if (!state.direct || !state.dual) throw DomainError("reconstruct_tau: state carries no NLIE solutions");
    return reconstruct_tau(*state.direct, *state.dual, cfg);
}

}  // namespace bnlie
