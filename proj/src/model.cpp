#include "bnlie/model.hpp"

#include <cmath>
#include <sstream>

namespace bnlie {

namespace {

void fill_logs(ModelSpec& s) {
    const cplx W = s.mp.omega1() * s.mp.omega2();
    s.L_g = -PI * s.kappa / W;
    if (s.kind == ModelKind::QToda) {
        s.L_kappa = 0.0;
        s.L_sigma = -0.5 * I * PI * double(s.N);
    } else {
        s.L_kappa = -s.p0;
        s.L_sigma = I * PI * double(s.N);
    }
    s.L_rho = s.L_kappa + 2.0 * double(s.N) * s.L_g;
}

}  // namespace

ModelSpec ModelSpec::make(ModelKind kind, int N, cplx kappa, cplx p0, const ModularPair& mp) {
    if (N < 1) throw DomainError("ModelSpec: N must be >= 1");
    ModelSpec s;
    s.kind = kind;
    s.N = N;
    s.kappa = kappa;
    s.p0 = p0;
    s.mp = mp;
    fill_logs(s);
    s.check_gate();
    return s;
}

ModelSpec ModelSpec::with_log_rho(cplx L) const {
    ModelSpec s = *this;
    s.rho_zero = false;
    s.L_rho = L;
    s.L_g = (L - s.L_kappa) / (2.0 * double(s.N));
    s.kappa = -s.L_g * s.mp.omega1() * s.mp.omega2() / PI;
    s.check_gate();
    return s;
}

ModelSpec ModelSpec::with_rho_zero() const {
    ModelSpec s = *this;
    s.rho_zero = true;
    return s;
}

ModelSpec ModelSpec::swapped() const {
    ModelSpec s = *this;
    s.mp = ModularPair::swapped(mp);
    return s;
}

double ModelSpec::gate_value() const {
    if (rho_zero) return 0.0;
    double g = 0.0;
    for (bool d : {false, true})
        g = std::max(g, std::abs(std::exp(mp.shift(d) * (2.0 * p0 + L_rho))));
    return g;
}

void ModelSpec::check_gate() const {
    if (kind != ModelKind::Toda2) return;
    const double g = gate_value();
    if (!(g < 1.0)) {
        std::ostringstream os;
        os << "Toda2 regime gate violated: max_a |exp(omega_a (2 p0 + L_rho))| = " << g;
        throw DomainError(os.str());
    }
}

double lattice_distance(cplx z, const ModularPair& mp) {
    const auto xy = mp.coords(z);
    double best = 1e300;
    const long m0 = std::lround(xy[0]), n0 = std::lround(xy[1]);
    for (long m = m0 - 1; m <= m0 + 1; ++m)
        for (long n = n0 - 1; n <= n0 + 1; ++n)
            best = std::min(best, std::abs(z - mp.point(double(m), double(n))));
    return best;
}

void check_distinct(const RootSet& rs, const ModularPair& mp, double eps) {
    if (eps < 0) eps = 1e-6 * mp.min_abs();
    for (std::size_t a = 0; a < rs.size(); ++a)
        for (std::size_t b = a + 1; b < rs.size(); ++b)
            if (lattice_distance(rs.roots[a] - rs.roots[b], mp) < eps) {
                std::ostringstream os;
                os << "roots " << a << " and " << b << " coincide modulo the period lattice";
                throw DomainError(os.str());
            }
}

cplx tau_product_target(const ModelSpec& spec, bool dual) {
    const cplx a = spec.mp.shift(dual);
    if (spec.kind == ModelKind::QToda) return std::exp(-a * spec.p0);
    // e^{-ω p0} + g^{2Nω}
    if (spec.rho_zero) return std::exp(-a * spec.p0);
    return std::exp(-a * spec.p0) + std::exp(a * (spec.L_rho - spec.L_kappa));
}

double constraint_residual(const RootSet& rs, const ModelSpec& spec) {
    const cplx w1 = spec.mp.omega1(), w2 = spec.mp.omega2();
    const bool dual = rs.dual();
    const cplx b = spec.mp.period(dual), a = spec.mp.shift(dual);
    cplx sum = 0.0;
    for (cplx r : rs.roots) sum += r;
    if (rs.family == RootFamily::Delta || rs.family == RootFamily::DeltaDual)
        return std::abs(sum - w1 * w2 * spec.p0 / (2.0 * PI));
    if (spec.kind == ModelKind::QToda)
        return std::abs(std::exp(-PI * sum / b) - std::exp(-0.5 * a * spec.p0));
    return std::abs(std::exp(-2.0 * PI * sum / b) - tau_product_target(spec, dual));
}

cplx omega_zeta(const RootSet& tau, const ModelSpec& spec) {
    if (spec.kind == ModelKind::QToda) return 0.0;
    const bool dual = tau.dual();
    cplx s = 0.0;
    for (cplx r : tau.roots) s += r;
    return spec.mp.shift(dual) * spec.p0 - 2.0 * PI * s / spec.mp.period(dual);
}

cplx t_eval_side(cplx lambda, const std::vector<cplx>& roots, const ModelSpec& spec, bool dual) {
    const cplx b = spec.mp.period(dual);
    cplx r = 1.0;
    if (spec.kind == ModelKind::QToda) {
        for (cplx t : roots) r *= 2.0 * std::sinh(PI * (lambda - t) / b);
    } else {
        const cplx e = std::exp(-2.0 * PI * lambda / b);
        for (cplx t : roots) r *= e - std::exp(-2.0 * PI * t / b);
    }
    return r;
}

cplx t_eval(cplx lambda, const RootSet& roots, const ModelSpec& spec) {
    return t_eval_side(lambda, roots.roots, spec, roots.dual());
}

std::pair<cplx, cplx> baxter_residual(const QFun& q, const RootSet& rd, const RootSet& rt,
                                      const ModelSpec& spec, cplx lambda) {
    const cplx s = spec.sigma();
    const cplx q0 = q(lambda);
    cplx out[2];
    for (int d = 0; d < 2; ++d) {
        const bool dual = d == 1;
        const cplx a = spec.mp.shift(dual);
        const cplx t = t_eval_side(lambda, dual ? rt.roots : rd.roots, spec, dual);
        const cplx gN = spec.g_pow(double(spec.N) * a);
        out[d] = t * q0 -
                 gN * (s * spec.kappa_pow(a) * q(lambda - I * a) + q(lambda + I * a) / s);
    }
    return {out[0], out[1]};
}

}  // namespace bnlie
