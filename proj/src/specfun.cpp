#include "bnlie/specfun.hpp"

#include <cmath>
#include <sstream>

namespace bnlie {

ModularPair::ModularPair(cplx omega1, cplx omega2) : w1_(omega1), w2_(omega2), orient_(1) {
    if (omega1 == 0.0 || omega2 == 0.0)
        throw DomainError("ModularPair: periods must be nonzero");
    if (!(std::imag(omega1 / omega2) > 0.0))
        throw DomainError("ModularPair: Im(omega1/omega2) must be positive (|q| < 1)");
}

ModularPair ModularPair::swapped(const ModularPair& mp) {
    return ModularPair(mp.w2_, mp.w1_, -mp.orient_);
}

double ModularPair::min_abs() const { return std::min(std::abs(w1_), std::abs(w2_)); }

std::array<double, 2> ModularPair::coords(cplx lambda) const {
    const cplx a = I * w1_, b = I * w2_;
    const double det = a.real() * b.imag() - a.imag() * b.real();
    const double x = (lambda.real() * b.imag() - lambda.imag() * b.real()) / det;
    const double y = (a.real() * lambda.imag() - a.imag() * lambda.real()) / det;
    return {x, y};
}

cplx q_pochhammer(cplx z, cplx p, const ThetaProductConfig& cfg) {
    const double ap = std::abs(p);
    if (!(ap < 1.0)) throw DomainError("q_pochhammer: |p| must be < 1");
    cplx r = 1.0, zp = z;
    double tail = 0.0;
    for (int k = 0; k < cfg.max_terms; ++k) {
        r *= 1.0 - zp;
        zp *= p;
        tail = std::abs(zp) / (1.0 - ap);
        if (tail < cfg.tol) return r;
    }
    std::ostringstream os;
    os << "q_pochhammer: max_terms=" << cfg.max_terms << " reached, tail bound " << tail;
    throw NonConvergence(os.str(), tail);
}

cplx q_pochhammer_ext(cplx z, cplx p, const ThetaProductConfig& cfg) {
    const double ap = std::abs(p);
    if (ap < 1.0) return q_pochhammer(z, p, cfg);
    if (ap == 1.0) throw DomainError("q_pochhammer_ext: |p| = 1");
    return 1.0 / q_pochhammer(z / p, 1.0 / p, cfg);
}

cplx theta(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg) {
    const cplx q2 = mp.q() * mp.q();
    const cplx e = std::exp(2.0 * PI * lambda / mp.omega2());
    return q_pochhammer_ext(1.0 / e, q2, cfg) * q_pochhammer_ext(q2 * e, q2, cfg);
}

cplx theta_dual(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg) {
    const cplx qt = mp.q_dual();
    const cplx p = 1.0 / (qt * qt);
    const cplx e = std::exp(2.0 * PI * lambda / mp.omega1());
    return q_pochhammer_ext(e, p, cfg) * q_pochhammer_ext(p / e, p, cfg);
}

cplx theta_prod(cplx lambda, const std::vector<cplx>& mu, const ModularPair& mp,
                const ThetaProductConfig& cfg) {
    cplx r = 1.0;
    for (cplx m : mu) r *= theta(lambda - m, mp, cfg);
    return r;
}

cplx theta_dual_prod(cplx lambda, const std::vector<cplx>& mu, const ModularPair& mp,
                     const ThetaProductConfig& cfg) {
    cplx r = 1.0;
    for (cplx m : mu) r *= theta_dual(lambda - m, mp, cfg);
    return r;
}

cplx modular_B(cplx z, const ModularPair& mp) {
    const cplx w1 = mp.omega1(), w2 = mp.omega2(), W = w1 * w2, Om = w1 + w2;
    return PI * z * z / W + I * PI * Om * z / W - PI * (w1 * w1 + 3.0 * W + w2 * w2) / (6.0 * W);
}

namespace {

void check_pole(cplx lambda, const ModularPair& mp, double eps) {
    if (eps < 0) eps = 1e-6 * mp.min_abs();
    const auto xy = mp.coords(lambda);
    const long m = std::lround(xy[0]), n = std::lround(xy[1]);
    if (m <= -1 && n <= -1 && std::abs(lambda - mp.point(double(m), double(n))) < eps) {
        std::ostringstream os;
        os << "double_sine: pole at i*" << m << "*omega1 + i*" << n << "*omega2";
        throw PoleError(os.str(), m, n);
    }
}

}  // namespace

cplx double_sine(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg,
                 double pole_eps) {
    check_pole(lambda, mp, pole_eps);
    const cplx q2 = mp.q() * mp.q();
    const cplx qt = mp.q_dual();
    const cplx pt = 1.0 / (qt * qt);
    const cplx num = q_pochhammer_ext(std::exp(-2.0 * PI * lambda / mp.omega2()), q2, cfg);
    const cplx den = q_pochhammer_ext(pt * std::exp(-2.0 * PI * lambda / mp.omega1()), pt, cfg);
    return num / den;
}

cplx double_sine_alt(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg,
                     double pole_eps) {
    check_pole(lambda, mp, pole_eps);
    const cplx q2 = mp.q() * mp.q();
    const cplx qt = mp.q_dual();
    const cplx pt = 1.0 / (qt * qt);
    const cplx num = q_pochhammer_ext(std::exp(2.0 * PI * lambda / mp.omega1()), pt, cfg);
    const cplx den = q_pochhammer_ext(q2 * std::exp(2.0 * PI * lambda / mp.omega2()), q2, cfg);
    return std::exp(I * modular_B(lambda, mp)) * num / den;
}

cplx quantum_dilog(cplx z, const ModularPair& mp, const ThetaProductConfig& cfg, double pole_eps) {
    const cplx l = z - 0.5 * I * mp.Omega();
    return std::exp(-0.5 * I * modular_B(l, mp)) * double_sine(l, mp, cfg, pole_eps);
}

}  // namespace bnlie
