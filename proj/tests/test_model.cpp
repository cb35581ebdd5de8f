#include "bnlie/model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace bnlie;

TEST_CASE("parameter logarithms") {
    auto s = fx::qtoda(2, 1e-3);
    CHECK(std::abs(s.rho_omega(false)) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(std::abs(s.L_rho - (s.L_kappa + 4.0 * s.L_g)) < 1e-15);
    CHECK(std::abs(s.sigma() - std::pow(-I, 2)) < 1e-15);
    auto t = fx::toda2(3);
    CHECK(std::abs(t.sigma() + 1.0) < 1e-15);
    CHECK(std::abs(t.L_kappa + t.p0) == 0.0);
    auto q3 = fx::qtoda(3);
    CHECK(std::abs(q3.sigma() - I) < 1e-15);
}

TEST_CASE("Toda2 regime gate") {
    // large ρ^{ω₂}: κ negative
    CHECK_THROWS_AS(ModelSpec::make(ModelKind::Toda2, 2, -0.2, 0.0, fx::ref_pair()), DomainError);
    CHECK_NOTHROW(fx::toda2());
    CHECK(fx::toda2().gate_value() < 1.0);
}

TEST_CASE("t_eval examples") {
    auto s = fx::qtoda(1);
    RootSet r{{0.0}, RootFamily::TauDirect};
    const cplx l(0.3, -0.1);
    CHECK(std::abs(t_eval(l, r, s) - 2.0 * std::sinh(PI * l / s.mp.omega2())) < 1e-15);
    CHECK(std::abs(t_eval(0.0, r, s)) == 0.0);

    auto t2 = fx::toda2();
    auto tau = fx::toda2_tau(t2);
    CHECK(fx::rel(t_eval(l + I * t2.mp.omega2(), tau, t2), t_eval(l, tau, t2)) < 1e-13);

    // leading asymptotics of the q-Toda polynomial
    auto s2 = fx::qtoda(2);
    auto tq = fx::tau2();
    const cplx L = 8.0 * s2.mp.omega2() + 0.1 * I;
    cplx expect = 1.0;
    for (cplx x : tq.roots) expect *= std::exp(-PI * x / s2.mp.omega2());
    CHECK(fx::rel(t_eval(L, tq, s2) * std::exp(-PI * 2.0 * L / s2.mp.omega2()), expect) < 1e-9);
}

TEST_CASE("dual evaluation shares the code path with swapped periods") {
    auto s = fx::qtoda(2);
    auto sw = s.swapped();
    RootSet d{fx::tau2().roots, RootFamily::TauDual};
    const cplx l(0.13, 0.41);
    CHECK(t_eval(l, d, s) == t_eval_side(l, d.roots, sw, false));
}

TEST_CASE("reality of t") {
    ModularPair sym(std::exp(I * PI / 4.0), std::exp(-I * PI / 4.0));
    auto s = fx::qtoda(2, 1e-3, sym);
    RootSet tr{{0.3, -0.3}, RootFamily::TauDirect};
    RootSet td{{0.3, -0.3}, RootFamily::TauDual};
    const cplx l(0.2, 0.35);
    CHECK(fx::rel(std::conj(t_eval(l, tr, s)), t_eval(std::conj(l), td, s)) < 1e-13);
}

TEST_CASE("constraints") {
    auto s = fx::qtoda(2);
    CHECK(constraint_residual(fx::tau2(), s) < 1e-14);
    CHECK(constraint_residual(fx::tau2(), s) == constraint_residual(fx::tau2(), s));
    RootSet bad{{cplx(0.2, 0.0), cplx(0.1, 0.0)}, RootFamily::TauDirect};
    CHECK(constraint_residual(bad, s) > 1e-3);
    auto t2 = fx::toda2();
    CHECK(constraint_residual(fx::toda2_tau(t2), t2) < 1e-13);
    CHECK(constraint_residual(fx::toda2_tau(t2, true), t2) < 1e-13);

    RootSet dup{{cplx(0.1, 0.1), cplx(0.1, 0.1) + s.mp.point(1, -2)}, RootFamily::Delta};
    CHECK_THROWS_AS(check_distinct(dup, s.mp), DomainError);
    CHECK_NOTHROW(check_distinct(fx::tau2(), s.mp));
}

TEST_CASE("omega_zeta") {
    auto s = fx::qtoda(2);
    CHECK(omega_zeta(fx::tau2(), s) == cplx(0.0));
    auto t2 = fx::toda2(2, 1e-3, cplx(0.1, 0.02));
    auto tau = fx::toda2_tau(t2);
    cplx prod = 1.0;
    for (cplx x : tau.roots) prod *= std::exp(-2.0 * PI * x / t2.mp.omega2());
    CHECK(fx::rel(std::exp(omega_zeta(tau, t2)), std::exp(t2.mp.omega1() * t2.p0) * prod) < 1e-13);
}

TEST_CASE("baxter_residual linearity") {
    auto s = fx::qtoda(2);
    RootSet td{fx::tau2().roots, RootFamily::TauDual};
    const cplx l(0.1, 0.2);
    auto r0 = baxter_residual([](cplx) { return cplx(0.0); }, fx::tau2(), td, s, l);
    CHECK(r0.first == cplx(0.0));
    CHECK(r0.second == cplx(0.0));
    QFun q = [](cplx x) { return std::exp(0.3 * x) + x * x; };
    const cplx c(1.5, -0.7);
    auto r1 = baxter_residual(q, fx::tau2(), td, s, l);
    auto r2 = baxter_residual([&](cplx x) { return c * q(x); }, fx::tau2(), td, s, l);
    CHECK(std::abs(r2.first - c * r1.first) < 1e-12 * std::abs(r2.first));
    CHECK(std::abs(r2.second - c * r1.second) < 1e-12 * std::abs(r2.second));
}
