#include <random>

#include "bnlie/spectrum.hpp"
#include "doctest.h"
#include "pipeline.hpp"

using namespace bnlie;

namespace {

// max over seed roots of the distance to the nearest recovered root, in X = e^{−2πτ/b}
double x_mismatch(const RootSet& got, const RootSet& want, const ModelSpec& s) {
    const cplx b = s.mp.period(want.dual());
    double worst = 0.0;
    for (cplx w : want.roots) {
        const cplx xw = std::exp(-2.0 * PI * w / b);
        double best = 1e300;
        for (cplx g : got.roots) best = std::min(best, std::abs(std::exp(-2.0 * PI * g / b) - xw) / std::abs(xw));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("Newton identities") {
    CHECK(newton_to_elementary({cplx(0.7, 0.2)}, 3.0, 2)[0] == cplx(0.7, 0.2));
    CHECK(newton_to_elementary({3.0, 5.0}, 1.0, 3)[1] == cplx(2.0));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int N : {2, 3, 5}) {
        std::vector<cplx> r;
        for (int i = 0; i < N; ++i) r.push_back(cplx(u(rng), u(rng)));
        std::vector<cplx> p;
        for (int k = 1; k <= N - 1; ++k) {
            cplx s = 0.0;
            for (cplx x : r) s += std::pow(x, k);
            p.push_back(s);
        }
        // brute-force elementary symmetric functions
        std::vector<cplx> e(N + 1, 0.0);
        e[0] = 1.0;
        for (cplx x : r)
            for (int k = N; k >= 1; --k) e[k] += e[k - 1] * x;
        const auto got = newton_to_elementary(p, e[N], N);
        for (int k = 1; k <= N; ++k) CHECK(std::abs(got[k - 1] - e[k]) < 1e-12);
    }
    CHECK_THROWS_AS(newton_to_elementary({}, 1.0, 3), DomainError);
}

TEST_CASE("Durand-Kerner") {
    const std::vector<cplx> roots{cplx(0.5, 0.1), cplx(-1.2, 0.3), cplx(0.1, -2.0)};
    std::vector<cplx> c{1.0};
    for (cplx r : roots) {
        std::vector<cplx> n(c.size() + 1, 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            n[j + 1] += c[j];
            n[j] -= r * c[j];
        }
        c = n;
    }
    const auto z = durand_kerner(c);
    for (cplx r : roots) {
        double best = 1e300;
        for (cplx x : z) best = std::min(best, std::abs(x - r));
        CHECK(best < 1e-12);
    }
    CHECK(durand_kerner(c) == z);  // deterministic
    CHECK_THROWS_AS(durand_kerner({2.0}), DomainError);
}

TEST_CASE("N = 1: no Newton sums, tau from the constraint") {
    auto s = fx::qtoda(1);
    s.p0 = 0.3;
    RootSet d{{s.mp.omega1() * s.mp.omega2() * s.p0 / (2.0 * PI)}, RootFamily::Delta};
    auto r = fx::qrun_selfdual(s, d, 128);
    CHECK_THROWS_AS(newton_sum(1, *r.direct), DomainError);
    const auto res = reconstruct_tau(*r.direct, *r.dual);
    CHECK(res.newton_sums.empty());
    CHECK(constraint_residual(res.tau, s) < 1e-12);
    CHECK(constraint_residual(res.tau_dual, s) < 1e-12);
    CHECK(res.crosscheck_residual < 1e-8);
}

TEST_CASE("round trip tau -> delta -> tau") {
    struct Case {
        ModelSpec s;
        RootSet tau, tau_dual;
    };
    const auto t2 = fx::toda2(2, 1e-3, cplx(0.05, 0.0));
    std::vector<Case> cases{{fx::qtoda(2), fx::tau2(), fx::as_dual(fx::tau2_alt())},
                            {fx::qtoda(3), fx::tau3(), fx::as_dual(fx::tau3())},
                            {t2, fx::toda2_tau(t2), fx::toda2_tau(t2, true)}};
    for (const auto& c : cases) {
        auto r = fx::qrun(c.s, c.tau, c.tau_dual);
        const auto res = reconstruct_tau(*r.direct, *r.dual);
        INFO("N = " << c.s.N << " warning: " << res.warning);
        CHECK(x_mismatch(res.tau, c.tau, c.s) < 1e-6);
        CHECK(x_mismatch(res.tau_dual, c.tau_dual, c.s) < 1e-6);
        CHECK(res.crosscheck_residual < 1e-6);
        CHECK(res.warning.empty());
        CHECK(constraint_residual(res.tau, c.s) < 1e-8);
        CHECK(constraint_residual(res.tau_dual, c.s) < 1e-8);
        // fitted roots reproduce the Newton sums
        for (int k = 1; k <= c.s.N - 1; ++k) {
            cplx p = 0.0;
            for (cplx t : res.tau.roots) p += alpha_k(k, t, c.s.mp, false);
            CHECK(fx::rel(p, res.newton_sums[k - 1]) < 1e-9);
        }
    }
}

TEST_CASE("contour correction is O(rho^omega)") {
    // per decade of |ρ^{ω₁}| the direct term drops by 10, the dual one by |ρ^{ω₂}| ratios
    std::vector<double> dir, dua, r2;
    for (double rho : {1e-3, 1e-4, 1e-5}) {
        const auto s = fx::qtoda(2, rho);
        auto r = fx::qrun(s, fx::tau2(), fx::as_dual(fx::tau2_alt()));
        const auto res = reconstruct_tau(*r.direct, *r.dual);
        dir.push_back(res.correction_direct);
        dua.push_back(res.correction_dual);
        r2.push_back(std::abs(s.rho_omega(true)));
    }
    for (int i = 0; i + 1 < 3; ++i) {
        INFO("direct " << dir[i] << " " << dir[i + 1] << " dual " << dua[i] << " " << dua[i + 1]);
        CHECK(dir[i] / dir[i + 1] == doctest::Approx(10.0).epsilon(0.05));
        CHECK(dua[i] / dua[i + 1] == doctest::Approx(r2[i] / r2[i + 1]).epsilon(0.05));
    }
}

TEST_CASE("rho = 0: tau = delta") {
    auto s = fx::qtoda(2).with_rho_zero();
    RootSet d{{cplx(0.2, 0.07), cplx(-0.2, -0.07)}, RootFamily::Delta};
    auto r = fx::qrun_selfdual(s, d, 32);
    for (int k = 1; k <= 1; ++k) {
        const auto p = newton_sum_parts(k, *r.direct);
        CHECK(p.correction == cplx(0.0));
    }
    const auto res = reconstruct_tau(*r.direct, *r.dual);
    for (cplx t : d.roots) {
        double best = 1e300;
        for (cplx g : res.tau.roots) best = std::min(best, std::abs(g - t));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("spectrum of a converged Bethe state") {
    const auto st = solve_bethe({{cplx(0.2, 0.15), cplx(-0.2, -0.15)}, RootFamily::Delta}, fx::qtoda(2));
    REQUIRE(st.converged);
    const auto res = reconstruct_tau(st);
    CHECK(res.crosscheck_residual < 1e-6);
    CHECK(constraint_residual(res.tau, fx::qtoda(2)) < 1e-8);
    CHECK(constraint_residual(res.tau_dual, fx::qtoda(2)) < 1e-8);
}
