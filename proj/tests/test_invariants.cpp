#include "bnlie/invariants.hpp"
#include "doctest.h"
#include "pipeline.hpp"

using namespace bnlie;

namespace {

void require_pass(const Suite& s) {
    for (const auto& c : s.checks) {
        INFO(s.name << "." << c.name << " = " << c.value << " (threshold " << c.threshold << ") " << c.note);
        CHECK(c.pass);
    }
}

ModularPair conj_pair() { return {std::exp(I * PI / 4.0), std::exp(-I * PI / 4.0)}; }

}  // namespace

TEST_CASE("specfun suite") {
    require_pass(specfun_suite(fx::ref_pair()));
    const auto s = specfun_suite(conj_pair());
    require_pass(s);
    CHECK(s.checks.size() == 9);
}

TEST_CASE("determinant, hill and nlie suites") {
    auto r = fx::qrun(fx::qtoda(2), fx::tau2(), fx::as_dual(fx::tau2_alt()));
    require_pass(determinant_suite(r.tau, r.spec));
    require_pass(determinant_suite(r.tau_dual, r.spec));
    require_pass(hill_suite(r.tau, r.hf, r.spec));
    require_pass(hill_suite(r.tau_dual, r.hf_dual, r.spec));
    require_pass(nlie_suite(r.tau, r.hf, *r.direct));
    require_pass(nlie_suite(r.tau_dual, r.hf_dual, *r.dual));
    require_pass(qfunction_suite(r.qp, r.qm));
    require_pass(spectrum_suite(reconstruct_tau(*r.direct, *r.dual), r.spec, &r.tau, &r.tau_dual));
}

TEST_CASE("bethe and reality suites") {
    const auto s = fx::qtoda(1);
    BetheConfig cfg;
    require_pass(bethe_suite(solve_bethe({{0.0}, RootFamily::Delta}, s, cfg, 1.0), s, cfg));
    for (int N : {1, 2, 3}) require_pass(reality_suite(fx::qtoda(N, 1e-3, conj_pair())));
    CHECK_THROWS_AS(reality_suite(fx::qtoda(2)), DomainError);
}

TEST_CASE("a failing check is reported as failing") {
    Suite s{"x", {}};
    s.add("nan", std::nan(""), 1.0);
    s.add("big", 2.0, 1.0);
    s.add("ok", 0.5, 1.0);
    CHECK_FALSE(s.checks[0].pass);
    CHECK_FALSE(s.checks[1].pass);
    CHECK(s.checks[2].pass);
    CHECK_FALSE(s.pass());
}
