#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "bnlie/model.hpp"

namespace fx {

using bnlie::cplx;
using bnlie::I;
using bnlie::PI;

inline bnlie::ModularPair ref_pair() { return {std::exp(I * PI / 3.0), 1.0}; }

// real κ with |ρ^{ω₁}| = rho_abs when ω₂ = 1
inline double kappa_for(double rho_abs, int N) { return std::log(1.0 / rho_abs) / (2.0 * PI * N); }

inline bnlie::ModelSpec qtoda(int N = 2, double rho_abs = 1e-3,
                              bnlie::ModularPair mp = ref_pair()) {
    return bnlie::ModelSpec::make(bnlie::ModelKind::QToda, N, kappa_for(rho_abs, N), 0.0, mp);
}

inline bnlie::RootSet tau2() {
    return {{cplx(0.2, 0.07), cplx(-0.2, -0.07)}, bnlie::RootFamily::TauDirect};
}

inline bnlie::RootSet tau3() {
    return {{cplx(0.25, 0.05), cplx(-0.05, 0.1), cplx(-0.2, -0.15)}, bnlie::RootFamily::TauDirect};
}

inline std::vector<cplx> random_cell(int n, unsigned seed, const bnlie::ModularPair& mp) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) out.push_back(mp.point(u(rng), u(rng)));
    return out;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fx

namespace fx {

inline bnlie::ModelSpec toda2(int N = 2, double g_abs = 1e-3, cplx p0 = 0.0,
                              bnlie::ModularPair mp = ref_pair()) {
    return bnlie::ModelSpec::make(bnlie::ModelKind::Toda2, N, kappa_for(g_abs, N), p0, mp);
}

// Toda₂ roots near ±(0.2+0.07i) with the last one adjusted to the product constraint
inline bnlie::RootSet toda2_tau(const bnlie::ModelSpec& s, bool dual = false) {
    const cplx b = s.mp.period(dual);
    std::vector<cplx> r;
    for (int k = 0; k < s.N - 1; ++k) r.push_back(cplx(0.2 - 0.4 * k / std::max(1, s.N - 1), 0.07 - 0.1 * k));
    cplx sum = 0.0;
    for (cplx x : r) sum += x;
    const cplx total = -b * std::log(bnlie::tau_product_target(s, dual)) / (2.0 * PI);
    r.push_back(total - sum);
    return {r, dual ? bnlie::RootFamily::TauDual : bnlie::RootFamily::TauDirect};
}

}  // namespace fx
