#pragma once

#include <array>
#include <vector>

#include "bnlie/common.hpp"

namespace bnlie {

// Half-periods (ω₁, ω₂). The public constructor insists on Im(ω₁/ω₂) > 0.
// swapped() builds the pair (ω₂, ω₁) with orientation -1; it exists so that
// modular invariance can be checked by rebuilding everything with the roles
// exchanged, and every product then goes through the |p| > 1 inversion.
class ModularPair {
public:
    ModularPair(cplx omega1, cplx omega2);

    static ModularPair swapped(const ModularPair& mp);

    cplx omega1() const { return w1_; }
    cplx omega2() const { return w2_; }
    int orientation() const { return orient_; }

    cplx q() const { return std::exp(I * PI * w1_ / w2_); }
    cplx q_dual() const { return std::exp(I * PI * w2_ / w1_); }
    cplx Omega() const { return w1_ + w2_; }
    double min_abs() const;

    // (x, y) with λ = i x ω₁ + i y ω₂.
    std::array<double, 2> coords(cplx lambda) const;
    cplx point(double x, double y) const { return I * x * w1_ + I * y * w2_; }

    // shift period and periodicity period of the direct (false) or dual side
    cplx shift(bool dual) const { return dual ? w2_ : w1_; }
    cplx period(bool dual) const { return dual ? w1_ : w2_; }

private:
    ModularPair(cplx w1, cplx w2, int orient) : w1_(w1), w2_(w2), orient_(orient) {}
    cplx w1_, w2_;
    int orient_ = 1;
};

struct ThetaProductConfig {
    double tol = 1e-12;
    int max_terms = 512;
};

// ∏_{k≥0}(1 − z p^k), |p| < 1.
cplx q_pochhammer(cplx z, cplx p, const ThetaProductConfig& cfg = {});

// Same product continued to |p| > 1 through (z;p) = 1/(z/p; 1/p).
cplx q_pochhammer_ext(cplx z, cplx p, const ThetaProductConfig& cfg = {});

cplx theta(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg = {});
cplx theta_dual(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg = {});

// θ_μ(λ) = ∏ θ(λ − μ_a), and the dual analogue
cplx theta_prod(cplx lambda, const std::vector<cplx>& mu, const ModularPair& mp,
                const ThetaProductConfig& cfg = {});
cplx theta_dual_prod(cplx lambda, const std::vector<cplx>& mu, const ModularPair& mp,
                     const ThetaProductConfig& cfg = {});

cplx modular_B(cplx z, const ModularPair& mp);

// Double sine 𝒮. pole_eps < 0 selects 1e-6·min|ω|.
cplx double_sine(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg = {},
                 double pole_eps = -1.0);
// second product form e^{iB}(e^{2πλ/ω₁}; q̃^{-2})/(q² e^{2πλ/ω₂}; q²)
cplx double_sine_alt(cplx lambda, const ModularPair& mp, const ThetaProductConfig& cfg = {},
                     double pole_eps = -1.0);

// ϖ(z) = e^{-iB(z-iΩ/2)/2} 𝒮(z − iΩ/2)
cplx quantum_dilog(cplx z, const ModularPair& mp, const ThetaProductConfig& cfg = {},
                   double pole_eps = -1.0);

}  // namespace bnlie
