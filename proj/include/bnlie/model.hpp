#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bnlie/specfun.hpp"

namespace bnlie {

enum class ModelKind { QToda, Toda2 };

// Model data. Every power of σ, g, ϰ, ρ goes through the stored logarithms.
struct ModelSpec {
    ModelKind kind = ModelKind::QToda;
    int N = 1;
    cplx kappa = 0.0;
    cplx p0 = 0.0;
    ModularPair mp{std::exp(I * PI / 3.0), 1.0};
    cplx L_g = 0.0;
    cplx L_kappa = 0.0;
    cplx L_rho = 0.0;
    cplx L_sigma = 0.0;  // σ = e^{L_sigma}
    bool rho_zero = false;
    ThetaProductConfig products{};

    static ModelSpec make(ModelKind kind, int N, cplx kappa, cplx p0, const ModularPair& mp);

    // Override ρ through L_rho; L_g follows as (L_rho − L_kappa)/(2N).
    ModelSpec with_log_rho(cplx L_rho) const;
    // ρ = 0 exactly
    ModelSpec with_rho_zero() const;
    // Same model with ω₁ ↔ ω₂.
    ModelSpec swapped() const;

    cplx sigma() const { return std::exp(L_sigma); }
    cplx g_pow(cplx x) const { return std::exp(x * L_g); }
    cplx kappa_pow(cplx x) const { return std::exp(x * L_kappa); }
    cplx rho_pow(cplx x) const { return rho_zero ? cplx(0.0) : std::exp(x * L_rho); }
    // ρ^{ω₁} (direct) or ρ^{ω₂} (dual)
    cplx rho_omega(bool dual) const { return rho_pow(mp.shift(dual)); }

    // max_a |e^{ω_a(2p0 + L_rho)}|, the Toda₂ regime gate quantity
    double gate_value() const;
    void check_gate() const;
};

enum class RootFamily { TauDirect, TauDual, Delta, DeltaDual };

struct RootSet {
    std::vector<cplx> roots;
    RootFamily family = RootFamily::TauDirect;

    bool dual() const { return family == RootFamily::TauDual || family == RootFamily::DeltaDual; }
    std::size_t size() const { return roots.size(); }
};

// |constraint LHS − RHS| for the family's constraint (sum for δ, product for τ).
double constraint_residual(const RootSet& rs, const ModelSpec& spec);

// Throws DomainError if two roots coincide modulo iω₁ℤ + iω₂ℤ within eps.
void check_distinct(const RootSet& rs, const ModularPair& mp, double eps = -1.0);

// Lattice distance from z to the nearest point of iω₁ℤ + iω₂ℤ.
double lattice_distance(cplx z, const ModularPair& mp);

// Exponents ω₁ζ (direct) or ω₂ζ̃ (dual) for a τ set; zero for q-Toda.
cplx omega_zeta(const RootSet& tau, const ModelSpec& spec);

// t_τ(λ) or t̃_τ̃(λ); which one follows from the family of the root set.
cplx t_eval(cplx lambda, const RootSet& roots, const ModelSpec& spec);
// Same product with the side given explicitly.
cplx t_eval_side(cplx lambda, const std::vector<cplx>& roots, const ModelSpec& spec, bool dual);

// Right-hand side of the τ product constraint: value of ∏ e^{-2πτ/ω₂} (dual: ∏ e^{-2πτ̃/ω₁}).
cplx tau_product_target(const ModelSpec& spec, bool dual);

using QFun = std::function<cplx(cplx)>;

// Residuals of the two self-dual Baxter equations at λ.
std::pair<cplx, cplx> baxter_residual(const QFun& q, const RootSet& roots_direct,
                                      const RootSet& roots_dual, const ModelSpec& spec,
                                      cplx lambda);

}  // namespace bnlie
