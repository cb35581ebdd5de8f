#pragma once

#include <string>
#include <vector>

#include "bnlie/bethe.hpp"

namespace bnlie {

// Roots of Σ c_j x^j (low degree first) by Durand–Kerner from a deterministic seed circle.
std::vector<cplx> durand_kerner(const std::vector<cplx>& coeffs, int max_iter = 200, double tol = 1e-13);

// e_1..e_N from power sums p_1..p_{N−1} and e_N.
std::vector<cplx> newton_to_elementary(const std::vector<cplx>& power_sums, cplx sigma_N, int N);

// α_k(λ) = e^{−2πkλ/b}, b = ω₂ (direct) or ω₁ (dual)
cplx alpha_k(int k, cplx lambda, const ModularPair& mp, bool dual);

struct NewtonSumParts {
    cplx roots;       // Σ_a α_k(δ_a)
    cplx correction;  // the contour integral, subtracted from roots
    cplx value() const { return roots - correction; }
};

// Σ_a α_k(τ_a) from one converged NLIE solution (side taken from the solution), 1 ≤ k ≤ N−1.
NewtonSumParts newton_sum_parts(int k, const NlieSolution& sol);
cplx newton_sum(int k, const NlieSolution& sol);

struct SpectrumResult {
    std::vector<cplx> newton_sums, newton_sums_dual;  // k = 1..N−1
    std::vector<cplx> elementary_syms, elementary_syms_dual;  // k = 1..N
    RootSet tau, tau_dual;
    std::vector<int> shifts, shifts_dual;  // τ_k ↦ τ_k − i p_k a chosen by the cross-check
    double crosscheck_direct = 0.0, crosscheck_dual = 0.0;
    double crosscheck_residual = 0.0;  // max of the two
    // max_k |contour term| / max(1, |Σα_k(δ)|); O(|ρ^{ω₁}|) direct, O(|ρ^{ω₂}|) dual
    double correction_direct = 0.0, correction_dual = 0.0;
    std::string warning;
};

struct SpectrumConfig {
    double crosscheck_tol = 1e-6;
    bool shift_search = true;
    unsigned probe_seed = 17;
};

SpectrumResult reconstruct_tau(const NlieSolution& direct, const NlieSolution& dual, const SpectrumConfig& cfg = {});
SpectrumResult reconstruct_tau(const BetheState& state, const SpectrumConfig& cfg = {});

}  // namespace bnlie
