#pragma once

#include <vector>

#include "bnlie/model.hpp"

namespace bnlie {

struct TruncationPolicy {
    double tol = 1e-12;
    int n_min = 4;
    int n_max = 4096;
    // pole proximity; negative selects 1e-6·min|ω|
    double pole_eps = -1.0;
};

struct DetValue {
    cplx value;
    int n_used = 0;
    double tail_estimate = 0.0;
};

enum class KSide { Plus, Minus };

// K± (tau.family TauDirect) or K̃± (TauDual) by the three-term recursion.
DetValue k_det(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec,
               const TruncationPolicy& pol = {});
DetValue k_plus(cplx lambda, const RootSet& tau, const ModelSpec& spec,
                const TruncationPolicy& pol = {});
DetValue k_minus(cplx lambda, const RootSet& tau, const ModelSpec& spec,
                 const TruncationPolicy& pol = {});

// n × n truncation without any stopping rule.
cplx k_truncated(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec, int n);

// log|K^{(2n)} − K^{(n)}| evaluated from the recursion increments, so that it stays
// meaningful far below the double precision floor. Unit diagonal only.
double k_increment_log(KSide side, cplx lambda, const RootSet& tau, const ModelSpec& spec, int n);

// ℋ(λ) for TauDirect, ℋ̃(λ) for TauDual.
cplx hill_det(cplx lambda, const RootSet& tau, const ModelSpec& spec,
              const TruncationPolicy& pol = {});

struct HillFactorization {
    cplx h_const;
    RootSet delta;
    double residual = 0.0;      // max relative |ℋ − 𝔥θ_δ/θ_τ| on the verification grid
    double sum_residual = 0.0;  // |Σδ − ω₁ω₂p0/(2π)|
    int newton_iterations = 0;
    int ladder_rungs = 0;
    std::vector<cplx> grid;
};

struct NewtonOptions {
    int max_iter = 50;
    double step_tol = 1e-12;
};

// Zeros δ (or δ̃) of the Hill determinant, one per seed τ_k.
HillFactorization find_delta(const RootSet& tau, const ModelSpec& spec,
                             const TruncationPolicy& pol = {}, const NewtonOptions& nopt = {});

// 𝔥θ_δ/θ_τ (dual: 𝔥̃θ̃_δ̃/θ̃_τ̃)
cplx hill_factorized(cplx lambda, const HillFactorization& hf, const RootSet& tau,
                     const ModelSpec& spec);

// θ products on the side of a root set
cplx theta_side(cplx lambda, const std::vector<cplx>& mu, const ModelSpec& spec, bool dual);

}  // namespace bnlie
