#pragma once

#include <string>
#include <vector>

#include "bnlie/spectrum.hpp"

namespace bnlie {

// One named invariant: measured value against a threshold (pass when value < threshold).
struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

struct Suite {
    std::string name;
    std::vector<Check> checks;

    void add(const std::string& check, double value, double threshold, const std::string& note = {});
    bool pass() const;
};

// θ, 𝒮, ϖ identities on n probes of the fundamental cell; conjugation identities when ω₁ = ω̄₂.
Suite specfun_suite(const ModularPair& mp, int n = 20, unsigned seed = 7);

// Fitted slope of log|K^{(2n)} − K^{(n)}| against 2N·log|q|, and the K± recurrences.
Suite determinant_suite(const RootSet& tau, const ModelSpec& spec);

// ℋ quasi-periodicity in both directions and the factorization ℋ = 𝔥θ_δ/θ_τ.
Suite hill_suite(const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec);

// contraction, e^Y against the determinant oracle, K± = u±·v↑/↓, optional grid refinement
Suite nlie_suite(const RootSet& tau, const HillFactorization& hf, const NlieSolution& sol, bool refine = true);

// Wronskians and Baxter equations with the fitted t, t̃
Suite qfunction_suite(const QSolution& qp, const QSolution& qm, unsigned seed = 21);

// residual norm, entirety and idempotence of a Bethe state
Suite bethe_suite(const BetheState& state, const ModelSpec& spec, const BetheConfig& cfg);

// cross-check and constraint products of a reconstruction; against seeds when given
Suite spectrum_suite(const SpectrumResult& r, const ModelSpec& spec, const RootSet* tau_seed = nullptr,
                     const RootSet* tau_dual_seed = nullptr);

// ω₁ = ω̄₂, κ real: conjugation of K±, ℋ and the imaginary I + Ĩ at real λ for real δ.
Suite reality_suite(const ModelSpec& spec);

// max over seed roots of the relative distance to the nearest recovered root in e^{−2πτ/b}
double exp_mismatch(const RootSet& got, const RootSet& want, const ModelSpec& spec);

}  // namespace bnlie
