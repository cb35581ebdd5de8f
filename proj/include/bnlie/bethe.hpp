#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bnlie/baxter.hpp"

namespace bnlie {

struct BetheConfig {
    double tol = 1e-10;
    int max_iter = 30;
    int max_halvings = 6;
    int n_nodes = 256;
    double s0 = 0.0;       // preferred contour positions; nudged by contour_for if needed
    double s0_dual = 0.0;
    double fd_step = -1.0;  // < 0: 1e-5·min|ω|
    NlieConfig nlie{};
    bool concurrent = true;  // solve the two NLIEs of an iterate in parallel
};

// δ (= δ̃) and ξ with the NLIE solutions they were evaluated on.
struct BetheState {
    RootSet delta;
    cplx xi = 1.0;
    std::vector<cplx> residuals;
    double residual_norm = 0.0;  // max_k |residual_k|
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace;  // residual norm per iterate
    std::string diagnostic;
    std::shared_ptr<const NlieSolution> direct, dual;
};

// I_δ(λ) (direct solution) or Ĩ_δ(λ) (dual solution) by the contour quadrature.
cplx i_delta(cplx lambda, const NlieSolution& sol);

// Closed form of q₊(λ)/q₋(λ) from I + Ĩ and the ϖ-product.
cplx ratio_closed(cplx lambda, const NlieSolution& direct, const NlieSolution& dual);

// lim_{λ→δ_k} of the closed form; the ℓ = k factor tends to −1 (simple zero of 𝒮 at 0).
cplx bethe_lhs(int k, const NlieSolution& direct, const NlieSolution& dual);

// LHS_k/ξ − 1 on the NLIE solutions stored in the state
cplx bethe_residual(const BetheState& state, const ModelSpec& spec, int k);

// Re-solve both NLIEs for the state's δ and refresh residuals.
BetheState evaluate_state(const RootSet& delta, cplx xi, const ModelSpec& spec, const BetheConfig& cfg);

// Damped Newton on (δ_1..δ_{N−1}, 1/ξ), δ_N from the sum constraint. If xi_seed is zero the
// seed ξ is taken from the first equation.
BetheState solve_bethe(const RootSet& seed, const ModelSpec& spec, const BetheConfig& cfg = {},
                       cplx xi_seed = 0.0);

struct EntiretyReport {
    std::vector<double> ratio_error;  // |q₊/q₋ − ξ|/|ξ| at each δ_k
    std::vector<double> residue;      // |Res q|/|Res q₊| at each δ_k
    double max_ratio_error = 0.0;
    double max_residue = 0.0;
};

EntiretyReport entirety_check(const BetheState& state, const ModelSpec& spec);

// q₊ and q₋ bound to the state's solutions
QSolution state_q(const BetheState& state, QSign sign);

}  // namespace bnlie
