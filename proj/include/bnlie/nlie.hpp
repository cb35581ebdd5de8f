#pragma once

#include <iosfwd>
#include <vector>

#include "bnlie/hill.hpp"

namespace bnlie {

// Straight segment across one period strip. Direct: λ_j = i s0 ω₁ + i y_j ω₂; dual: the same
// with ω₁ ↔ ω₂ and the opposite orientation, so that ℬ₊ (resp. ℬ̃₊) sits on the left.
struct Contour {
    bool dual = false;
    double s0 = 0.0;
    int n = 0;
    std::vector<cplx> nodes;
    cplx weight;
    cplx a;  // shift period
    cplx b;  // periodicity period
};

Contour make_contour(const ModularPair& mp, bool dual, double s0, int n);

// |s(δ_k) − s0| < 1/2 − margin for every root, s being the shift coordinate.
bool separation_ok(const RootSet& delta, const ModularPair& mp, double s0, double margin = 0.05);

// Contour at s0, nudged over [−0.4, 0.4] in steps of 0.05 if the separation fails.
Contour contour_for(const RootSet& delta, const ModelSpec& spec, int n, double s0 = 0.0);

cplx kernel_K(cplx lambda, const ModularPair& mp, bool dual = false);

struct NlieConfig {
    double tol = 1e-14;
    int max_iter = 500;
    double v_floor = 1e-8;
    int anderson_depth = 0;  // 0: plain iteration
    int threads = 1;
};

struct NlieSolution {
    Contour contour;
    RootSet delta;
    ModelSpec spec;
    std::vector<cplx> Y;
    std::vector<cplx> logV;
    int iterations = 0;
    double contraction_estimate = 0.0;  // Lipschitz bound of the fixed-point map at the solution
    double observed_ratio = 0.0;        // ratio of successive updates
    double update = 0.0;
    bool converged = false;
    bool certified = false;  // contraction_estimate < 1
};

// Values of V on the nodes for a given Y, and the unwrapped logarithm.
std::vector<cplx> V_of_Y(const std::vector<cplx>& Y, const RootSet& delta, const ModelSpec& spec,
                         const Contour& c);
std::vector<cplx> unwrap_log(const std::vector<cplx>& V, double floor = 1e-8);

NlieSolution solve_Y(const RootSet& delta, const ModelSpec& spec, const Contour& c,
                     const NlieConfig& cfg = {});

// Y, V off the grid from the converged logV (exact kernel, no interpolation).
cplx y_eval(cplx lambda, const NlieSolution& sol);
cplx V_eval(cplx lambda, const NlieSolution& sol);

// v↑(λ) and v↓(λ − ia), a = ω₁ (direct) or ω₂ (dual), continued beyond the contour strip.
cplx v_up(cplx lambda, const NlieSolution& sol, int max_depth = 64);
cplx v_down_shift(cplx lambda, const NlieSolution& sol, int max_depth = 64);
// the bare integral representations (valid next to the contour only)
cplx v_up_raw(cplx lambda, const NlieSolution& sol);
cplx v_down_shift_raw(cplx lambda, const NlieSolution& sol);

// ∫ logV dτ over the contour
cplx integral_logV(const NlieSolution& sol);

// u± and their duals; u₋ and ũ₊ carry 𝔥, 𝔥̃.
cplx u_plus(cplx lambda, const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec);
cplx u_minus(cplx lambda, const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec);

// e^{Y(λ)} from K±, ℋ and the polynomials; independent of the NLIE.
cplx y_from_determinants(cplx lambda, const RootSet& tau, const HillFactorization& hf,
                         const ModelSpec& spec, const TruncationPolicy& pol = {});

// y_j, Re λ_j, Im λ_j, Re Y, Im Y, Re logV, Im logV
void write_csv(std::ostream& os, const NlieSolution& sol);

}  // namespace bnlie
