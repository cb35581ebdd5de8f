#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bnlie/nlie.hpp"

namespace bnlie {

enum class QSign { Plus, Minus };

// q₊ or q₋ bound to converged direct and dual NLIE solutions.
struct QSolution {
    QSign sign = QSign::Plus;
    RootSet delta;
    RootSet delta_dual;
    std::shared_ptr<const NlieSolution> direct;
    std::shared_ptr<const NlieSolution> dual;
    ModelSpec spec;
};

QSolution make_q(QSign sign, std::shared_ptr<const NlieSolution> direct,
                 std::shared_ptr<const NlieSolution> dual);

enum class QForm { Generic, DoubleSine };

cplx f_p0(QSign sign, cplx lambda, const ModelSpec& spec);

// ψ± (direct solution) or ψ̃± (dual solution) from v↑/v↓ and the q-products over δ.
cplx psi(QSign sign, cplx lambda, const NlieSolution& sol);

// Q± and q± = Q±/θ_{±δ}(±λ). The double-sine form needs δ = δ̃ and is checked
// against the generic assembly when verify is set.
cplx Q_eval(const QSolution& s, cplx lambda);
cplx q_eval(const QSolution& s, cplx lambda, QForm form = QForm::Generic, bool verify = false);

// q± from the determinants K±, K̃± and 𝔥, 𝔥̃ alone (no NLIE involved).
cplx q_from_determinants(QSign sign, cplx lambda, const RootSet& tau, const RootSet& tau_dual,
                         const HillFactorization& hf, const HillFactorization& hf_dual,
                         const ModelSpec& spec, const TruncationPolicy& pol = {});

// W_{ω₁} (dual = false) or W_{ω₂} of two functions
cplx wronskian(const QFun& a, const QFun& b, cplx lambda, const ModelSpec& spec, bool dual);
// Self-dual Wronskian u(λ)u(λ+iΩ) − σ²u(λ+iω₁)u(λ+iω₂)
cplx selfdual_wronskian(const QFun& u, cplx lambda, const ModelSpec& spec);

// Closed forms of W_{ω₁}[q₊,q₋], W_{ω₂}[q₊,q₋]
cplx wronskian_closed(const QSolution& qp, const QSolution& qm, cplx lambda, bool dual);
cplx c_delta_tilde(const RootSet& delta_dual, const ModelSpec& spec);
// ϰ^{−iλ} g^{−NΩ} C_δ̃ θ_δ̃(λ)/θ_δ(λ), the value of 𝒲[q₊ + c q₋]/c
cplx selfdual_closed(const QSolution& qp, cplx lambda);

struct WronskianReport {
    double w1_residual = 0.0;       // direct vs closed form
    double w2_residual = 0.0;
    double selfdual_residual = 0.0;  // 𝒲[q±] relative to the size of its two terms
    double combo_residual = 0.0;     // 𝒲[q₊ + c q₋] against the closed form
    double w1_ratio_residual = 0.0;  // W(λ+iω_a)/W(λ) against σ²ϰ^{ω_a}
    double w2_ratio_residual = 0.0;
    double min_w1 = 0.0;             // min |W_{ω₁}| over the probes, for independence
    cplx c_delta_tilde;
};

WronskianReport wronskians(const QSolution& qp, const QSolution& qm, const std::vector<cplx>& probe);

// Right-hand side of the Baxter t construction, ratio form
cplx t_from_q(const QSolution& qp, const QSolution& qm, cplx lambda, bool dual = false);
// the same polynomial through v↑/v↓ of one NLIE solution
cplx t_from_v(cplx lambda, const NlieSolution& sol);

struct TFit {
    RootSet tau;
    std::vector<cplx> coeffs;   // polynomial in the exponential variable, low degree first
    double residual = 0.0;      // max relative misfit on the samples
    double constraint_residual = 0.0;
    std::vector<cplx> samples;  // λ
};

// Fit of the N-root hyperbolic polynomial to 4N samples of t_from_q.
TFit fit_t(const QSolution& qp, const QSolution& qm, bool dual = false, unsigned seed = 7);

struct Decomposition {
    std::vector<cplx> grid;
    std::vector<cplx> P_plus, P_minus;
    double ellipticity_residual = 0.0;  // max relative change under λ → λ + iω₁, λ + iω₂
};

// q = 𝒫₊q₊ + 𝒫₋q₋ with 𝒫± = ±W_{ω₁}[q, q∓]/W_{ω₁}[q₊, q₋] on an n×n cell grid
Decomposition decompose(const QFun& q, const QSolution& qp, const QSolution& qm, int n = 4);

// Points iXω₁ + iYω₂, |X|,|Y| ≤ extent, at distance ≥ 0.05·min|ω| from every lattice μ + iℤω₁ + iℤω₂.
std::vector<cplx> probe_points(int n, const std::vector<cplx>& avoid, const ModularPair& mp,
                               unsigned seed, double extent = 0.5);

}  // namespace bnlie
