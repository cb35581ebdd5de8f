#include "bnlie/nlie.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace bnlie {

Contour make_contour(const ModularPair& mp, bool dual, double s0, int n) {
    if (n < 4) throw DomainError("make_contour: need at least 4 nodes");
    Contour c;
    c.dual = dual;
    c.s0 = s0;
    c.n = n;
    c.a = mp.shift(dual);
    c.b = mp.period(dual);
    for (int j = 0; j < n; ++j) {
        const double y = -0.5 + double(j) / n;
        c.nodes.push_back(dual ? mp.point(y, s0) : mp.point(s0, y));
    }
    // the dual curve runs from +iω₁/2 to −iω₁/2
    c.weight = (dual ? -1.0 : 1.0) * double(mp.orientation()) * I * c.b / double(n);
    return c;
}

namespace {

double shift_coord(cplx z, const ModularPair& mp, bool dual) {
    const auto xy = mp.coords(z);
    return dual ? xy[1] : xy[0];
}

cplx coth(cplx z) { return 1.0 / std::tanh(z); }

template <class F>
void parallel_rows(int n, int threads, F&& f) {
    if (threads <= 1 || n < 64) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) f(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

bool separation_ok(const RootSet& delta, const ModularPair& mp, double s0, double margin) {
    for (cplx d : delta.roots)
        if (!(std::abs(shift_coord(d, mp, delta.dual()) - s0) < 0.5 - margin)) return false;
    return true;
}

Contour contour_for(const RootSet& delta, const ModelSpec& spec, int n, double s0) {
    if (separation_ok(delta, spec.mp, s0)) return make_contour(spec.mp, delta.dual(), s0, n);
    for (int k = 0; k <= 8; ++k)
        for (double s : {0.05 * k, -0.05 * k})
            if (separation_ok(delta, spec.mp, s)) return make_contour(spec.mp, delta.dual(), s, n);
    throw DomainError("contour_for: no straight contour in [-0.4, 0.4] separates the roots");
}

cplx kernel_K(cplx lambda, const ModularPair& mp, bool dual) {
    const cplx a = mp.shift(dual), b = mp.period(dual);
    const cplx zm = PI * (lambda - I * a) / b, zp = PI * (lambda + I * a) / b;
    const double eps = 1e-6 * mp.min_abs();
    for (cplx z : {zm, zp}) {
        // coth poles at z ∈ iπℤ
        const double k = std::round(z.imag() / PI);
        if (std::abs(z - I * PI * k) * std::abs(b) / PI < eps)
            throw PoleError("kernel_K: argument on a pole", 0, long(k));
    }
    return (coth(zm) - coth(zp)) / (2.0 * I * b);
}

std::vector<cplx> V_of_Y(const std::vector<cplx>& Y, const RootSet& delta, const ModelSpec& spec,
                         const Contour& c) {
    const cplx r = spec.rho_omega(c.dual);
    std::vector<cplx> V(c.n);
    for (int j = 0; j < c.n; ++j) {
        const cplx l = c.nodes[j];
        V[j] = 1.0 + r * std::exp(Y[j]) /
                         (t_eval(l - 0.5 * I * c.a, delta, spec) * t_eval(l + 0.5 * I * c.a, delta, spec));
    }
    return V;
}

std::vector<cplx> unwrap_log(const std::vector<cplx>& V, double floor) {
    const int n = int(V.size());
    int ref = 0;
    for (int j = 0; j < n; ++j) {
        if (!(std::abs(V[j]) >= floor)) {
            std::ostringstream os;
            os << "contour pinch: |V| = " << std::abs(V[j]) << " at node " << j
               << "; move the contour away from the zeros of V";
            throw DomainError(os.str());
        }
        if (std::abs(V[j] - 1.0) < std::abs(V[ref] - 1.0)) ref = j;
    }
    std::vector<cplx> L(n);
    L[ref] = std::log(V[ref]);
    auto step = [&](int from, int to) {
        const cplx p = std::log(V[to]);
        double im = p.imag();
        const double prev = L[from].imag();
        im += 2.0 * PI * std::round((prev - im) / (2.0 * PI));
        if (std::abs(im - prev) > PI / 2)
            throw DomainError("unwrap_log: phase jump above pi/2 between neighbouring nodes; "
                              "increase n_nodes");
        L[to] = cplx(p.real(), im);
    };
    for (int k = 1; k < n; ++k) step((ref + k - 1) % n, (ref + k) % n);
    // closing the loop must not wind
    const cplx back = std::log(V[ref]);
    double im = back.imag();
    const double prev = L[(ref + n - 1) % n].imag();
    im += 2.0 * PI * std::round((prev - im) / (2.0 * PI));
    if (std::abs(im - L[ref].imag()) > 1e-9)
        throw DomainError("unwrap_log: arg V winds along the contour");
    return L;
}

NlieSolution solve_Y(const RootSet& delta, const ModelSpec& spec, const Contour& c,
                     const NlieConfig& cfg) {
    if (delta.dual() != c.dual) throw DomainError("solve_Y: contour side differs from the root set");
    if (!separation_ok(delta, spec.mp, c.s0, 0.0))
        throw DomainError("solve_Y: contour does not separate the shifted roots");
    const int n = c.n;
    // the kernel matrix is circulant on a uniform periodic grid
    std::vector<cplx> kw(n);
    for (int k = 0; k < n; ++k) kw[k] = kernel_K(c.nodes[k] - c.nodes[0], spec.mp, c.dual) * c.weight;
    double ksum = 0.0;
    for (cplx v : kw) ksum += std::abs(v);

    NlieSolution sol;
    sol.contour = c;
    sol.delta = delta;
    sol.spec = spec;
    sol.Y.assign(n, 0.0);

    auto F = [&](const std::vector<cplx>& Y, std::vector<cplx>& logV) {
        logV = unwrap_log(V_of_Y(Y, delta, spec, c), cfg.v_floor);
        std::vector<cplx> out(n);
        parallel_rows(n, cfg.threads, [&](int i) {
            cplx s = 0.0;
            for (int j = 0; j < n; ++j) s += kw[(i - j + n) % n] * logV[j];
            out[i] = s;
        });
        return out;
    };

    using Vec = Eigen::VectorXcd;
    auto to_vec = [](const std::vector<cplx>& v) { return Eigen::Map<const Vec>(v.data(), v.size()); };
    std::vector<Vec> hist_g, hist_f;

    double prev_update = INFINITY;
    int growing = 0;
    double ratio = 0.0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        std::vector<cplx> logV;
        std::vector<cplx> FY = F(sol.Y, logV);
        double upd = 0.0;
        for (int i = 0; i < n; ++i) upd = std::max(upd, std::abs(FY[i] - sol.Y[i]));
        sol.iterations = it;
        sol.logV = logV;
        sol.update = upd;
        if (prev_update > 1e-12 && std::isfinite(prev_update) && upd > 1e-14)
            ratio = std::max(ratio, upd / prev_update);
        if (upd > prev_update) {
            if (++growing >= 5) throw NonConvergence("solve_Y: iteration diverges", upd);
        } else {
            growing = 0;
        }
        prev_update = upd;
        if (upd < cfg.tol) {
            sol.Y = FY;
            sol.converged = true;
            break;
        }
        if (cfg.anderson_depth > 0) {
            const Vec g = to_vec(FY) - to_vec(sol.Y);
            hist_g.push_back(g);
            hist_f.push_back(to_vec(FY));
            if (int(hist_g.size()) > cfg.anderson_depth + 1) {
                hist_g.erase(hist_g.begin());
                hist_f.erase(hist_f.begin());
            }
            const int m = int(hist_g.size()) - 1;
            Vec next = to_vec(FY);
            if (m > 0) {
                Eigen::MatrixXcd dG(n, m), dF(n, m);
                for (int k = 0; k < m; ++k) {
                    dG.col(k) = hist_g[k + 1] - hist_g[k];
                    dF.col(k) = hist_f[k + 1] - hist_f[k];
                }
                const Vec gamma = dG.colPivHouseholderQr().solve(g);
                next -= dF * gamma;
            }
            for (int i = 0; i < n; ++i) sol.Y[i] = next[i];
        } else {
            sol.Y = FY;
        }
    }
    if (!sol.converged) {
        std::ostringstream os;
        os << "solve_Y: no convergence in " << cfg.max_iter << " iterations (update " << sol.update << ")";
        throw NonConvergence(os.str(), sol.update);
    }
    // logV consistent with the final Y
    sol.logV = unwrap_log(V_of_Y(sol.Y, delta, spec, c), cfg.v_floor);
    const auto V = V_of_Y(sol.Y, delta, spec, c);
    double dmax = 0.0;
    for (cplx v : V) dmax = std::max(dmax, std::abs((v - 1.0) / v));
    sol.contraction_estimate = ksum * dmax;
    sol.observed_ratio = ratio;
    sol.certified = sol.contraction_estimate < 1.0;
    return sol;
}

cplx y_eval(cplx lambda, const NlieSolution& sol) {
    const Contour& c = sol.contour;
    cplx s = 0.0;
    for (int j = 0; j < c.n; ++j) s += kernel_K(lambda - c.nodes[j], sol.spec.mp, c.dual) * sol.logV[j];
    return s * c.weight;
}

cplx V_eval(cplx lambda, const NlieSolution& sol) {
    const Contour& c = sol.contour;
    return 1.0 + sol.spec.rho_omega(c.dual) * std::exp(y_eval(lambda, sol)) /
                     (t_eval(lambda - 0.5 * I * c.a, sol.delta, sol.spec) *
                      t_eval(lambda + 0.5 * I * c.a, sol.delta, sol.spec));
}

cplx integral_logV(const NlieSolution& sol) {
    cplx s = 0.0;
    for (cplx l : sol.logV) s += l;
    return s * sol.contour.weight;
}

cplx v_up_raw(cplx lambda, const NlieSolution& sol) {
    const Contour& c = sol.contour;
    cplx s = 0.0;
    for (int j = 0; j < c.n; ++j)
        s += (coth(PI * (lambda - c.nodes[j] + 0.5 * I * c.a) / c.b) + 1.0) * sol.logV[j];
    return std::exp(-s * c.weight / (2.0 * I * c.b));
}

cplx v_down_shift_raw(cplx lambda, const NlieSolution& sol) {
    const Contour& c = sol.contour;
    cplx s = 0.0;
    for (int j = 0; j < c.n; ++j)
        s += (coth(PI * (lambda - c.nodes[j] - 0.5 * I * c.a) / c.b) + 1.0) * sol.logV[j];
    return std::exp(s * c.weight / (2.0 * I * c.b));
}

namespace {

void check_v_pole(cplx lambda, const NlieSolution& sol, double sign) {
    // v↑: δ − ikω, v↓(· − iω): δ + ikω, k ≥ 1, modulo the period
    const ModularPair& mp = sol.spec.mp;
    const bool dual = sol.contour.dual;
    const double eps = 1e-6 * mp.min_abs();
    for (cplx d : sol.delta.roots) {
        const auto xy = mp.coords(lambda - d);
        const double s = dual ? xy[1] : xy[0], u = dual ? xy[0] : xy[1];
        const long k = std::lround(sign * s);
        if (k < 1) continue;
        const double ur = std::round(u);
        const cplx p = dual ? mp.point(ur, sign * k) : mp.point(sign * k, ur);
        if (std::abs(lambda - d - p) < eps)
            throw PoleError("v function: lambda on a pole", dual ? long(ur) : long(sign * k),
                            dual ? long(sign * k) : long(ur));
    }
}

}  // namespace

cplx v_up(cplx lambda, const NlieSolution& sol, int max_depth) {
    check_v_pole(lambda, sol, -1.0);
    const Contour& c = sol.contour;
    const double s = shift_coord(lambda, sol.spec.mp, c.dual);
    if (s > c.s0 - 0.5) return v_up_raw(lambda, sol);
    if (s > c.s0 - 1.5) return v_up_raw(lambda, sol) * V_eval(lambda + 0.5 * I * c.a, sol);
    if (max_depth <= 0) throw NonConvergence("v_up: continuation depth exhausted", 0.0);
    // Wronskian: v↑(λ) v↓(λ) = 1 + ρ v↑(λ+ia) v↓(λ−ia)/(t_δ(λ) t_δ(λ+ia))
    const cplx l1 = lambda + I * c.a;
    const cplx up1 = v_up(l1, sol, max_depth - 1);
    const cplx num = 1.0 + sol.spec.rho_omega(c.dual) * up1 * v_down_shift(lambda, sol) /
                               (t_eval(lambda, sol.delta, sol.spec) * t_eval(l1, sol.delta, sol.spec));
    return num / v_down_shift(l1, sol);
}

cplx v_down_shift(cplx lambda, const NlieSolution& sol, int max_depth) {
    check_v_pole(lambda, sol, 1.0);
    const Contour& c = sol.contour;
    const double s = shift_coord(lambda, sol.spec.mp, c.dual);
    if (s < c.s0 + 0.5) return v_down_shift_raw(lambda, sol);
    if (s < c.s0 + 1.5) return v_down_shift_raw(lambda, sol) * V_eval(lambda - 0.5 * I * c.a, sol);
    if (max_depth <= 0) throw NonConvergence("v_down_shift: continuation depth exhausted", 0.0);
    const cplx l1 = lambda - I * c.a;
    const cplx dn1 = v_down_shift(l1, sol, max_depth - 1);
    const cplx num = 1.0 + sol.spec.rho_omega(c.dual) * v_up(lambda, sol) * dn1 /
                               (t_eval(l1, sol.delta, sol.spec) * t_eval(lambda, sol.delta, sol.spec));
    return num / v_up(l1, sol);
}

namespace {

cplx poch_ratio(cplx lambda, const std::vector<cplx>& num, const std::vector<cplx>& den,
                cplx pre, cplx expo, cplx p, const ThetaProductConfig& cfg) {
    cplx r = 1.0;
    for (cplx d : num) r *= q_pochhammer_ext(pre * std::exp(expo * (lambda - d)), p, cfg);
    for (cplx t : den) r /= q_pochhammer_ext(pre * std::exp(expo * (lambda - t)), p, cfg);
    return r;
}

}  // namespace

cplx u_plus(cplx lambda, const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec) {
    const ModularPair& mp = spec.mp;
    if (!tau.dual()) {
        const cplx q2 = mp.q() * mp.q();
        return poch_ratio(lambda, hf.delta.roots, tau.roots, q2, 2.0 * PI / mp.omega2(), q2, spec.products);
    }
    const cplx pt = 1.0 / (mp.q_dual() * mp.q_dual());
    return hf.h_const *
           poch_ratio(lambda, hf.delta.roots, tau.roots, pt, -2.0 * PI / mp.omega1(), pt, spec.products);
}

cplx u_minus(cplx lambda, const RootSet& tau, const HillFactorization& hf, const ModelSpec& spec) {
    const ModularPair& mp = spec.mp;
    if (!tau.dual()) {
        const cplx q2 = mp.q() * mp.q();
        return hf.h_const *
               poch_ratio(lambda, hf.delta.roots, tau.roots, 1.0, -2.0 * PI / mp.omega2(), q2, spec.products);
    }
    const cplx pt = 1.0 / (mp.q_dual() * mp.q_dual());
    return poch_ratio(lambda, hf.delta.roots, tau.roots, 1.0, 2.0 * PI / mp.omega1(), pt, spec.products);
}

cplx y_from_determinants(cplx lambda, const RootSet& tau, const HillFactorization& hf,
                         const ModelSpec& spec, const TruncationPolicy& pol) {
    if (spec.rho_zero) return 1.0;
    const bool dual = tau.dual();
    const cplx h = 0.5 * I * spec.mp.shift(dual);
    const cplx lm = lambda - h, lp = lambda + h;
    return std::exp(omega_zeta(tau, spec)) * k_plus(lp, tau, spec, pol).value *
           k_minus(lm, tau, spec, pol).value / hill_det(lm, tau, spec, pol) *
           t_eval(lm, hf.delta, spec) * t_eval(lp, hf.delta, spec) /
           (t_eval(lm, tau, spec) * t_eval(lp, tau, spec));
}

void write_csv(std::ostream& os, const NlieSolution& sol) {
    os << "y,re_lambda,im_lambda,re_Y,im_Y,re_logV,im_logV\n";
    os << std::setprecision(17);
    const Contour& c = sol.contour;
    for (int j = 0; j < c.n; ++j) {
        const double y = -0.5 + double(j) / c.n;
        os << y << ',' << c.nodes[j].real() << ',' << c.nodes[j].imag() << ',' << sol.Y[j].real() << ','
           << sol.Y[j].imag() << ',' << sol.logV[j].real() << ',' << sol.logV[j].imag() << '\n';
    }
}

}  // namespace bnlie
