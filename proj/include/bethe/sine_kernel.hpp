#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "fredholm.hpp"
#include "integrals.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace bethe {

/// Data of a generalized sine kernel determinant det(I + gamma V) on [-q,q]:
/// V(l,m) = F(l) sin{ m/2 [p0(l)-p0(m)] - i/2 [g(l)-g(m)] } / (pi sinh(l-m)).
struct GskProblem {
    double q = 1.0;
    int m = 1;
    cx gamma{};
    std::function<double(double)> p0 = [](double x) { return x; };
    std::function<cx(double)> p0d = [](double) { return cx(1.0, 0.0); };
    std::function<cx(double)> F = [](double) { return cx(1.0, 0.0); };
    std::function<cx(double)> Fd;                              // optional analytic F'
    std::function<cx(double)> g = [](double) { return cx{}; }; // phase function
    std::function<cx(double)> gd = [](double) { return cx{}; };

    cx nu(double lam) const { return -std::log(1.0 + gamma * F(lam)) / (2.0 * pi * ii); }
};

/// nu(lambda) = -(1/2pi i) log(1 + gamma F) sampled on a grid, with spectral
/// derivatives (analytic when F' is supplied).
struct NuFunction {
    Grid grid;
    std::vector<double> bw; // barycentric weights
    std::vector<cx> nu, nu_d, nu_dd;
    cx nu_plus{}, nu_minus{};   // nu(+-q)
    bool analytic_derivative = false;

    cx d_at(double x) const { return barycentric_eval(grid, bw, nu_d, x); }
    cx dd_at(double x) const { return barycentric_eval(grid, bw, nu_dd, x); }
};

inline NuFunction make_nu(const GskProblem& p, int n = 128) {
    NuFunction f;
    f.grid = gauss_legendre(n, -p.q, p.q);
    f.bw = barycentric_weights(f.grid);
    f.nu.resize(n);
    for (int i = 0; i < n; ++i) {
        cx w = 1.0 + p.gamma * p.F(f.grid.nodes[i]);
        if (std::abs(w) < 1e-14) throw pole_error("make_nu: 1 + gamma F vanishes on [-q,q]");
        f.nu[i] = -std::log(w) / (2.0 * pi * ii);
    }
    f.nu_plus = p.nu(p.q);
    f.nu_minus = p.nu(-p.q);
    if (p.Fd) {
        f.analytic_derivative = true;
        f.nu_d.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = f.grid.nodes[i];
            f.nu_d[i] = -p.gamma * p.Fd(x) / ((1.0 + p.gamma * p.F(x)) * (2.0 * pi * ii));
        }
    } else {
        std::vector<double> D = derivative_matrix(f.grid);
        f.nu_d = apply_matrix(D, f.nu);
    }
    std::vector<double> D = derivative_matrix(f.grid);
    f.nu_dd = apply_matrix(D, f.nu_d);
    return f;
}

/// The kernel V(l,m), with the analytic diagonal limit
/// F(l) [m p0'(l) - i g'(l)] / 2pi at l = m.
inline cx gsk_kernel(const GskProblem& p, double lam, double mu) {
    if (lam == mu) return p.F(lam) * (static_cast<double>(p.m) * p.p0d(lam) - ii * p.gd(lam)) / (2.0 * pi);
    cx phase = 0.5 * p.m * (p.p0(lam) - p.p0(mu)) - 0.5 * ii * (p.g(lam) - p.g(mu));
    return p.F(lam) * std::sin(phase) / (pi * std::sinh(lam - mu));
}

/// Exact log det(I + gamma V) by Nystrom discretization; the diagonal uses
/// the analytic limit F(l) [m p0'(l) - i g'(l)] / 2pi.
inline cx exact_gsk_logdet(const GskProblem& p, int n) {
    Grid g = gauss_legendre(n, -p.q, p.q);
    std::vector<double> pv(n);
    std::vector<cx> Fv(n), gv(n);
    for (int i = 0; i < n; ++i) {
        pv[i] = p.p0(g.nodes[i]);
        Fv[i] = p.F(g.nodes[i]);
        gv[i] = p.g(g.nodes[i]);
    }
    const double m = p.m;
    ComplexMatrix a(n);
    std::vector<double> sw(n);
    for (int i = 0; i < n; ++i) sw[i] = std::sqrt(g.weights[i]);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cx v;
            if (i == j) {
                v = Fv[i] * (m * p.p0d(g.nodes[i]) - ii * p.gd(g.nodes[i])) / (2.0 * pi);
            } else {
                cx phase = 0.5 * m * (pv[i] - pv[j]) - 0.5 * ii * (gv[i] - gv[j]);
                v = Fv[i] * std::sin(phase) / (pi * std::sinh(g.nodes[i] - g.nodes[j]));
            }
            a(i, j) = (i == j ? 1.0 : 0.0) + sw[i] * (p.gamma * v) * sw[j];
        }
    }
    return log_det(a);
}

namespace detail {

struct W0Terms {
    cx linear;   // -int [i m p0' + g'] nu
    cx boundary; // -sum_s {nu_s^2 log[m sinh 2q p0'(sq)] - log G(1,nu_s)}
    cx double_int;
    cx edges;
    cx total() const { return linear + boundary + double_int + edges; }
};

inline W0Terms w0_terms(const GskProblem& p, const NuFunction& nu, cx shift) {
    const Grid& g = nu.grid;
    const int n = g.size();
    W0Terms t;

    std::vector<cx> nus(nu.nu);
    for (cx& v : nus) v += shift;
    cx nup = nu.nu_plus + shift, num = nu.nu_minus + shift;

    cx lin{};
    for (int i = 0; i < n; ++i)
        lin += g.weights[i] * (ii * static_cast<double>(p.m) * p.p0d(g.nodes[i]) + p.gd(g.nodes[i])) * nus[i];
    t.linear = -lin;

    t.boundary = 0.0;
    for (int sigma : {+1, -1}) {
        cx ns = sigma > 0 ? nup : num;
        double pd = std::real(p.p0d(sigma * p.q));
        double arg = p.m * std::sinh(2.0 * p.q) * pd;
        if (!(arg > 0.0)) throw std::invalid_argument("w0: m sinh(2q) p0'(sq) must be positive");
        cx lg = barnes_pair(ns, 1);
        if (std::isinf(lg.real())) throw pole_error("w0: nu at a Barnes zero (nu_sigma integer)");
        t.boundary -= ns * ns * std::log(arg) - lg;
    }

    t.double_int = 0.5 * antisym_double_integral(g, nu.bw, nus, nu.nu_d, nu.nu_dd, true);

    t.edges = 0.0;
    for (int sigma : {+1, -1}) {
        cx ns = sigma > 0 ? nup : num;
        t.edges += static_cast<double>(sigma) * ns *
                   edge_integral(g, nu.bw, nus, nu.nu_d, nu.nu_dd, sigma, ns, true);
    }
    return t;
}

} // namespace detail

/// Leading large-m term W0(m,[nu]) of log det(I + gamma V).
inline cx w0(const GskProblem& p, int n = 128) {
    NuFunction nu = make_nu(p, n);
    return detail::w0_terms(p, nu, 0.0).total();
}

/// W0 evaluated on the shifted function nu + shift (used by the periodicity
/// relation between the leading and oscillating terms).
inline cx w0_shifted(const GskProblem& p, cx shift, int n = 128) {
    NuFunction nu = make_nu(p, n);
    return detail::w0_terms(p, nu, shift).total();
}

/// First oscillating correction, full term W_{+-1} e^{+- i m [p0(q)-p0(-q)]}.
inline cx w_osc(const GskProblem& p, int sign, int n = 128) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("w_osc: sign must be +-1");
    if (p.gamma == cx{}) return cx{};
    NuFunction nu = make_nu(p, n);
    const Grid& g = nu.grid;
    cx nup = nu.nu_plus, num = nu.nu_minus;

    if (std::abs(nup) < 1e-300 || std::abs(num) < 1e-300) return cx{};

    cx u = 1.0;
    for (int sigma : {+1, -1}) {
        cx ns = sigma > 0 ? nup : num;
        {
            // Gamma(-nu)/Gamma(nu) pole when nu is a non-negative integer
            double r = std::round(ns.real());
            if (std::abs(ns.imag()) < 1e-13 && r >= 0.0 && std::abs(ns.real() - r) < 1e-13)
                throw pole_error("w_osc: Gamma(-nu_sigma) pole");
        }
        double pd = std::real(p.p0d(sigma * p.q));
        double base = std::sinh(2.0 * p.q) * pd;
        // int (nu_s - nu)/tanh(q - sigma l) dl; for sigma=+1 this is the +q edge
        // integral, for sigma=-1 the same integrand with tanh(q + l). The
        // exponent carries -2 for both edges (fixed by the periodicity
        // relation against the leading term and by the exact determinant).
        cx integral{};
        if (sigma > 0) {
            integral = detail::edge_integral(g, nu.bw, nu.nu, nu.nu_d, nu.nu_dd, +1, ns, true);
        } else {
            for (int i = 0; i < g.size(); ++i) {
                double lam = g.nodes[i];
                double sep = lam - g.a;
                cx val;
                if (sep < 1e-4) {
                    cx f1 = nu.d_at(g.a), f2 = nu.dd_at(g.a);
                    val = -f1 - 0.5 * sep * f2;
                } else {
                    val = (ns - nu.nu[i]) / std::tanh(p.q + lam);
                }
                integral += g.weights[i] * val;
            }
        }
        u *= std::exp(static_cast<double>(sigma) * p.g(sigma * p.q)) *
             std::exp(2.0 * ns * std::log(base)) *
             std::exp(log_gamma(-ns) - log_gamma(ns)) *
             std::exp(-2.0 * integral);
    }

    cx upow = sign > 0 ? u : 1.0 / u;
    cx amp = nup * num * upow /
             (sqr(std::sinh(2.0 * p.q)) * p.p0d(p.q) * p.p0d(-p.q));
    cx mexp = std::exp((-2.0 + 2.0 * static_cast<double>(sign) * (nup + num)) * std::log(static_cast<double>(p.m)));
    double dp = p.p0(p.q) - p.p0(-p.q);
    return amp * mexp * std::exp(ii * static_cast<double>(sign * p.m) * dp);
}

} // namespace bethe
