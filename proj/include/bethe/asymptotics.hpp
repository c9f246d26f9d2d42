#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fredholm.hpp"
#include "integrals.hpp"
#include "specfun.hpp"
#include "thermo.hpp"

namespace bethe {

/// i pi / i c shift of the kernel arguments: i zeta for XXZ, i c for LL.
inline cx kernel_shift(const ModelSpec& m) {
    return ii * (m.variant == Model::XXZ ? m.zeta : m.c);
}

/// Cauchy transform of the dressed charge,
///   XXZ: (1/2pi i) int coth(l-w) Z(l) dl   (i pi periodic),
///   LL:  (1/2pi i) int Z(l)/(l-w) dl.
/// Near the cut the grid sum is replaced by pole subtraction plus panels
/// graded toward the foot point.
inline cx cauchy_z_tilde(const ThermoSolution& th, cx w) {
    const bool xxz = th.model.variant == Model::XXZ;
    const double q = th.q;
    if (w.imag() == 0.0 && std::abs(w.real()) <= q)
        throw on_cut_error("cauchy_z_tilde: w on the cut [-q,q]");

    const double dx = std::max(std::abs(w.real()) - q, 0.0);
    const double dist = std::hypot(dx, w.imag());
    const Grid& g = th.grid;
    const cx denom_pref = 1.0 / (2.0 * pi * ii);

    if (dist >= 5.0 * g.spacing()) {
        cx s{};
        for (int j = 0; j < g.size(); ++j) {
            cx ker = xxz ? 1.0 / std::tanh(g.nodes[j] - w) : 1.0 / (g.nodes[j] - w);
            s += g.weights[j] * ker * th.Z[j];
        }
        return denom_pref * s;
    }

    const double x0 = std::clamp(w.real(), -q, q);
    const double z0 = th.Z_sol(x0);
    auto f = [&](double lam) -> cx {
        cx ker = xxz ? 1.0 / std::tanh(lam - w) : 1.0 / (lam - w);
        return (th.Z_sol(lam) - z0) * ker;
    };
    cx reg = integrate_graded(f, -q, q, x0, dist);
    // int coth(l-w) dl and int dl/(l-w) in closed form; the integrand stays
    // in one half plane for Im w != 0, so principal logs are jump-free.
    cx closed = xxz ? std::log(std::sinh(q - w)) - std::log(std::sinh(-q - w))
                    : std::log(q - w) - std::log(-q - w);
    return denom_pref * (reg + z0 * closed);
}

/// Evaluator object for the Cauchy transform of a fixed solution.
struct CauchyTransform {
    const ThermoSolution* thermo = nullptr;
    cx operator()(cx w) const { return cauchy_z_tilde(*thermo, w); }
};

/// C0 = int int Z(l) Z(m) / sinh^2(l-m-i zeta) dl dm (rational for LL).
inline double const_C0(const ThermoSolution& th) {
    const cx s = kernel_shift(th.model);
    const bool xxz = th.model.variant == Model::XXZ;
    const Grid& g = th.grid;
    cx acc{};
    for (int i = 0; i < g.size(); ++i) {
        for (int j = 0; j < g.size(); ++j) {
            cx d = g.nodes[i] - g.nodes[j] - s;
            cx k = xxz ? 1.0 / sqr(std::sinh(d)) : 1.0 / sqr(d);
            acc += g.weights[i] * g.weights[j] * th.Z[i] * th.Z[j] * k;
        }
    }
    if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, std::abs(acc)))
        throw convergence_error("const_C0: imaginary residue above tolerance");
    return acc.real();
}

/// C1 = 1/2 intint [Z'(l)Z(m)-Z(l)Z'(m)]/tanh(l-m) + 2 Zq int [Zq-Z]/tanh(q-l)
/// (tanh -> identity for LL). Z' by spectral differentiation of the samples.
inline double const_C1(const ThermoSolution& th) {
    const bool hyp = th.model.variant == Model::XXZ;
    const Grid& g = th.grid;
    std::vector<double> bw = barycentric_weights(g);
    std::vector<double> D = derivative_matrix(g);
    std::vector<double> Zd = apply_matrix(D, th.Z);
    std::vector<double> Zdd = apply_matrix(D, Zd);
    double dbl = 0.5 * detail::antisym_double_integral<double>(g, bw, th.Z, Zd, Zdd, hyp);
    double edge = 2.0 * th.Z_q *
                  detail::edge_integral<double>(g, bw, th.Z, Zd, Zdd, +1, th.Z_q, hyp);
    return dbl + edge;
}

/// log det[I + sign K/(2 pi)] on [-q,q] (sign per model convention).
inline double log_det_K_interval(const ThermoSolution& th) {
    const ModelSpec m = th.model;
    auto kern = [m](double x, double y) -> cx {
        return kernel_sign(m) * kernel_K_real(m, x - y) / (2.0 * pi);
    };
    return det_interval(kern, th.grid).log_det.real();
}

namespace detail {

// contour determinant of delta + (1/2pi i) dw_i k(i,j) from a row/column
// factorized kernel, with per-node data precomputed
template <class K>
cx contour_log_det_indexed(const Contour& c, K&& kernel_ij) {
    const int n = c.size();
    ComplexMatrix m(n);
    const cx pref = 1.0 / (2.0 * pi * ii);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) + pref * c.dw[i] * kernel_ij(i, j);
    return log_det(m);
}

} // namespace detail

namespace detail {

inline void check_contour_strip(const ThermoSolution& th, const Contour& c) {
    if (2.0 * c.d >= th.model.strip())
        throw std::invalid_argument("contour too tall: kernel poles cross the contour (need 2d < strip)");
}

} // namespace detail

/// log det[I + (1/2pi i) U^{(lambda)}_{theta1}] on the contour at twist beta.
inline cx log_det_U_lambda(const ThermoSolution& th, const Contour& c, cx beta, cx theta1) {
    detail::check_contour_strip(th, c);
    const cx kappa = std::exp(beta);
    const cx s = kernel_shift(th.model);
    const int n = c.size();
    std::vector<cx> num(n), den(n), ktheta(n);
    for (int i = 0; i < n; ++i) {
        num[i] = std::exp(beta * cauchy_z_tilde(th, c.nodes[i]));
        den[i] = std::exp(beta * cauchy_z_tilde(th, c.nodes[i] + s)) -
                 std::exp(beta + beta * cauchy_z_tilde(th, c.nodes[i] - s));
        ktheta[i] = kernel_K_kappa(th.model, theta1 - c.nodes[i], kappa);
    }
    auto kij = [&](int i, int j) {
        return -num[i] * (kernel_K_kappa(th.model, c.nodes[i] - c.nodes[j], kappa) - ktheta[j]) / den[i];
    };
    return detail::contour_log_det_indexed(c, kij);
}

/// log det[I + (1/2pi i) U^{(z)}_{theta2}] on the contour at twist beta.
inline cx log_det_U_z(const ThermoSolution& th, const Contour& c, cx beta, cx theta2) {
    detail::check_contour_strip(th, c);
    const cx kappa = std::exp(beta);
    const cx s = kernel_shift(th.model);
    const int n = c.size();
    std::vector<cx> num(n), den(n), ktheta(n);
    for (int j = 0; j < n; ++j) {
        num[j] = std::exp(-beta * cauchy_z_tilde(th, c.nodes[j]));
        den[j] = std::exp(-beta * cauchy_z_tilde(th, c.nodes[j] - s)) -
                 std::exp(beta - beta * cauchy_z_tilde(th, c.nodes[j] + s));
        ktheta[j] = kernel_K_kappa(th.model, c.nodes[j] - theta2, kappa);
    }
    auto kij = [&](int i, int j) {
        return num[j] * (kernel_K_kappa(th.model, c.nodes[i] - c.nodes[j], kappa) - ktheta[i]) / den[j];
    };
    return detail::contour_log_det_indexed(c, kij);
}

/// Free-fermion closed-form kernel for theta1 = -q at beta = 2 pi i (XXZ,
/// Z = 1): U(w,w') = -tanh(w-q) coth(w+q) [tanh(w-w') + tanh(q+w')].
/// Holomorphic inside the contour, so its determinant equals 1.
inline cx log_det_U_ff(const ThermoSolution& th, const Contour& c) {
    const double q = th.q;
    auto kern = [q](cx w, cx wp) {
        return -std::tanh(w - q) / std::tanh(w + q) * (std::tanh(w - wp) + std::tanh(q + wp));
    };
    return detail::contour_log_det(kern, c);
}

/// The coefficient A(beta) of the leading non-oscillating term: ratio of the
/// two contour determinants to the squared interval determinant and the
/// boundary denominators.
inline cx coeff_A(const ThermoSolution& th, const Contour& c, cx beta, cx theta1, cx theta2) {
    if (beta == cx{})
        throw std::invalid_argument("coeff_A: beta = 0 is a removable limit; evaluate the limit flag instead");
    const cx s = kernel_shift(th.model);
    const cx kappa = std::exp(beta);
    cx d1 = std::exp(beta * cauchy_z_tilde(th, theta1 + s)) -
            std::exp(beta + beta * cauchy_z_tilde(th, theta1 - s));
    cx d2 = std::exp(-beta * cauchy_z_tilde(th, theta2 - s)) -
            std::exp(beta - beta * cauchy_z_tilde(th, theta2 + s));
    cx ld1 = log_det_U_lambda(th, c, beta, theta1);
    cx ld2 = log_det_U_z(th, c, beta, theta2);
    double ldK = log_det_K_interval(th);
    return sqr(kappa - 1.0) * std::exp(ld1 + ld2 - 2.0 * ldK) / (d1 * d2);
}

inline cx coeff_A(const ThermoSolution& th, const Contour& c, cx beta) {
    return coeff_A(th, c, beta, -th.q, th.q);
}

/// Amplitude of the oscillating term (modulus form, theta1 = -q):
/// |e^{i pi [z(q-is)-z(-q-is)]} G(2,Z) det[I+U/2pii] / (pi Z det[I+-K/2pi])|^2.
/// The free-fermion closed-form kernel replaces the generic one at Z ~ 1,
/// where the generic kernel degenerates to 0/0.
inline double amplitude_Atilde(const ThermoSolution& th, const Contour& c) {
    const cx s = kernel_shift(th.model);
    const double zq = th.Z_q;
    cx ld;
    if (th.model.variant == Model::XXZ && std::abs(zq - 1.0) < 1e-10)
        ld = log_det_U_ff(th, c);
    else
        ld = log_det_U_lambda(th, c, cx(0.0, 2.0 * pi), -th.q);
    cx delta = cauchy_z_tilde(th, th.q - s) - cauchy_z_tilde(th, -th.q - s);
    cx logG2 = barnes_pair(cx(zq, 0.0), 2);
    double ldK = log_det_K_interval(th);
    double logmag = std::real(ii * pi * delta) + logG2.real() + ld.real() - std::log(pi * zq) - ldK;
    return std::exp(2.0 * logmag);
}

/// Same amplitude through the second-derivative route -2 G^2(1,Z) A''(2pi i)
/// with free theta; used for the theta-independence checks.
inline double amplitude_Atilde_theta(const ThermoSolution& th, const Contour& c, cx theta1, cx theta2) {
    const cx beta = cx(0.0, 2.0 * pi);
    const cx s = kernel_shift(th.model);
    cx d1 = std::exp(beta * cauchy_z_tilde(th, theta1 + s)) -
            std::exp(beta + beta * cauchy_z_tilde(th, theta1 - s));
    cx d2 = std::exp(-beta * cauchy_z_tilde(th, theta2 - s)) -
            std::exp(beta - beta * cauchy_z_tilde(th, theta2 + s));
    cx ld1 = log_det_U_lambda(th, c, beta, theta1);
    cx ld2 = log_det_U_z(th, c, beta, theta2);
    double ldK = log_det_K_interval(th);
    cx app = 2.0 * std::exp(ld1 + ld2 - 2.0 * ldK) / (d1 * d2);
    cx val = -2.0 * std::exp(2.0 * barnes_pair(cx(th.Z_q, 0.0), 1)) * app;
    return val.real();
}

/// Contour with the default geometry: height strip/4 (capped by q so the
/// Lieb-Liniger ellipse stays comparable to the interval).
inline Contour default_contour(const ThermoSolution& th, int n = 256, double height_scale = 0.25) {
    double d = std::min(th.model.strip() * height_scale, th.q);
    return Contour::ellipse(th.q, d, n);
}

/// Leading expansion: constant + power_amp m^{-power_exp}
///                    + osc_amp cos(osc_phase_rate m) m^{-osc_exp}.
struct AsymptoticExpansion {
    double const_term = 0.0;
    double power_amp = 0.0;
    double power_exp = 2.0;
    double osc_amp = 0.0;
    double osc_exp = 0.0;        // = 2 Z^2
    double osc_phase_rate = 0.0; // = 2 p_F
    double form_factor_sq = 0.0; // |F_sigma|^2, half the oscillating amplitude
    // leading-order only; no subleading corrections included

    double power_term(double m) const { return power_amp * std::pow(m, -power_exp); }
    double osc_term(double m) const {
        return osc_amp * std::cos(osc_phase_rate * m) * std::pow(m, -osc_exp);
    }
    double eval(double m) const { return const_term + power_term(m) + osc_term(m); }
};

/// Leading <sigma^z_1 sigma^z_{m+1}> expansion for XXZ.
inline AsymptoticExpansion szsz_leading(const ThermoSolution& th, const Contour& c) {
    if (th.model.variant != Model::XXZ)
        throw std::invalid_argument("szsz_leading: XXZ model required");
    AsymptoticExpansion e;
    const double zq = th.Z_q;
    const double c0 = const_C0(th), c1 = const_C1(th);
    const double at = amplitude_Atilde(th, c);
    const double base = 2.0 * pi * std::sinh(2.0 * th.q) * th.rho_q;
    e.const_term = sqr(2.0 * th.D - 1.0);
    e.power_amp = -2.0 * zq * zq / (pi * pi);
    e.power_exp = 2.0;
    e.osc_exp = 2.0 * zq * zq;
    e.osc_phase_rate = 2.0 * th.p_F;
    e.form_factor_sq = 4.0 * at * sqr(std::sin(th.p_F)) * std::exp(c1 - c0) * std::pow(base, -2.0 * zq * zq);
    e.osc_amp = 2.0 * e.form_factor_sq;
    return e;
}

/// m-independent pieces of G0(beta, m) so m-sweeps reuse the determinants.
struct G0Parts {
    cx beta{};
    cx A{};
    cx log_barnes_sq{};
    cx c_term{};
    double log_base = 0.0;
    double D = 0.0;
    double zq = 0.0;

    cx eval(double m) const {
        cx expo = beta * m * D + beta * beta * zq * zq / (2.0 * pi * pi) * (log_base + std::log(m)) +
                  log_barnes_sq + c_term;
        return A * std::exp(expo);
    }
};

inline G0Parts make_g0_parts(const ThermoSolution& th, const Contour& c, cx beta) {
    if (th.model.variant != Model::XXZ)
        throw std::invalid_argument("generating function: XXZ model required");
    G0Parts p;
    p.beta = beta;
    p.zq = th.Z_q;
    p.D = th.D;
    p.A = coeff_A(th, c, beta);
    p.log_barnes_sq = 2.0 * barnes_pair(beta * th.Z_q / (2.0 * pi * ii), 1);
    p.log_base = std::log(2.0 * pi * std::sinh(2.0 * th.q) * th.rho_q);
    p.c_term = beta * beta / (4.0 * pi * pi) * (const_C0(th) - const_C1(th));
    return p;
}

/// Leading non-oscillating generating function G^(0)(beta, m). The beta -> 0
/// limit equals 1 and must be requested through the flag.
inline cx generating_fn_G0(const ThermoSolution& th, const Contour& c, cx beta, double m,
                           bool beta_zero_limit = false) {
    if (beta_zero_limit) return cx(1.0, 0.0);
    return make_g0_parts(th, c, beta).eval(m);
}

/// sum_{sigma=0,+-1} G^(0)(beta + 2 pi i sigma, m): the non-oscillating term
/// plus the two leading oscillating companions.
inline cx generating_fn_full(const ThermoSolution& th, const Contour& c, cx beta, double m) {
    cx total{};
    for (int sigma : {0, +1, -1}) {
        cx b = beta + 2.0 * pi * ii * static_cast<double>(sigma);
        if (std::abs(b) < 1e-13) {
            total += 1.0; // removable beta -> 0 limit
            continue;
        }
        if (std::abs(std::exp(b) - 1.0) < 1e-13) {
            // structural (e^beta - 1)^2 zero of A at beta in 2 pi i Z
            continue;
        }
        total += generating_fn_G0(th, c, b, m);
    }
    return total;
}

/// Cross-check route to <sigma^z sigma^z>: second lattice difference of the
/// numerical d^2/dbeta^2 of the generating function at beta = 0.
inline double szsz_from_generating(const ThermoSolution& th, const Contour& c, int m,
                                   double step = 1e-3) {
    if (m < 2) throw std::invalid_argument("szsz_from_generating: need m >= 2");
    std::vector<G0Parts> parts;
    std::vector<cx> betas;
    for (double h : {step, -step, step / 2.0, -step / 2.0})
        for (int sigma : {0, +1, -1})
            betas.push_back(cx(h, 0.0) + 2.0 * pi * ii * static_cast<double>(sigma));
    parts.reserve(betas.size());
    for (cx b : betas) parts.push_back(make_g0_parts(th, c, b));

    auto full_at = [&](int block, double mm) {
        // block 0: +h, 1: -h, 2: +h/2, 3: -h/2
        cx s{};
        for (int k = 0; k < 3; ++k) s += parts[static_cast<size_t>(block) * 3 + k].eval(mm);
        return s;
    };
    auto second_deriv = [&](double mm) {
        cx a = (full_at(0, mm) - 2.0 + full_at(1, mm)) / (step * step);
        cx b = (full_at(2, mm) - 2.0 + full_at(3, mm)) / (step * step / 4.0);
        return (4.0 * b - a) / 3.0; // Richardson
    };
    cx f = second_deriv(m + 1) + second_deriv(m - 1) - 2.0 * second_deriv(m);
    double szav = 1.0 - 2.0 * th.D;
    return 2.0 * f.real() + 2.0 * szav - 1.0;
}

/// Leading <j(x) j(0)> expansion for the Bose gas.
inline AsymptoticExpansion ll_jj_leading(const ThermoSolution& th, const Contour& c) {
    if (th.model.variant != Model::LiebLiniger)
        throw std::invalid_argument("ll_jj_leading: Lieb-Liniger model required");
    AsymptoticExpansion e;
    const double zq = th.Z_q;
    const double c0 = const_C0(th), c1 = const_C1(th);
    const double at = amplitude_Atilde(th, c);
    const double base = 4.0 * pi * th.q * th.rho_q;
    e.const_term = sqr(th.D);
    e.power_amp = -zq * zq / (2.0 * pi * pi);
    e.power_exp = 2.0;
    e.osc_exp = 2.0 * zq * zq;
    e.osc_phase_rate = 2.0 * th.p_F;
    e.osc_amp = 2.0 * at * sqr(th.p_F) * std::exp(c1 - c0) * std::pow(base, -2.0 * zq * zq);
    e.form_factor_sq = 0.5 * e.osc_amp;
    return e;
}

} // namespace bethe
