#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "models.hpp"
#include "quadrature.hpp"
#include "rootfind.hpp"

namespace bethe {

/// Sampled solution of f(lam) + sign/(2pi) int_{-q}^{q} K(lam-mu) f(mu) dmu = rhs(lam),
/// with the Nystrom interpolation formula as off-grid evaluator.
struct IeSolution {
    ModelSpec model;
    Grid grid;
    std::vector<double> values;
    std::function<double(double)> rhs;

    double operator()(double lam) const {
        double s = 0.0;
        for (int j = 0; j < grid.size(); ++j)
            s += grid.weights[j] * kernel_K_real(model, lam - grid.nodes[j]) * values[j];
        return rhs(lam) - kernel_sign(model) * s / (2.0 * pi);
    }
};

inline IeSolution solve_linear_ie(const ModelSpec& model, double q,
                                  std::function<double(double)> rhs, int n) {
    if (!(q > 0.0)) throw std::invalid_argument("solve_linear_ie: need q > 0");
    if (n < 8) throw std::invalid_argument("solve_linear_ie: need n >= 8");
    IeSolution sol;
    sol.model = model;
    sol.grid = gauss_legendre(n, -q, q);
    sol.rhs = std::move(rhs);
    const double sgn = kernel_sign(model);
    std::vector<double> a(static_cast<size_t>(n) * n);
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            a[static_cast<size_t>(i) * n + j] =
                (i == j ? 1.0 : 0.0) +
                sgn * sol.grid.weights[j] * kernel_K_real(model, sol.grid.nodes[i] - sol.grid.nodes[j]) / (2.0 * pi);
        b[i] = sol.rhs(sol.grid.nodes[i]);
    }
    double amax = 0.0;
    for (double v : a) amax = std::max(amax, std::abs(v));
    try {
        sol.values = solve_dense(n, std::move(a), std::move(b));
    } catch (const singular_matrix_error&) {
        throw singular_matrix_error(
            "solve_linear_ie: discretized operator numerically singular; condition estimate above " +
            std::to_string(amax) + "e300 (pivot below 1e-300)");
    }
    return sol;
}

namespace detail {

inline std::function<double(double)> dressed_energy_rhs(const ModelSpec& m) {
    if (m.variant == Model::XXZ)
        return [m](double lam) { return m.h - 2.0 * bare_momentum_deriv_real(m, lam) * std::sin(m.zeta); };
    // Convention for the Lieb-Liniger bare energy (the standard one).
    return [m](double lam) { return lam * lam - m.h; };
}

inline double dressed_energy_at_boundary(const ModelSpec& m, double q, int n) {
    IeSolution eps = solve_linear_ie(m, q, dressed_energy_rhs(m), n);
    return eps(q);
}

} // namespace detail

/// Fermi boundary q with eps(q) = 0, found by bracketed root finding on top of
/// full Nystrom solves of the dressed-energy equation.
inline double find_fermi_boundary(const ModelSpec& m, int n = 128) {
    if (m.variant == Model::XXZ) {
        double eps0 = m.h - 2.0 * bare_momentum_deriv_real(m, 0.0) * std::sin(m.zeta);
        if (eps0 >= 0.0)
            throw no_fermi_sea_error("find_fermi_boundary: field too strong, eps(0) >= 0 as q -> 0");
    }
    auto f = [&](double q) { return detail::dressed_energy_at_boundary(m, q, n); };
    double lo = 1e-3;
    double flo = f(lo);
    if (flo >= 0.0) {
        // root below the initial guess; shrink
        double hi = lo;
        for (int it = 0; it < 60 && flo >= 0.0; ++it) {
            hi = lo;
            lo *= 0.25;
            flo = f(lo);
        }
        if (flo >= 0.0) throw no_fermi_sea_error("find_fermi_boundary: no sign change while shrinking bracket");
        return find_root(f, lo, hi, 1e-12);
    }
    double hi = lo;
    double fhi = flo;
    for (int it = 0; it < 60 && fhi < 0.0; ++it) {
        hi *= 2.0;
        fhi = f(hi);
    }
    if (fhi < 0.0) throw no_fermi_sea_error("find_fermi_boundary: dressed energy never turns positive");
    return find_root(f, hi * 0.5, hi, 1e-12);
}

/// All dressed quantities of the thermodynamic-limit ground state.
struct ThermoSolution {
    ModelSpec model;
    double q = 0.0;
    Grid grid;
    std::vector<double> rho; // density samples
    std::vector<double> Z;   // dressed charge samples
    std::vector<double> eps; // dressed energy samples
    double p_F = 0.0;        // Fermi momentum p(q)
    double D = 0.0;          // average density
    double Z_q = 0.0;        // dressed charge at the boundary
    double rho_q = 0.0;      // density at the boundary

    IeSolution rho_sol, Z_sol, eps_sol; // off-grid evaluators
};

inline ThermoSolution dressed_quantities(const ModelSpec& m, int n = 128) {
    ThermoSolution t;
    t.model = m;
    t.q = find_fermi_boundary(m, n);

    t.Z_sol = solve_linear_ie(m, t.q, [](double) { return 1.0; }, n);
    if (m.variant == Model::XXZ) {
        t.rho_sol = solve_linear_ie(
            m, t.q, [m](double lam) { return bare_momentum_deriv_real(m, lam) / (2.0 * pi); }, n);
    } else {
        // LL density is tied to the dressed charge, rho = Z / 2pi
        t.rho_sol = t.Z_sol;
        t.rho_sol.rhs = [](double) { return 1.0 / (2.0 * pi); };
        for (double& v : t.rho_sol.values) v /= 2.0 * pi;
    }
    t.eps_sol = solve_linear_ie(m, t.q, detail::dressed_energy_rhs(m), n);

    t.grid = t.Z_sol.grid;
    t.Z = t.Z_sol.values;
    t.rho = t.rho_sol.values;
    t.eps = t.eps_sol.values;

    t.D = 0.0;
    for (int i = 0; i < n; ++i) t.D += t.grid.weights[i] * t.rho[i];
    // p(q) = 2pi int_0^q rho, on its own sub-grid through the interpolant
    Grid half = gauss_legendre(std::max(32, n / 2), 0.0, t.q);
    double pq = 0.0;
    for (int i = 0; i < half.size(); ++i) pq += half.weights[i] * t.rho_sol(half.nodes[i]);
    t.p_F = 2.0 * pi * pq;
    t.Z_q = t.Z_sol(t.q);
    t.rho_q = t.rho_sol(t.q);
    return t;
}

} // namespace bethe
