#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "numeric.hpp"

namespace bethe {

/// Gauss-Legendre rule on [a,b]. Nodes are strictly increasing and interior.
struct Grid {
    double a = -1.0, b = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
    double spacing() const { return (b - a) / static_cast<double>(size()); }
};

// Nodes by Newton iteration on P_n with the usual cosine initial guesses.
inline Grid gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: node count must be >= 1");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");

    Grid g;
    g.a = a;
    g.b = b;
    g.nodes.resize(n);
    g.weights.resize(n);

    const int half = (n + 1) / 2;
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence up to degree n
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        g.nodes[i] = xm - xl * x;
        g.nodes[n - 1 - i] = xm + xl * x;
        double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
        g.weights[i] = w;
        g.weights[n - 1 - i] = w;
    }
    return g;
}

template <class F>
auto integrate(const Grid& g, F&& f) {
    using R = decltype(f(0.0));
    R s{};
    for (int i = 0; i < g.size(); ++i) s += g.weights[i] * f(g.nodes[i]);
    return s;
}

/// Barycentric weights of the Gauss-Legendre nodes (up to a common factor,
/// which cancels in interpolation and differentiation).
inline std::vector<double> barycentric_weights(const Grid& g) {
    const int n = g.size();
    std::vector<double> bw(n);
    const double xl = 0.5 * (g.b - g.a);
    for (int i = 0; i < n; ++i) {
        // reference-interval coordinate in (-1,1)
        double t = (g.nodes[i] - 0.5 * (g.a + g.b)) / xl;
        double v = std::sqrt((1.0 - t * t) * g.weights[i]);
        bw[i] = (i % 2 == 0) ? v : -v;
    }
    return bw;
}

/// Spectral differentiation matrix on the grid nodes (row-major n*n):
/// (Df)_i = sum_j D[i*n+j] f_j differentiates the polynomial interpolant.
inline std::vector<double> derivative_matrix(const Grid& g) {
    const int n = g.size();
    std::vector<double> bw = barycentric_weights(g);
    std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double v = (bw[j] / bw[i]) / (g.nodes[i] - g.nodes[j]);
            d[static_cast<size_t>(i) * n + j] = v;
            diag -= v;
        }
        d[static_cast<size_t>(i) * n + i] = diag;
    }
    return d;
}

template <class T>
std::vector<T> apply_matrix(const std::vector<double>& m, const std::vector<T>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<T> r(n, T{});
    for (int i = 0; i < n; ++i) {
        T s{};
        const double* row = m.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * f[j];
        r[i] = s;
    }
    return r;
}

/// Evaluate the polynomial interpolant of samples f at x (barycentric form).
template <class T>
T barycentric_eval(const Grid& g, const std::vector<double>& bw, const std::vector<T>& f, double x) {
    const int n = g.size();
    T num{};
    double den = 0.0;
    for (int i = 0; i < n; ++i) {
        double dx = x - g.nodes[i];
        if (dx == 0.0) return f[i];
        double c = bw[i] / dx;
        num += c * f[i];
        den += c;
    }
    return num / den;
}

namespace detail {

template <class F>
auto gauss16_panel(F&& f, double a, double b) {
    // 16-point rule on one panel, nodes computed once
    static const Grid ref = gauss_legendre(16, -1.0, 1.0);
    using R = decltype(f(0.0));
    R s{};
    const double xm = 0.5 * (a + b), xl = 0.5 * (b - a);
    for (int i = 0; i < 16; ++i) s += ref.weights[i] * f(xm + xl * ref.nodes[i]);
    return xl * s;
}

} // namespace detail

/// Composite Gauss quadrature over [a,b] with panels geometrically graded
/// toward x0 (panel widths grow as powers of two away from x0, the smallest
/// comparable to scale). Intended for integrands analytic on [a,b] but with a
/// complex singularity at distance ~scale from x0.
template <class F>
auto integrate_graded(F&& f, double a, double b, double x0, double scale) {
    using R = decltype(f(0.0));
    std::vector<double> pts;
    pts.push_back(a);
    pts.push_back(b);
    if (scale <= 0.0) scale = 1e-14;
    for (int dir : {-1, +1}) {
        double h = scale;
        double x = x0;
        for (int k = 0; k < 80; ++k) {
            x += dir * h;
            if (x <= a || x >= b) break;
            pts.push_back(x);
            h *= 2.0;
        }
    }
    if (x0 > a && x0 < b) pts.push_back(x0);
    std::sort(pts.begin(), pts.end());
    R s{};
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] - pts[i] < 1e-300) continue;
        s += detail::gauss16_panel(f, pts[i], pts[i + 1]);
    }
    return s;
}

} // namespace bethe
