#pragma once

#include <cmath>
#include <vector>

#include "numeric.hpp"
#include "quadrature.hpp"

namespace bethe {
namespace detail {

inline double metric_fn(double x, bool hyperbolic) { return hyperbolic ? std::tanh(x) : x; }

/// double integral of [f'(l) f(m) - f(l) f'(m)] / metric(l - m); the diagonal
/// is removable, with value f f'' - f'^2. Taylor fallback below 1e-4 separation.
template <class T>
T antisym_double_integral(const Grid& g, const std::vector<double>& bw, const std::vector<T>& f,
                          const std::vector<T>& fd, const std::vector<T>& fdd, bool hyperbolic) {
    const int n = g.size();
    T s{};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double sep = g.nodes[i] - g.nodes[j];
            T val;
            if (std::abs(sep) < 1e-4) {
                double mid = 0.5 * (g.nodes[i] + g.nodes[j]);
                T fm = barycentric_eval(g, bw, f, mid);
                T f1 = barycentric_eval(g, bw, fd, mid);
                T f2 = barycentric_eval(g, bw, fdd, mid);
                val = fm * f2 - f1 * f1;
            } else {
                val = (fd[i] * f[j] - f[i] * fd[j]) / metric_fn(sep, hyperbolic);
            }
            s += g.weights[i] * g.weights[j] * val;
        }
    }
    return s;
}

/// int [f_edge - f(l)] / metric(sigma q - l) dl, removable at l = sigma q.
template <class T>
T edge_integral(const Grid& g, const std::vector<double>& bw, const std::vector<T>& f,
                const std::vector<T>& fd, const std::vector<T>& fdd, int sigma, T f_edge,
                bool hyperbolic) {
    const double q = sigma > 0 ? g.b : g.a;
    T s{};
    for (int i = 0; i < g.size(); ++i) {
        double lam = g.nodes[i];
        double sep = sigma > 0 ? (g.b - lam) : (lam - g.a);
        T val;
        if (sep < 1e-4) {
            T f1 = barycentric_eval(g, bw, fd, q);
            T f2 = barycentric_eval(g, bw, fdd, q);
            val = f1 - 0.5 * sigma * sep * f2;
        } else {
            val = (f_edge - f[i]) / metric_fn(sigma > 0 ? (g.b - lam) : (g.a - lam), hyperbolic);
        }
        s += g.weights[i] * val;
    }
    return s;
}

} // namespace detail
} // namespace bethe
