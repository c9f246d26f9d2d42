#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "linalg.hpp"
#include "quadrature.hpp"

namespace bethe {

/// Closed elliptic contour around [-q,q], semi-axes (q+d, d), parameterized
/// trapezoidally in t; dw holds w'(t_k) * dt for the quadrature sum.
struct Contour {
    double q = 0.0;
    double d = 0.0;
    std::vector<cx> nodes;
    std::vector<cx> dw;

    int size() const { return static_cast<int>(nodes.size()); }

    static Contour ellipse(double q, double d, int n) {
        if (!(q > 0.0) || !(d > 0.0) || n < 8) throw std::invalid_argument("Contour::ellipse: bad parameters");
        Contour c;
        c.q = q;
        c.d = d;
        c.nodes.resize(n);
        c.dw.resize(n);
        const double dt = 2.0 * pi / n;
        for (int k = 0; k < n; ++k) {
            double t = dt * k;
            c.nodes[k] = cx((q + d) * std::cos(t), d * std::sin(t));
            c.dw[k] = cx(-(q + d) * std::sin(t), d * std::cos(t)) * dt;
        }
        return c;
    }

    /// |winding number - 1| around an interior point, by the same quadrature.
    double winding_residual(cx lam) const {
        cx s = 0.0;
        for (int k = 0; k < size(); ++k) s += dw[k] / (nodes[k] - lam);
        return std::abs(s / (2.0 * pi * ii) - 1.0);
    }
};

struct FredholmResult {
    cx log_det{};
    int n_nodes = 0;
    double refinement_delta = 0.0; // |log_det(n) - log_det(n/2)|
};

namespace detail {

template <class K>
cx interval_log_det(K&& kernel, const Grid& g) {
    const int n = g.size();
    ComplexMatrix m(n);
    std::vector<double> sw(n);
    for (int i = 0; i < n; ++i) sw[i] = std::sqrt(g.weights[i]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) + sw[i] * kernel(g.nodes[i], g.nodes[j]) * sw[j];
    return log_det(m);
}

template <class K>
cx contour_log_det(K&& kernel, const Contour& c) {
    const int n = c.size();
    ComplexMatrix m(n);
    const cx pref = 1.0 / (2.0 * pi * ii);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) + pref * c.dw[i] * kernel(c.nodes[i], c.nodes[j]);
    return log_det(m);
}

} // namespace detail

/// log det(I + V) on the grid's interval, V given by its kernel; discretized
/// as det[delta_ij + sqrt(w_i) K(x_i,x_j) sqrt(w_j)].
inline FredholmResult det_interval(const std::function<cx(double, double)>& kernel, const Grid& g) {
    FredholmResult r;
    r.n_nodes = g.size();
    r.log_det = detail::interval_log_det(kernel, g);
    int nh = std::max(8, g.size() / 2);
    Grid gh = gauss_legendre(nh, g.a, g.b);
    r.refinement_delta = std::abs(r.log_det - detail::interval_log_det(kernel, gh));
    return r;
}

/// log det(I + (1/2pi i) U) on a closed contour.
inline FredholmResult det_contour(const std::function<cx(cx, cx)>& kernel, const Contour& c) {
    FredholmResult r;
    r.n_nodes = c.size();
    r.log_det = detail::contour_log_det(kernel, c);
    int nh = std::max(16, c.size() / 2);
    Contour ch = Contour::ellipse(c.q, c.d, nh);
    r.refinement_delta = std::abs(r.log_det - detail::contour_log_det(kernel, ch));
    return r;
}

namespace detail {

// generic curve for the shift identity: nodes + complex quadrature weights
struct Curve {
    std::vector<cx> x;
    std::vector<cx> w;
};

inline Curve as_curve(const Contour& c) {
    Curve k;
    k.x = c.nodes;
    k.w = c.dw;
    return k;
}

inline Curve as_curve(const Grid& g) {
    Curve k;
    k.x.assign(g.nodes.begin(), g.nodes.end());
    k.w.assign(g.weights.begin(), g.weights.end());
    return k;
}

inline cx curve_log_det(const std::function<cx(cx, cx)>& kernel, const Curve& c) {
    const int n = static_cast<int>(c.x.size());
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) + kernel(c.x[i], c.x[j]) * c.w[j];
    return log_det(m);
}

template <class CurveLike>
double shift_identity_residual(const std::function<cx(cx, cx)>& V, const std::function<cx(cx)>& h,
                               cx w0, const CurveLike& curve) {
    Curve c = as_curve(curve);
    const int n = static_cast<int>(c.x.size());
    // g = h + V h on the curve, and at the off-curve point w0
    auto apply = [&](cx w) {
        cx s = h(w);
        for (int j = 0; j < n; ++j) s += V(w, c.x[j]) * h(c.x[j]) * c.w[j];
        return s;
    };
    std::vector<cx> gvals(n);
    for (int i = 0; i < n; ++i) gvals[i] = apply(c.x[i]);
    cx g0 = apply(w0);
    if (std::abs(g0) < 1e-300) throw pole_error("shift_identity_check: g(w0) = 0");

    cx lhs = std::exp(curve_log_det(V, c));
    // modified kernel V(w,w') - g(w)/g(w0) V(w0,w')
    ComplexMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j ? 1.0 : 0.0) + (V(c.x[i], c.x[j]) - gvals[i] / g0 * V(w0, c.x[j])) * c.w[j];
    }
    cx rhs = g0 / h(w0) * std::exp(log_det(m));
    return std::abs(lhs - rhs) / std::max(1e-300, std::abs(lhs));
}

} // namespace detail

/// Residual of det[I+V] = g(w0)/h(w0) det[I + V(w,w') - g(w)/g(w0) V(w0,w')]
/// with g = (I+V)h, on a closed contour.
inline double shift_identity_check(const std::function<cx(cx, cx)>& V, const std::function<cx(cx)>& h,
                                   cx w0, const Contour& c) {
    return detail::shift_identity_residual(V, h, w0, c);
}

/// Same identity for an operator living on an interval grid.
inline double shift_identity_check(const std::function<cx(cx, cx)>& V, const std::function<cx(cx)>& h,
                                   cx w0, const Grid& g) {
    return detail::shift_identity_residual(V, h, w0, g);
}

/// Relative difference of det[I + (1/2pi i) U_theta] / normalizer(theta)
/// between two theta values.
inline double theta_independence_check(const std::function<std::function<cx(cx, cx)>(cx)>& family,
                                       const std::function<cx(cx)>& normalizer, cx theta1, cx theta2,
                                       const Contour& c) {
    cx r1 = std::exp(detail::contour_log_det(family(theta1), c)) / normalizer(theta1);
    cx r2 = std::exp(detail::contour_log_det(family(theta2), c)) / normalizer(theta2);
    return std::abs(r1 - r2) / std::max(1e-300, std::abs(r1));
}

} // namespace bethe
