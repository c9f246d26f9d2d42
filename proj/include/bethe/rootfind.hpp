#pragma once

#include <cmath>
#include <functional>

#include "numeric.hpp"

namespace bethe {

/// Brent's method with bisection safeguard. Requires a sign change on [lo,hi].
inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-12) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw no_bracket_error("find_root: f(lo) and f(hi) have the same sign");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q2;
            if (a == c) {
                p = 2.0 * xm * s;
                q2 = 1.0 - s;
            } else {
                double q = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q2 = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q2 = -q2;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q2 - std::abs(tol1 * q2), std::abs(e * q2))) {
                e = d;
                d = p / q2;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

} // namespace bethe
