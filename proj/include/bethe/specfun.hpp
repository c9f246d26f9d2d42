#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "numeric.hpp"

namespace bethe {

namespace detail {

// Lanczos, g = 7, 9 coefficients. Valid for Re z >= 0.5.
inline cx lanczos_log_gamma(cx z) {
    static const double c[9] = {
        0.99999999999980993,    676.5203681218851,    -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,  12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= 1.0;
    cx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    cx t = z + 7.5;
    return 0.9189385332046727417803297364 /* log sqrt(2 pi) */
           + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(pi z) on the closed upper half plane, unwound so that the
// reflection formula yields the principal branch of log Gamma.
inline cx log_sin_pi_upper(cx z) {
    if (z.imag() == 0.0) {
        double s = std::sin(pi * z.real());
        if (s > 0.0) return cx(std::log(s), 0.0);
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}),  |e^{2 pi i z}| <= 1
    return cx(0.0, pi / 2) - std::log(2.0) - ii * pi * z + std::log(1.0 - std::exp(2.0 * pi * ii * z));
}

} // namespace detail

/// Principal branch of log Gamma(z); accuracy ~1e-13 relative for |z| <= 50.
inline cx log_gamma(cx z) {
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x <= 0.0 && x == std::floor(x)) throw pole_error("log_gamma: pole at non-positive integer");
    }
    if (z.imag() < 0.0) return std::conj(log_gamma(std::conj(z)));
    if (z.real() >= 0.5) return detail::lanczos_log_gamma(z);
    return std::log(pi) - detail::log_sin_pi_upper(z) - detail::lanczos_log_gamma(1.0 - z);
}

namespace detail {

// Hurwitz zeta(s, a) for integer s >= 2 by Euler-Maclaurin.
inline double hurwitz_zeta_int(int s, double a) {
    static const double bern[8] = {1.0 / 6,   -1.0 / 30, 1.0 / 42,   -1.0 / 30,
                                   5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    int m = 0;
    while (a + m < 24.0) ++m;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += std::pow(a + k, -s);
    const double n = a + m;
    sum += std::pow(n, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(n, -static_cast<double>(s));
    double fac = s; // rising factorial s(s+1)...(s+2j-2) built incrementally
    double npow = std::pow(n, -static_cast<double>(s) - 1.0);
    double factorial = 2.0; // (2j)!
    for (int j = 1; j <= 8; ++j) {
        sum += bern[j - 1] * fac / factorial * npow;
        fac *= (s + 2 * j - 1.0) * (s + 2 * j);
        factorial *= (2 * j + 1.0) * (2 * j + 2.0);
        npow /= n * n;
    }
    return sum;
}

// log G(1+z) via the convergent product series with an analytic tail,
// for moderate |z| (any argument; N grows with |z|).
inline cx log_barnes_core(cx z) {
    const double az = std::abs(z);
    if (az == 0.0) return cx(0.0, 0.0);
    const int n_terms = std::max(48, static_cast<int>(std::ceil(8.0 * az)));
    cx sum = 0.5 * z * std::log(2.0 * pi) - 0.5 * z * (z + 1.0) - 0.5 * euler_gamma * z * z;
    for (int n = 1; n <= n_terms; ++n) {
        double dn = n;
        sum += dn * std::log(1.0 + z / dn) - z + z * z / (2.0 * dn);
    }
    // tail: sum_{n>N} [n log(1+z/n) - z + z^2/2n] = sum_{j>=3} (-1)^{j-1} z^j/j zeta(j-1, N+1)
    cx zp = z * z * z;
    double sign = 1.0;
    for (int j = 3; j <= 120; ++j) {
        cx term = sign * zp / static_cast<double>(j) * hurwitz_zeta_int(j - 1, n_terms + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
        zp *= z;
        sign = -sign;
    }
    return sum;
}

} // namespace detail

/// log G(1+z) for the Barnes function, principal branch, G(1)=1.
/// Shifted by G(1+z) = Gamma(z) G(z) until Re z lands in [-1/2, 1/2].
inline cx log_barnes_g1(cx z) {
    if (z.imag() == 0.0) {
        double x = z.real();
        if (x <= -1.0 && x == std::floor(x))
            return cx(-std::numeric_limits<double>::infinity(), 0.0); // G vanishes there
    }
    cx acc = 0.0;
    int guard = 0;
    while (z.real() > 0.5 && ++guard < 200) {
        z -= 1.0;
        acc += log_gamma(z + 1.0);
    }
    while (z.real() < -0.5 && ++guard < 200) {
        acc -= log_gamma(z + 1.0);
        z += 1.0;
    }
    return acc + detail::log_barnes_core(z);
}

/// log[G(offset+z) G(offset-z)] for offset 1 or 2; the paper's G(1,z), G(2,z).
/// Returns -inf (real part) when either factor sits on a zero of G, e.g. the
/// degenerate nu = -+1 case G(1,±1) = 0.
inline cx barnes_pair(cx z, int offset) {
    const cx u = static_cast<double>(offset - 1) + z;
    const cx v = static_cast<double>(offset - 1) - z;
    for (cx w : {u, v}) {
        if (std::abs(w.imag()) < 1e-13) {
            double r = std::round(w.real());
            if (r <= -1.0 && std::abs(w.real() - r) < 1e-13)
                return cx(-std::numeric_limits<double>::infinity(), 0.0);
        }
    }
    return log_barnes_g1(u) + log_barnes_g1(v);
}

} // namespace bethe
