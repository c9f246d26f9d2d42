#pragma once

#include <cmath>
#include <stdexcept>

#include "numeric.hpp"

namespace bethe {

enum class Model { XXZ, LiebLiniger };

/// Parameter bundle for the two models: XXZ(zeta, h) in the disordered
/// regime (Delta = cos zeta, 0 < zeta < pi) or Lieb-Liniger(c, h).
struct ModelSpec {
    Model variant = Model::XXZ;
    double zeta = 0.0; // XXZ anisotropy angle
    double h = 0.0;    // magnetic field / chemical potential
    double c = 0.0;    // LL coupling

    static ModelSpec xxz(double zeta, double h) {
        if (!(zeta > 0.0 && zeta < pi)) throw std::invalid_argument("ModelSpec: need 0 < zeta < pi");
        if (!(h > 0.0)) throw std::invalid_argument("ModelSpec: need h > 0");
        ModelSpec m;
        m.variant = Model::XXZ;
        m.zeta = zeta;
        m.h = h;
        return m;
    }
    static ModelSpec lieb_liniger(double c, double h) {
        if (!(c > 0.0)) throw std::invalid_argument("ModelSpec: need c > 0");
        if (!(h > 0.0)) throw std::invalid_argument("ModelSpec: need h > 0");
        ModelSpec m;
        m.variant = Model::LiebLiniger;
        m.c = c;
        m.h = h;
        return m;
    }

    /// Half-width of the analyticity strip of the kernel around the real axis.
    double strip() const { return variant == Model::XXZ ? std::min(zeta, pi - zeta) : c; }
};

/// Sign of the integral operator in the dressing equations:
/// XXZ solves f + K*f/2pi = rhs, Lieb-Liniger solves f - K*f/2pi = rhs.
inline double kernel_sign(const ModelSpec& m) { return m.variant == Model::XXZ ? +1.0 : -1.0; }

inline cx kernel_K(const ModelSpec& m, cx lam) {
    if (m.variant == Model::XXZ) {
        cx d = std::sinh(lam + ii * m.zeta) * std::sinh(lam - ii * m.zeta);
        if (std::abs(d) < 1e-280) throw pole_error("kernel_K: pole at lambda = +-i zeta (mod i pi)");
        return std::sin(2.0 * m.zeta) / d;
    }
    cx d = lam * lam + m.c * m.c;
    if (std::abs(d) < 1e-280) throw pole_error("kernel_K: pole at lambda = +-i c");
    return 2.0 * m.c / d;
}

inline double kernel_K_real(const ModelSpec& m, double lam) {
    if (m.variant == Model::XXZ) {
        double s = std::sinh(lam);
        return std::sin(2.0 * m.zeta) / (s * s + sqr(std::sin(m.zeta)));
    }
    return 2.0 * m.c / (lam * lam + m.c * m.c);
}

/// Bare momentum, continuous on the real line with p0(0) = 0.
inline double bare_momentum(const ModelSpec& m, double lam) {
    if (m.variant == Model::LiebLiniger) return lam;
    // phase of sinh(i zeta/2 - lam) minus phase of sinh(i zeta/2 + lam);
    // both arguments stay in the upper half plane, so atan2 is jump-free.
    double a = std::sin(0.5 * m.zeta) * std::cosh(lam);
    double b = std::cos(0.5 * m.zeta) * std::sinh(lam);
    return std::atan2(a, -b) - std::atan2(a, b);
}

inline cx bare_momentum_deriv(const ModelSpec& m, cx lam) {
    if (m.variant == Model::LiebLiniger) return 1.0;
    cx d = std::sinh(lam + 0.5 * ii * m.zeta) * std::sinh(lam - 0.5 * ii * m.zeta);
    if (std::abs(d) < 1e-280) throw pole_error("bare_momentum_deriv: pole at lambda = +-i zeta/2 (mod i pi)");
    return std::sin(m.zeta) / d;
}

inline double bare_momentum_deriv_real(const ModelSpec& m, double lam) {
    if (m.variant == Model::LiebLiniger) return 1.0;
    double s = std::sinh(lam);
    return std::sin(m.zeta) / (s * s + sqr(std::sin(0.5 * m.zeta)));
}

/// K_kappa(lambda) = coth(lambda + i zeta) - kappa coth(lambda - i zeta)
/// (rational version for Lieb-Liniger). At kappa = 1 it equals -i K(lambda).
inline cx kernel_K_kappa(const ModelSpec& m, cx lam, cx kappa) {
    if (m.variant == Model::XXZ)
        return 1.0 / std::tanh(lam + ii * m.zeta) - kappa / std::tanh(lam - ii * m.zeta);
    return 1.0 / (lam + ii * m.c) - kappa / (lam - ii * m.c);
}

} // namespace bethe
