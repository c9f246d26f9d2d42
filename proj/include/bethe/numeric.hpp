#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bethe {

using cx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
// Euler-Mascheroni constant, 30 digits
inline constexpr double euler_gamma = 0.577215664901532860606512090082;

inline constexpr cx ii{0.0, 1.0};

struct singular_matrix_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_bracket_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct pole_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct no_fermi_sea_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct on_cut_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sqr(double x) { return x * x; }
inline cx sqr(cx z) { return z * z; }

} // namespace bethe
