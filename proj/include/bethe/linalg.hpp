#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "numeric.hpp"

namespace bethe {

struct ComplexMatrix {
    int n = 0;
    std::vector<cx> entries; // row-major

    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : n(dim), entries(static_cast<size_t>(dim) * dim) {}

    cx& operator()(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }
    const cx& operator()(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
};

namespace detail {

inline double pivot_mag(double x) { return std::abs(x); }
inline double pivot_mag(const cx& x) { return std::abs(x); }

template <class T>
struct LuFactors {
    int n = 0;
    std::vector<T> lu;    // row-major, L below diagonal, U on and above
    std::vector<int> piv; // row swapped with at step k
    bool odd_swaps = false;
};

template <class T>
LuFactors<T> lu_factor(int n, std::vector<T> a) {
    LuFactors<T> f;
    f.n = n;
    f.piv.resize(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = pivot_mag(a[static_cast<size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double m = pivot_mag(a[static_cast<size_t>(i) * n + k]);
            if (m > best) {
                best = m;
                p = i;
            }
        }
        if (best < 1e-300) throw singular_matrix_error("lu_factor: pivot magnitude below 1e-300");
        f.piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a[static_cast<size_t>(k) * n + j], a[static_cast<size_t>(p) * n + j]);
            f.odd_swaps = !f.odd_swaps;
        }
        const T pk = a[static_cast<size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            T m = a[static_cast<size_t>(i) * n + k] / pk;
            a[static_cast<size_t>(i) * n + k] = m;
            if (m != T{}) {
                const T* rk = a.data() + static_cast<size_t>(k) * n;
                T* ri = a.data() + static_cast<size_t>(i) * n;
                for (int j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
            }
        }
    }
    f.lu = std::move(a);
    return f;
}

template <class T>
void lu_solve_inplace(const LuFactors<T>& f, std::vector<T>& x) {
    const int n = f.n;
    for (int k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(x[k], x[f.piv[k]]);
    for (int i = 1; i < n; ++i) {
        T s = x[i];
        const T* ri = f.lu.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < i; ++j) s -= ri[j] * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        T s = x[i];
        const T* ri = f.lu.data() + static_cast<size_t>(i) * n;
        for (int j = i + 1; j < n; ++j) s -= ri[j] * x[j];
        x[i] = s / ri[i];
    }
}

// Principal-branch log of each pivot, summed; a row swap flips the sign of
// the determinant and contributes i*pi. The imaginary part of the sum may
// exceed pi.
inline cx log_pivot(const cx& p) { return std::log(p); }
inline cx log_pivot(double p) { return p >= 0.0 ? cx(std::log(p), 0.0) : cx(std::log(-p), pi); }

template <class T>
cx lu_log_det(const LuFactors<T>& f) {
    cx s = f.odd_swaps ? cx(0.0, pi) : cx(0.0, 0.0);
    for (int k = 0; k < f.n; ++k) s += log_pivot(f.lu[static_cast<size_t>(k) * f.n + k]);
    return s;
}

} // namespace detail

struct LuSolveDet {
    std::optional<std::vector<cx>> solution;
    cx log_det;
};

/// Dense LU with partial pivoting. Solves A x = rhs when rhs is given and
/// always returns log det(A) accumulated from the pivots.
inline LuSolveDet lu_solve_det(const ComplexMatrix& A, const std::vector<cx>* rhs = nullptr) {
    auto f = detail::lu_factor<cx>(A.n, A.entries);
    LuSolveDet r;
    r.log_det = detail::lu_log_det(f);
    if (rhs) {
        std::vector<cx> x = *rhs;
        detail::lu_solve_inplace(f, x);
        r.solution = std::move(x);
    }
    return r;
}

inline cx log_det(const ComplexMatrix& A) { return lu_solve_det(A).log_det; }

/// Real-matrix fast path used by the Nystrom solver.
inline std::vector<double> solve_dense(int n, std::vector<double> a, std::vector<double> b) {
    auto f = detail::lu_factor<double>(n, std::move(a));
    detail::lu_solve_inplace(f, b);
    return b;
}

} // namespace bethe
