#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "fredholm.hpp"
#include "linalg.hpp"
#include "sine_kernel.hpp"
#include "specfun.hpp"
#include "thermo.hpp"

namespace bethe {

// ---------------------------------------------------------------------------
// cycle expansion of a determinant
// ---------------------------------------------------------------------------

namespace detail {

// all multiplicity vectors {l_1..l_n} with sum k*l_k = n
inline void partition_configs_rec(int remaining, int maxpart, std::vector<int>& mult,
                                  std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(mult);
        return;
    }
    for (int s = std::min(maxpart, remaining); s >= 1; --s) {
        mult[s - 1] += 1;
        partition_configs_rec(remaining - s, s, mult, out);
        mult[s - 1] -= 1;
    }
}

inline std::vector<std::vector<int>> partition_configs(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> mult(n, 0);
    partition_configs_rec(n, n, mult, out);
    return out;
}

inline ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            cx aik = a(i, k);
            if (aik == cx{}) continue;
            for (int j = 0; j < a.n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline cx mat_trace(const ComplexMatrix& a) {
    cx t{};
    for (int i = 0; i < a.n; ++i) t += a(i, i);
    return t;
}

} // namespace detail

inline int cycle_partition_count(int n) {
    return static_cast<int>(detail::partition_configs(n).size());
}

/// | det A - sum_{l} C(n|{l}) prod_s tr(A^s)^{l_s} | / |det A| with
/// C(n|{l}) = prod_s (1/l_s!) ((-1)^{s+1}/s)^{l_s}.
inline double cycle_expansion_check(const ComplexMatrix& A) {
    const int n = A.n;
    if (n > 8) throw std::invalid_argument("cycle_expansion_check: n <= 8");
    std::vector<cx> traces(n + 1); // traces[s] = tr(A^s)
    ComplexMatrix p = A;
    traces[1] = detail::mat_trace(p);
    for (int s = 2; s <= n; ++s) {
        p = detail::mat_mul(p, A);
        traces[s] = detail::mat_trace(p);
    }
    cx sum{};
    for (const auto& mult : detail::partition_configs(n)) {
        cx term = 1.0;
        for (int s = 1; s <= n; ++s) {
            int ls = mult[s - 1];
            if (ls == 0) continue;
            cx base = ((s % 2 == 1) ? 1.0 : -1.0) / static_cast<double>(s);
            double fact = 1.0;
            for (int k = 2; k <= ls; ++k) fact *= k;
            cx powered = 1.0;
            for (int k = 0; k < ls; ++k) powered *= base * traces[s];
            term *= powered / fact;
        }
        sum += term;
    }
    cx det = std::exp(log_det(A));
    return std::abs(det - sum) / std::abs(det);
}

// ---------------------------------------------------------------------------
// Lagrange series, scalar case
// ---------------------------------------------------------------------------

/// Truncated sum_{n<=trunc} n^n t^n / n! against 1/(1-T), T = t e^T.
inline double lagrange_scalar_check(double t, int truncation) {
    double T = t;
    for (int it = 0; it < 500; ++it) {
        double next = t * std::exp(T);
        if (std::abs(next - T) < 1e-16) {
            T = next;
            break;
        }
        T = next;
        if (!std::isfinite(T) || std::abs(T) > 1.0)
            throw convergence_error("lagrange_scalar_check: fixed point iteration diverged");
    }
    double closed = 1.0 / (1.0 - T);
    double sum = 1.0; // n = 0 term
    for (int n = 1; n <= truncation; ++n) {
        double lg = n * std::log(static_cast<double>(n)) + n * std::log(t) - std::lgamma(n + 1.0);
        sum += std::exp(lg);
    }
    return std::abs(sum - closed) / std::abs(closed);
}

// ---------------------------------------------------------------------------
// Lagrange series, matrix case (small N, bivariate used for N = 2)
// ---------------------------------------------------------------------------

namespace detail {

// dense polynomial in N variables truncated by total degree; only N = 2 is
// instantiated (the desk-scale matrix check)
struct Poly2 {
    int deg = 0;
    std::vector<double> c; // c[i*(deg+1)+j] coeff of x^i y^j, i+j <= deg

    explicit Poly2(int d) : deg(d), c(static_cast<size_t>(d + 1) * (d + 1), 0.0) {}
    double& at(int i, int j) { return c[static_cast<size_t>(i) * (deg + 1) + j]; }
    double get(int i, int j) const { return c[static_cast<size_t>(i) * (deg + 1) + j]; }
};

inline Poly2 poly2_mul(const Poly2& a, const Poly2& b) {
    Poly2 r(a.deg);
    for (int i = 0; i <= a.deg; ++i)
        for (int j = 0; i + j <= a.deg; ++j) {
            double av = a.get(i, j);
            if (av == 0.0) continue;
            for (int k = 0; i + j + k <= a.deg; ++k)
                for (int l = 0; i + j + k + l <= a.deg; ++l) {
                    double bv = b.get(k, l);
                    if (bv != 0.0) r.at(i + k, j + l) += av * bv;
                }
        }
    return r;
}

// f(L) for a linear form L and Taylor coefficients of f, by Horner
inline Poly2 poly2_compose(const std::vector<double>& taylor, const Poly2& lin) {
    Poly2 r(lin.deg);
    int top = static_cast<int>(taylor.size()) - 1;
    r.at(0, 0) = taylor[top];
    for (int k = top - 1; k >= 0; --k) {
        r = poly2_mul(r, lin);
        r.at(0, 0) += taylor[k];
    }
    return r;
}

} // namespace detail

struct LagrangeMatrixSpec {
    std::vector<double> mu;                     // the two points
    std::vector<double> f_taylor;               // Taylor of f at 0
    std::function<double(double)> f, fd;        // f and f' for the fixed point
    std::function<double(double, double)> theta;
    std::function<double(double)> g1;           // weight of the first moment
    std::vector<double> F_taylor;               // Taylor of F applied to the moment
    std::function<double(double)> F;
    int truncation = 12;
};

/// Truncated multi-index series sum_{s1+s2<=S} [eps^s](phi1^{s1} phi2^{s2} F)
/// against F({z}) / det_2 S at the fixed point z_j = f(sum_a z_a theta_aj).
inline double lagrange_matrix_check(const LagrangeMatrixSpec& p) {
    if (p.mu.size() != 2) throw std::invalid_argument("lagrange_matrix_check: N = 2 expected");
    const int S = p.truncation;
    using detail::Poly2;
    // linear forms L_j = sum_a eps_a theta(mu_a, mu_j), moment = sum_a g1(mu_a) eps_a
    Poly2 L1(S), L2(S), Y(S);
    L1.at(1, 0) = p.theta(p.mu[0], p.mu[0]);
    L1.at(0, 1) = p.theta(p.mu[1], p.mu[0]);
    L2.at(1, 0) = p.theta(p.mu[0], p.mu[1]);
    L2.at(0, 1) = p.theta(p.mu[1], p.mu[1]);
    Y.at(1, 0) = p.g1(p.mu[0]);
    Y.at(0, 1) = p.g1(p.mu[1]);
    Poly2 phi1 = detail::poly2_compose(p.f_taylor, L1);
    Poly2 phi2 = detail::poly2_compose(p.f_taylor, L2);
    Poly2 FY = detail::poly2_compose(p.F_taylor, Y);

    // powers of phi1 built incrementally; series term = coeff of eps1^s1 eps2^s2
    double series = 0.0;
    Poly2 pow1(S);
    pow1.at(0, 0) = 1.0;
    for (int s1 = 0; s1 <= S; ++s1) {
        Poly2 prod = detail::poly2_mul(pow1, FY);
        Poly2 cur = prod;
        for (int s2 = 0; s1 + s2 <= S; ++s2) {
            series += cur.get(s1, s2);
            if (s1 + s2 < S) cur = detail::poly2_mul(cur, phi2);
        }
        if (s1 < S) pow1 = detail::poly2_mul(pow1, phi1);
    }

    // fixed point, damped
    double z1 = p.f(0.0), z2 = p.f(0.0);
    bool ok = false;
    for (int it = 0; it < 500; ++it) {
        double a1 = z1 * p.theta(p.mu[0], p.mu[0]) + z2 * p.theta(p.mu[1], p.mu[0]);
        double a2 = z1 * p.theta(p.mu[0], p.mu[1]) + z2 * p.theta(p.mu[1], p.mu[1]);
        double n1 = 0.5 * z1 + 0.5 * p.f(a1);
        double n2 = 0.5 * z2 + 0.5 * p.f(a2);
        if (std::abs(n1 - z1) + std::abs(n2 - z2) < 1e-15) {
            z1 = n1;
            z2 = n2;
            ok = true;
            break;
        }
        z1 = n1;
        z2 = n2;
    }
    if (!ok) throw convergence_error("lagrange_matrix_check: fixed point iteration did not contract");
    double a1 = z1 * p.theta(p.mu[0], p.mu[0]) + z2 * p.theta(p.mu[1], p.mu[0]);
    double a2 = z1 * p.theta(p.mu[0], p.mu[1]) + z2 * p.theta(p.mu[1], p.mu[1]);
    double s11 = 1.0 - p.theta(p.mu[0], p.mu[0]) * p.fd(a1);
    double s12 = -p.theta(p.mu[1], p.mu[0]) * p.fd(a1);
    double s21 = -p.theta(p.mu[0], p.mu[1]) * p.fd(a2);
    double s22 = 1.0 - p.theta(p.mu[1], p.mu[1]) * p.fd(a2);
    double det = s11 * s22 - s12 * s21;
    double closed = p.F(p.g1(p.mu[0]) * z1 + p.g1(p.mu[1]) * z2) / det;
    return std::abs(series - closed) / std::abs(closed);
}

// ---------------------------------------------------------------------------
// Lagrange series, continuous case (and multiple series of multiple integrals)
// ---------------------------------------------------------------------------

namespace detail {

struct Series {
    std::vector<double> c;
    explicit Series(int order = 0) : c(order + 1, 0.0) {}
    int order() const { return static_cast<int>(c.size()) - 1; }
};

inline Series series_add(const Series& a, const Series& b) {
    Series r(a.order());
    for (int k = 0; k <= a.order(); ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
}

inline void series_axpy(Series& acc, double s, const Series& a) {
    for (int k = 0; k <= acc.order(); ++k) acc.c[k] += s * a.c[k];
}

inline Series series_mul(const Series& a, const Series& b) {
    Series r(a.order());
    for (int i = 0; i <= a.order(); ++i) {
        if (a.c[i] == 0.0) continue;
        for (int j = 0; i + j <= a.order(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}

// multiply by u and scale
inline Series series_shift_scale(const Series& a, double s) {
    Series r(a.order());
    for (int k = 0; k + 1 <= a.order(); ++k) r.c[k + 1] = s * a.c[k];
    return r;
}

// f(X) for X with zero constant term, f given by Taylor coefficients
inline Series series_compose(const std::vector<double>& taylor, const Series& x) {
    Series r(x.order());
    int top = static_cast<int>(taylor.size()) - 1;
    r.c[0] = taylor[top];
    for (int k = top - 1; k >= 0; --k) {
        r = series_mul(r, x);
        r.c[0] += taylor[k];
    }
    return r;
}

// exp(A) for A with zero constant term: E' = A' E
inline Series series_exp(const Series& a) {
    Series e(a.order());
    e.c[0] = 1.0;
    for (int k = 1; k <= a.order(); ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
        e.c[k] = s / k;
    }
    return e;
}

inline std::vector<double> taylor_derivative(const std::vector<double>& t) {
    std::vector<double> d;
    for (size_t k = 1; k < t.size(); ++k) d.push_back(k * t[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

} // namespace detail

/// One or several species of driving functions f_s; the continuous check uses
/// one species, the multi-series check several with a common theta.
struct LagrangeContinuousSpec {
    double q = 1.0;
    int n_nodes = 48;
    int truncation = 20;
    int rhs_nodes = 0; // 0 -> 2 n_nodes, the independent Picard grid
    std::vector<std::vector<double>> f_taylor; // one Taylor table per species
    std::function<double(double)> f_sum;       // f_Sigma for the Picard side
    std::function<double(double)> f_sum_d;     // its derivative
    std::function<double(double, double)> theta;
    std::function<double(double)> g1;
    std::vector<double> F_taylor;
    std::function<double(double)> F;
};

/// Truncated series of multiple integrals (tree/cycle summation on a
/// quadrature lattice) against F on the Picard solution of the nonlinear
/// integral equation divided by the Fredholm-Jacobian determinant.
inline double lagrange_continuous_check(const LagrangeContinuousSpec& p) {
    using detail::Series;
    const int S = p.truncation;
    const int N = p.n_nodes;
    const int nsp = static_cast<int>(p.f_taylor.size());
    Grid g = gauss_legendre(N, -p.q, p.q);
    std::vector<double> th(static_cast<size_t>(N) * N);
    for (int a = 0; a < N; ++a)
        for (int j = 0; j < N; ++j) th[static_cast<size_t>(a) * N + j] = p.theta(g.nodes[a], g.nodes[j]);

    std::vector<double> fsum_taylor(p.f_taylor[0].size(), 0.0);
    for (const auto& t : p.f_taylor)
        for (size_t k = 0; k < t.size(); ++k) fsum_taylor[k] += t[k];
    std::vector<double> fsum_d_taylor = detail::taylor_derivative(fsum_taylor);

    // species tree series T^{(s)}_j(u) = u w_j f_s(S_j(u)),
    // S_j(u) = sum_a theta(mu_a, mu_j) sum_s T^{(s)}_a(u)
    std::vector<std::vector<Series>> T(nsp, std::vector<Series>(N, Series(S)));
    std::vector<Series> Ssum(N, Series(S));
    for (int sweep = 0; sweep <= S; ++sweep) {
        for (int j = 0; j < N; ++j) {
            Series acc(S);
            for (int a = 0; a < N; ++a) {
                double w = th[static_cast<size_t>(a) * N + j];
                if (w == 0.0) continue;
                for (int s = 0; s < nsp; ++s) detail::series_axpy(acc, w, T[s][a]);
            }
            Ssum[j] = acc;
        }
        for (int s = 0; s < nsp; ++s)
            for (int j = 0; j < N; ++j)
                T[s][j] = detail::series_shift_scale(detail::series_compose(p.f_taylor[s], Ssum[j]),
                                                     g.weights[j]);
    }
    for (int j = 0; j < N; ++j) {
        Series acc(S);
        for (int a = 0; a < N; ++a) {
            double w = th[static_cast<size_t>(a) * N + j];
            if (w == 0.0) continue;
            for (int s = 0; s < nsp; ++s) detail::series_axpy(acc, w, T[s][a]);
        }
        Ssum[j] = acc;
    }

    // forest part: F( sum_a g1(mu_a) sum_s T^{(s)}_a )
    Series y(S);
    for (int a = 0; a < N; ++a)
        for (int s = 0; s < nsp; ++s) detail::series_axpy(y, p.g1(g.nodes[a]), T[s][a]);
    Series forest = detail::series_compose(p.F_taylor, y);

    // cycle part: M[a][j] = theta(mu_a, mu_j) u w_j f_Sigma'(S_j(u)),
    // contributes exp(sum_l tr(M^l)/l)
    std::vector<Series> col(N, Series(S));
    for (int j = 0; j < N; ++j)
        col[j] = detail::series_shift_scale(detail::series_compose(fsum_d_taylor, Ssum[j]), g.weights[j]);
    std::vector<Series> M(static_cast<size_t>(N) * N, Series(S));
    for (int a = 0; a < N; ++a)
        for (int j = 0; j < N; ++j) {
            Series m = col[j];
            for (double& ck : m.c) ck *= th[static_cast<size_t>(a) * N + j];
            M[static_cast<size_t>(a) * N + j] = m;
        }
    Series trlog(S);
    std::vector<Series> P = M;
    for (int l = 1; l <= S; ++l) {
        Series tr(S);
        for (int a = 0; a < N; ++a) detail::series_axpy(tr, 1.0, P[static_cast<size_t>(a) * N + a]);
        for (int k = 0; k <= S; ++k) trlog.c[k] += tr.c[k] / l;
        if (l == S) break;
        // P <- P * M
        std::vector<Series> Q(static_cast<size_t>(N) * N, Series(S));
        for (int a = 0; a < N; ++a)
            for (int k = 0; k < N; ++k) {
                const Series& pak = P[static_cast<size_t>(a) * N + k];
                bool zero = true;
                for (double v : pak.c)
                    if (v != 0.0) {
                        zero = false;
                        break;
                    }
                if (zero) continue;
                for (int j = 0; j < N; ++j) {
                    Series prod = detail::series_mul(pak, M[static_cast<size_t>(k) * N + j]);
                    detail::series_axpy(Q[static_cast<size_t>(a) * N + j], 1.0, prod);
                }
            }
        P = std::move(Q);
    }
    Series total = detail::series_mul(forest, detail::series_exp(trlog));
    double lhs = 0.0;
    for (double ck : total.c) lhs += ck;

    // closed form on the independent grid: damped Picard, then the
    // Fredholm-Jacobian determinant
    const int nr = p.rhs_nodes > 0 ? p.rhs_nodes : 2 * N;
    Grid gr = gauss_legendre(nr, -p.q, p.q);
    std::vector<double> z(nr, p.f_sum(0.0));
    bool ok = false;
    for (int it = 0; it < 300; ++it) {
        double delta = 0.0;
        std::vector<double> nz(nr);
        for (int i = 0; i < nr; ++i) {
            double arg = 0.0;
            for (int j = 0; j < nr; ++j) arg += gr.weights[j] * p.theta(gr.nodes[j], gr.nodes[i]) * z[j];
            nz[i] = 0.5 * z[i] + 0.5 * p.f_sum(arg);
            delta = std::max(delta, std::abs(nz[i] - z[i]));
        }
        z = std::move(nz);
        if (delta < 1e-14) {
            ok = true;
            break;
        }
    }
    if (!ok) throw convergence_error("lagrange_continuous_check: Picard iteration did not reach 1e-14");
    auto arg_at = [&](double lam) {
        double s = 0.0;
        for (int j = 0; j < nr; ++j) s += gr.weights[j] * p.theta(gr.nodes[j], lam) * z[j];
        return s;
    };
    double moment = 0.0;
    for (int i = 0; i < nr; ++i) moment += gr.weights[i] * p.g1(gr.nodes[i]) * z[i];
    auto kern = [&](double lam, double mu) -> cx {
        return -p.theta(mu, lam) * p.f_sum_d(arg_at(lam));
    };
    double ld = det_interval(kern, gr).log_det.real();
    double rhs = p.F(moment) / std::exp(ld);
    return std::abs(lhs - rhs) / std::max(1e-300, std::abs(rhs));
}

// ---------------------------------------------------------------------------
// finite-N determinant vs contour Fredholm determinant
// ---------------------------------------------------------------------------

/// Arbitrary (non-Bethe) data for the determinant equivalence checks.
struct FiniteBetheData {
    double zeta = pi / 3;
    cx kappa{0.7, 0.0};
    cx theta{};
    std::vector<double> lambdas;
    std::vector<cx> zs;
};

namespace detail {

inline cx kk(const FiniteBetheData& d, cx lam) {
    return 1.0 / std::tanh(lam + ii * d.zeta) - d.kappa / std::tanh(lam - ii * d.zeta);
}

inline cx v_pm(const FiniteBetheData& d, cx mu, int sgn) {
    cx prod = 1.0;
    const cx sh = static_cast<double>(sgn) * ii * d.zeta;
    for (size_t a = 0; a < d.lambdas.size(); ++a)
        prod *= std::sinh(mu - d.lambdas[a] + sh) / std::sinh(mu - d.zs[a] + sh);
    return prod;
}

} // namespace detail

/// det_N[delta_jk + U^(lambda)_jk(theta)] from the finite-size entries.
inline cx det_finite_U_lambda(const FiniteBetheData& d) {
    const int n = static_cast<int>(d.lambdas.size());
    ComplexMatrix m(n);
    for (int j = 0; j < n; ++j) {
        cx pref = 1.0;
        for (int a = 0; a < n; ++a) {
            pref *= std::sinh(d.zs[a] - d.lambdas[j]);
            if (a != j) pref /= std::sinh(d.lambdas[a] - d.lambdas[j]);
        }
        cx den = 1.0 / detail::v_pm(d, d.lambdas[j], +1) - d.kappa / detail::v_pm(d, d.lambdas[j], -1);
        for (int k = 0; k < n; ++k) {
            cx u = pref * (detail::kk(d, d.lambdas[j] - d.lambdas[k]) - detail::kk(d, d.theta - d.lambdas[k])) / den;
            m(j, k) = (j == k ? 1.0 : 0.0) + u;
        }
    }
    return std::exp(log_det(m));
}

/// det_N[delta_jk + U^(z)_jk(theta)] from the finite-size entries.
inline cx det_finite_U_z(const FiniteBetheData& d) {
    const int n = static_cast<int>(d.lambdas.size());
    ComplexMatrix m(n);
    std::vector<cx> colpref(n), colden(n);
    for (int k = 0; k < n; ++k) {
        cx pref = 1.0;
        for (int a = 0; a < n; ++a) {
            pref *= std::sinh(d.zs[k] - d.lambdas[a]);
            if (a != k) pref /= std::sinh(d.zs[k] - d.zs[a]);
        }
        colpref[k] = pref;
        colden[k] = detail::v_pm(d, d.zs[k], -1) - d.kappa * detail::v_pm(d, d.zs[k], +1);
    }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            cx u = colpref[k] * (detail::kk(d, d.zs[j] - d.zs[k]) - detail::kk(d, d.zs[j] - d.theta)) / colden[k];
            m(j, k) = (j == k ? 1.0 : 0.0) + u;
        }
    return std::exp(log_det(m));
}

/// Contour determinant of the hat-kernel of the same family.
inline cx det_contour_U_hat(const FiniteBetheData& d, const Contour& c, bool z_family) {
    auto kernel = [&](cx w, cx wp) -> cx {
        if (!z_family) {
            cx prod = 1.0;
            for (size_t a = 0; a < d.lambdas.size(); ++a)
                prod *= std::sinh(w - d.zs[a]) / std::sinh(w - d.lambdas[a]);
            cx den = 1.0 / detail::v_pm(d, w, +1) - d.kappa / detail::v_pm(d, w, -1);
            return -prod * (detail::kk(d, w - wp) - detail::kk(d, d.theta - wp)) / den;
        }
        cx prod = 1.0;
        for (size_t a = 0; a < d.lambdas.size(); ++a)
            prod *= std::sinh(wp - d.lambdas[a]) / std::sinh(wp - d.zs[a]);
        cx den = detail::v_pm(d, wp, -1) - d.kappa * detail::v_pm(d, wp, +1);
        return prod * (detail::kk(d, w - wp) - detail::kk(d, w - d.theta)) / den;
    };
    return std::exp(detail::contour_log_det(kernel, c));
}

/// Relative difference between the finite-N determinant and the contour one.
inline double fredholm_equiv_check(const FiniteBetheData& d, const Contour& c, bool z_family = false) {
    cx fin = z_family ? det_finite_U_z(d) : det_finite_U_lambda(d);
    cx con = det_contour_U_hat(d, c, z_family);
    return std::abs(fin - con) / std::abs(fin);
}

/// Number of zeros of V_-(w) - kappa V_+(w) inside the contour, by the
/// argument principle (phase tracking along the nodes). The determinant
/// equivalence requires zero: the kappa-twisted roots must stay outside.
inline int twisted_root_count(const FiniteBetheData& d, const Contour& c) {
    double total = 0.0;
    cx prev = detail::v_pm(d, c.nodes[0], -1) - d.kappa * detail::v_pm(d, c.nodes[0], +1);
    for (int k = 1; k <= c.size(); ++k) {
        cx cur = detail::v_pm(d, c.nodes[k % c.size()], -1) -
                 d.kappa * detail::v_pm(d, c.nodes[k % c.size()], +1);
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

/// Draw lambdas in (-0.45, 0.45) and zs strictly inside the contour, until
/// the analyticity precondition holds (every pole enclosed, no twisted root
/// inside).
inline FiniteBetheData draw_finite_data(std::mt19937_64& rng, int n, double zeta, cx kappa, cx theta,
                                        const Contour& c) {
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        FiniteBetheData d;
        d.zeta = zeta;
        d.kappa = kappa;
        d.theta = theta;
        bool enclosed = true;
        for (int a = 0; a < n; ++a) {
            d.lambdas.push_back(0.45 * ur(rng));
            d.zs.push_back(cx(0.45 * ur(rng), c.d * (0.25 * ur(rng) + 0.45)));
            enclosed = enclosed && c.winding_residual(d.zs.back()) < 1e-6 &&
                       c.winding_residual(cx(d.lambdas.back(), 0.0)) < 1e-6;
        }
        if (enclosed && twisted_root_count(d, c) == 0) return d;
    }
    throw convergence_error("draw_finite_data: no admissible configuration found");
}

/// Theta independence of det_N[delta + U^(lambda)(theta)] / (V+^{-1} - k V-^{-1}).
inline double theta_comb_check(const FiniteBetheData& d, cx theta_b) {
    auto ratio = [&](cx th) {
        FiniteBetheData e = d;
        e.theta = th;
        cx den = 1.0 / detail::v_pm(d, th, +1) - d.kappa / detail::v_pm(d, th, -1);
        return det_finite_U_lambda(e) / den;
    };
    cx r1 = ratio(d.theta), r2 = ratio(theta_b);
    return std::abs(r1 - r2) / std::abs(r1);
}

// ---------------------------------------------------------------------------
// free-fermion suite and top-level report
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckResult> items;

    void add(const std::string& name, double residual, double tol) {
        items.push_back({name, residual, tol, residual < tol});
    }
    void merge(const CheckReport& other) {
        items.insert(items.end(), other.items.begin(), other.items.end());
    }
    bool all_pass() const {
        for (const auto& i : items)
            if (!i.pass) return false;
        return true;
    }
};

/// Closed-form free-fermion determinant of Appendix-B type, lambda family.
inline cx ff_closed_form_det(const FiniteBetheData& d, bool z_family) {
    const int n = static_cast<int>(d.lambdas.size());
    cx pref = 1.0;
    for (int a = 0; a < n; ++a) {
        cx num = std::cosh(d.theta - d.zs[a]);
        cx den = std::cosh(d.theta - d.lambdas[a]);
        pref *= z_family ? den / num : num / den;
    }
    cx val = pref;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < a; ++b)
            val *= std::cosh(d.zs[a] - d.zs[b]) * std::cosh(d.lambdas[a] - d.lambdas[b]);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) val /= std::cosh(d.zs[a] - d.lambdas[b]);
    return val;
}

/// Every Appendix-B style assertion at zeta = pi/2, field h in (0,4).
inline CheckReport free_fermion_suite(double h, int n = 128, int contour_nodes = 256,
                                      std::mt19937_64* rng = nullptr) {
    CheckReport rep;
    ModelSpec m = ModelSpec::xxz(pi / 2, h);
    ThermoSolution th = dressed_quantities(m, n);
    const double q_exact = 0.5 * std::acosh(4.0 / h);

    rep.add("freefermion.q_closed_form", std::abs(th.q - q_exact), 1e-8);
    double zmax = 0.0, rmax = 0.0;
    for (int i = 0; i < th.grid.size(); ++i) {
        zmax = std::max(zmax, std::abs(th.Z[i] - 1.0));
        rmax = std::max(rmax, std::abs(th.rho[i] - 1.0 / (pi * std::cosh(2.0 * th.grid.nodes[i]))));
    }
    rep.add("freefermion.Z_identity", zmax, 1e-10);
    rep.add("freefermion.rho_closed_form", rmax, 1e-10);
    rep.add("freefermion.pF_closed_form", std::abs(th.p_F - std::atan(std::sinh(2.0 * th.q))), 1e-8);
    rep.add("freefermion.D_equals_pF_over_pi", std::abs(th.D - th.p_F / pi), 1e-10);
    rep.add("freefermion.sin_pF", std::abs(std::sin(th.p_F) - std::tanh(2.0 * th.q)), 1e-8);

    rep.add("freefermion.C1_zero", std::abs(const_C1(th)), 1e-8);
    const double c0 = const_C0(th);
    cx delta = cauchy_z_tilde(th, th.q - ii * pi / 2.0) - cauchy_z_tilde(th, -th.q - ii * pi / 2.0);
    rep.add("freefermion.C0_relation", std::abs(2.0 * pi * ii * delta - c0), 1e-8);

    Contour c = Contour::ellipse(th.q, m.strip() / 4.0, contour_nodes);
    rep.add("freefermion.detU_equals_1", std::abs(std::exp(log_det_U_ff(th, c)) - 1.0), 1e-8);

    AsymptoticExpansion e = szsz_leading(th, c);
    rep.add("freefermion.osc_coefficient", std::abs(e.osc_amp - 2.0 / (pi * pi)), 1e-6);

    // finite determinants against the closed Cauchy-type forms, random data
    std::mt19937_64 local(12345);
    std::mt19937_64& gen = rng ? *rng : local;
    std::uniform_real_distribution<double> ur(-0.45, 0.45);
    for (int nn : {2, 3}) {
        FiniteBetheData d;
        d.zeta = pi / 2;
        d.kappa = cx(0.6, 0.1);
        d.theta = cx(0.07, 0.11);
        for (int a = 0; a < nn; ++a) {
            d.lambdas.push_back(ur(gen));
            d.zs.push_back(cx(ur(gen), 0.3 * ur(gen) + 0.17));
        }
        double r1 = std::abs(det_finite_U_lambda(d) - ff_closed_form_det(d, false)) /
                    std::abs(ff_closed_form_det(d, false));
        double r2 = std::abs(det_finite_U_z(d) - ff_closed_form_det(d, true)) /
                    std::abs(ff_closed_form_det(d, true));
        rep.add("freefermion.finite_det_lambda_N" + std::to_string(nn), r1, 1e-10);
        rep.add("freefermion.finite_det_z_N" + std::to_string(nn), r2, 1e-10);
    }

    // generating function: exact determinant against the asymptotic sum
    {
        const double beta = 0.2;
        const int mdist = 256;
        GskProblem gp;
        gp.q = th.q;
        gp.m = mdist;
        gp.gamma = std::exp(beta) - 1.0;
        gp.p0 = [m](double x) { return bare_momentum(m, x); };
        gp.p0d = [m](cx x) { return bare_momentum_deriv(m, x); };
        gp.F = [](double) { return cx(1.0, 0.0); };
        gp.Fd = [](double) { return cx(0.0, 0.0); };
        int nodes = std::max(256, static_cast<int>(0.75 * mdist * (bare_momentum(m, th.q) * 2.0)) + 128);
        cx exact = std::exp(exact_gsk_logdet(gp, nodes));
        cx asym = generating_fn_full(th, c, cx(beta, 0.0), mdist);
        rep.add("freefermion.generating_exact_vs_asymptotic", std::abs(exact - asym) / std::abs(exact), 1e-6);
    }
    return rep;
}

/// The U^{(lambda)}_{theta} kernel of the generating-function analysis as a
/// pointwise-evaluable function (for the theta-independence identity).
inline std::function<cx(cx, cx)> u_lambda_kernel(const ThermoSolution& th, cx beta, cx theta) {
    return [&th, beta, theta](cx w, cx wp) -> cx {
        const cx s = kernel_shift(th.model);
        const cx kappa = std::exp(beta);
        cx num = std::exp(beta * cauchy_z_tilde(th, w));
        cx den = std::exp(beta * cauchy_z_tilde(th, w + s)) -
                 std::exp(beta + beta * cauchy_z_tilde(th, w - s));
        return -num * (kernel_K_kappa(th.model, w - wp, kappa) - kernel_K_kappa(th.model, theta - wp, kappa)) / den;
    };
}

inline CheckReport cycle_suite(std::mt19937_64& rng, int matrices = 100) {
    CheckReport rep;
    for (int n = 1; n <= 8; ++n) {
        static const int pn[9] = {1, 1, 2, 3, 5, 7, 11, 15, 22};
        rep.add("cycle.partition_count_n" + std::to_string(n),
                std::abs(cycle_partition_count(n) - pn[n]), 0.5);
    }
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    std::uniform_int_distribution<int> un(2, 6);
    double worst = 0.0;
    for (int t = 0; t < matrices; ++t) {
        int n = un(rng);
        ComplexMatrix a(n);
        for (cx& e : a.entries) e = cx(ur(rng), ur(rng));
        worst = std::max(worst, cycle_expansion_check(a));
    }
    rep.add("cycle.random_matrices_worst", worst, 1e-11);
    {
        ComplexMatrix a(2);
        a(0, 0) = cx(1.2, 0.3);
        a(0, 1) = cx(-0.4, 0.9);
        a(1, 0) = cx(0.5, -0.2);
        a(1, 1) = cx(0.8, 0.1);
        rep.add("cycle.newton_identity_n2", cycle_expansion_check(a), 1e-14);
    }
    return rep;
}

inline LagrangeMatrixSpec default_matrix_spec(int truncation) {
    LagrangeMatrixSpec sp;
    // the second point sits near mu_1 - pi so the off-diagonal coupling is
    // strongly contractive and truncation 12 reaches 1e-8
    sp.mu = {0.3, -2.84};
    sp.f_taylor.resize(truncation + 2);
    for (int k = 0; k < static_cast<int>(sp.f_taylor.size()); ++k)
        sp.f_taylor[k] = 0.1 / std::tgamma(k + 1.0);
    sp.f = [](double x) { return 0.1 * std::exp(x); };
    sp.fd = [](double x) { return 0.1 * std::exp(x); };
    sp.theta = [](double a, double j) { return std::cos(a - j); };
    sp.g1 = [](double mu) { return mu; };
    sp.F_taylor = {0.0, 1.0};
    sp.F = [](double y) { return y; };
    sp.truncation = truncation;
    return sp;
}

inline LagrangeContinuousSpec default_continuous_spec(int n_nodes, int truncation) {
    LagrangeContinuousSpec sp;
    sp.q = 1.0;
    sp.n_nodes = n_nodes;
    sp.truncation = truncation;
    std::vector<double> ft(truncation + 2, 0.0);
    // f(x) = 0.05 (e^x - 1) + 0.05
    ft[0] = 0.05;
    for (int k = 1; k < static_cast<int>(ft.size()); ++k) ft[k] = 0.05 / std::tgamma(k + 1.0);
    sp.f_taylor = {ft};
    sp.f_sum = [](double x) { return 0.05 * (std::exp(x) - 1.0) + 0.05; };
    sp.f_sum_d = [](double x) { return 0.05 * std::exp(x); };
    sp.theta = [](double a, double j) { return std::exp(-sqr(a - j)); };
    sp.g1 = [](double mu) { return 1.0 + 0.3 * mu; };
    sp.F_taylor = {0.0, 1.0};
    sp.F = [](double y) { return y; };
    return sp;
}

inline LagrangeContinuousSpec default_multiseries_spec(int n_nodes, int truncation, double gamma) {
    LagrangeContinuousSpec sp = default_continuous_spec(n_nodes, truncation);
    // species f_s(x) = (gamma^s / s) e^x, s = 1, 2
    std::vector<double> f1(truncation + 2), f2(truncation + 2);
    for (int k = 0; k < static_cast<int>(f1.size()); ++k) {
        double ek = 1.0 / std::tgamma(k + 1.0);
        f1[k] = gamma * ek;
        f2[k] = 0.5 * gamma * gamma * ek;
    }
    sp.f_taylor = {f1, f2};
    double c1 = gamma, c2 = 0.5 * gamma * gamma;
    sp.f_sum = [c1, c2](double x) { return (c1 + c2) * std::exp(x); };
    sp.f_sum_d = [c1, c2](double x) { return (c1 + c2) * std::exp(x); };
    return sp;
}

inline CheckReport lagrange_suite() {
    CheckReport rep;
    rep.add("lagrange.scalar_t0.2_trunc30", lagrange_scalar_check(0.2, 30), 1e-10);
    rep.add("lagrange.scalar_t0.05_trunc15", lagrange_scalar_check(0.05, 15), 1e-12);
    rep.add("lagrange.scalar_t0_trunc5", lagrange_scalar_check(0.0, 5), 1e-15);

    double rm12 = lagrange_matrix_check(default_matrix_spec(12));
    double rm6 = lagrange_matrix_check(default_matrix_spec(6));
    rep.add("lagrange.matrix_N2_trunc12", rm12, 1e-8);
    rep.add("lagrange.matrix_doubling_gain", rm12 * 10.0 / std::max(rm6, 1e-300), 1.0);

    rep.add("lagrange.continuous_48nodes", lagrange_continuous_check(default_continuous_spec(48, 20)), 1e-6);
    double rc4 = lagrange_continuous_check(default_continuous_spec(48, 4));
    double rc8 = lagrange_continuous_check(default_continuous_spec(48, 8));
    rep.add("lagrange.continuous_trunc_doubling_gain", rc8 * 10.0 / std::max(rc4, 1e-300), 1.0);
    // 4 -> 8 nodes: the Gaussian kernel is already converged past ~10 nodes
    double rn4 = lagrange_continuous_check(default_continuous_spec(4, 20));
    double rn8 = lagrange_continuous_check(default_continuous_spec(8, 20));
    rep.add("lagrange.continuous_node_doubling_gain", rn8 * 10.0 / std::max(rn4, 1e-300), 1.0);

    rep.add("lagrange.multiseries_n2", lagrange_continuous_check(default_multiseries_spec(48, 20, 0.1)), 1e-8);
    return rep;
}

inline CheckReport fredholm_suite(std::mt19937_64& rng) {
    CheckReport rep;
    std::uniform_real_distribution<double> ur(-1.0, 1.0);

    // finite-N equivalence, N = 1 with the spec's data
    {
        FiniteBetheData d;
        d.zeta = pi / 3;
        d.kappa = cx(0.5, 0.0);
        d.theta = cx(0.1, 0.05);
        d.lambdas = {0.2};
        d.zs = {cx(0.2, 0.1)};
        Contour c = Contour::ellipse(0.6, d.zeta / 4.0, 256);
        rep.add("fredholm.equiv_lambda_N1", fredholm_equiv_check(d, c, false), 1e-9);
    }
    // N = 3 random data, both families, plus the theta-combination identity
    {
        Contour c = Contour::ellipse(0.6, pi / 12.0, 384);
        FiniteBetheData d = draw_finite_data(rng, 3, pi / 3, cx(0.7, 0.0), cx(0.05, 0.08), c);
        rep.add("fredholm.equiv_lambda_N3", fredholm_equiv_check(d, c, false), 1e-8);
        rep.add("fredholm.equiv_z_N3", fredholm_equiv_check(d, c, true), 1e-8);
        rep.add("fredholm.theta_combination", theta_comb_check(d, cx(-0.15, 0.04)), 1e-8);
    }
    // shift identity: zero, rank-one, and a smooth kernel with h = e^{0.3 z}
    {
        Contour c = Contour::ellipse(0.7, 0.25, 128);
        auto zero = [](cx, cx) -> cx { return 0.0; };
        auto h1 = [](cx w) -> cx { return 1.5 + 0.3 * w; };
        rep.add("fredholm.shift_identity_zero", shift_identity_check(zero, h1, cx(0.1, 0.05), c), 1e-12);

        auto rank1 = [](cx w, cx wp) -> cx { return 0.4 * std::exp(0.3 * w) * std::exp(-0.2 * wp); };
        rep.add("fredholm.shift_identity_rank_one", shift_identity_check(rank1, h1, cx(0.1, 0.05), c), 1e-12);

        double c1 = ur(rng), c2 = ur(rng), c3 = ur(rng);
        auto smooth = [c1, c2, c3](cx w, cx wp) -> cx {
            return 0.3 * std::exp(0.2 * c1 * w + 0.25 * c2 * wp) + 0.1 * c3 * w * wp;
        };
        ThermoSolution th = dressed_quantities(ModelSpec::xxz(pi / 3, 1.0), 96);
        auto hz = [&th](cx w) -> cx { return std::exp(0.3 * cauchy_z_tilde(th, w)); };
        Contour cq = Contour::ellipse(th.q, th.model.strip() / 4.0, 128);
        rep.add("fredholm.shift_identity_smooth", shift_identity_check(smooth, hz, cx(0.0, 0.1), cq), 1e-8);

        // theta independence of the U^{(lambda)} family at beta = 0.4
        cx beta(0.4, 0.0);
        auto family = [&th, beta](cx theta) { return u_lambda_kernel(th, beta, theta); };
        auto normal = [&th, beta](cx theta) -> cx {
            const cx s = kernel_shift(th.model);
            return std::exp(beta) * std::exp(beta * cauchy_z_tilde(th, theta - s)) -
                   std::exp(beta * cauchy_z_tilde(th, theta + s));
        };
        rep.add("fredholm.theta_independence_U",
                theta_independence_check(family, normal, cx(-th.q, 0.0), cx(0.0, 0.0), cq), 1e-7);

        // free-fermion family: both ratios against e^{2 pi i z(theta + i pi/2)}
        ThermoSolution tf = dressed_quantities(ModelSpec::xxz(pi / 2, 2.0), 96);
        Contour cf = Contour::ellipse(tf.q, tf.model.strip() / 4.0, 128);
        double qf = tf.q;
        auto ff_family = [qf](cx theta) {
            return std::function<cx(cx, cx)>([qf, theta](cx w, cx wp) -> cx {
                return -std::tanh(w - qf) / std::tanh(w + qf) *
                       (std::tanh(w - wp) - std::tanh(theta - wp));
            });
        };
        auto ff_normal = [&tf](cx theta) -> cx {
            return std::exp(2.0 * pi * ii * cauchy_z_tilde(tf, theta + ii * pi / 2.0));
        };
        rep.add("fredholm.theta_independence_ff",
                theta_independence_check(ff_family, ff_normal, cx(-tf.q, 0.0),
                                         cx(0.0, 0.5 * tf.model.strip() / 2.0), cf), 1e-8);
    }
    return rep;
}

/// Full verification battery; `only` filters by name prefix ("cycle",
/// "lagrange", "fredholm", "freefermion").
inline CheckReport run_verify_suite(std::uint64_t seed, const std::string& only = "") {
    std::mt19937_64 rng(seed);
    CheckReport rep;
    auto want = [&](const char* group) { return only.empty() || only == group; };
    if (want("cycle")) rep.merge(cycle_suite(rng));
    if (want("lagrange")) rep.merge(lagrange_suite());
    if (want("fredholm")) rep.merge(fredholm_suite(rng));
    if (want("freefermion")) {
        rep.merge(free_fermion_suite(2.0, 128, 256, &rng));
        rep.merge(free_fermion_suite(0.5, 128, 256, &rng));
    }
    return rep;
}

} // namespace bethe
