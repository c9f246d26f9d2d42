#include <catch2/catch_amalgamated.hpp>

#include <bethe/models.hpp>
#include <bethe/linalg.hpp>
#include <bethe/sine_kernel.hpp>

#include <array>
#include <cmath>

using namespace bethe;

namespace {

GskProblem pure_sine(double gamma, int m, double q = 1.0) {
    GskProblem p;
    p.q = q;
    p.m = m;
    p.gamma = cx(gamma, 0.0);
    p.p0 = [](double x) { return x; };
    p.p0d = [](cx) { return cx(1.0, 0.0); };
    p.F = [](double) { return cx(1.0, 0.0); };
    p.Fd = [](double) { return cx(0.0, 0.0); };
    return p;
}

int nodes_for(const GskProblem& p) {
    double span = p.p0(p.q) - p.p0(-p.q);
    return std::max(220, static_cast<int>(0.55 * p.m * span) + 120);
}

} // namespace

TEST_CASE("exact determinant basics") {
    SECTION("gamma = 0") {
        GskProblem p = pure_sine(0.0, 50);
        REQUIRE(std::abs(exact_gsk_logdet(p, 64)) < 1e-14);
    }
    SECTION("m = 0, g = 0: kernel degenerates, n vs 4n agree") {
        GskProblem p = pure_sine(0.3, 0);
        cx a = exact_gsk_logdet(p, 48);
        cx b = exact_gsk_logdet(p, 192);
        REQUIRE(std::abs(a - b) < 1e-10);
    }
    SECTION("node-doubling stability at m = 100") {
        GskProblem p = pure_sine(0.1, 100);
        int n = nodes_for(p);
        cx a = exact_gsk_logdet(p, n);
        cx b = exact_gsk_logdet(p, 3 * n / 2);
        REQUIRE(std::abs(a - b) < 1e-12);
    }
    SECTION("real kernel data gives a real log det") {
        GskProblem p = pure_sine(0.17, 60);
        cx v = exact_gsk_logdet(p, 260);
        REQUIRE(std::abs(v.imag()) < 1e-10);
    }
}

TEST_CASE("kernel diagonal limit") {
    GskProblem p = pure_sine(0.1, 40);
    p.g = [](double x) { return cx(0.1 * x * x, 0.0); };
    p.gd = [](double x) { return cx(0.2 * x, 0.0); };
    for (double lam : {-0.6, 0.0, 0.33}) {
        cx diag = gsk_kernel(p, lam, lam);
        cx off = gsk_kernel(p, lam, lam + 1e-6);
        REQUIRE(std::abs(off - diag) / std::abs(diag) < 1e-5);
        cx off2 = gsk_kernel(p, lam, lam - 1e-6);
        REQUIRE(std::abs(off2 - diag) / std::abs(diag) < 1e-5);
    }
    SECTION("matrix from gsk_kernel matches exact_gsk_logdet") {
        Grid g = gauss_legendre(64, -p.q, p.q);
        ComplexMatrix a(64);
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j)
                a(i, j) = (i == j ? 1.0 : 0.0) + std::sqrt(g.weights[i]) * p.gamma *
                                                     gsk_kernel(p, g.nodes[i], g.nodes[j]) *
                                                     std::sqrt(g.weights[j]);
        REQUIRE(std::abs(log_det(a) - exact_gsk_logdet(p, 64)) < 1e-12);
    }
}

TEST_CASE("free fermion correspondence with the generating kernel") {
    // at zeta = pi/2 the generating function is det(I + (kappa-1) V0) with the
    // sine kernel built from the bare momentum
    ModelSpec m = ModelSpec::xxz(pi / 2, 2.0);
    const double q = 0.5 * std::acosh(2.0);
    const double beta = 0.2;
    GskProblem p;
    p.q = q;
    p.m = 24;
    p.gamma = std::exp(cx(beta, 0.0)) - 1.0;
    p.p0 = [m](double x) { return bare_momentum(m, x); };
    p.p0d = [m](cx x) { return bare_momentum_deriv(m, x); };
    p.F = [](double) { return cx(1.0, 0.0); };
    p.Fd = [](double) { return cx(0.0, 0.0); };
    cx lib = exact_gsk_logdet(p, 220);

    // independent assembly of det[delta_ij + sqrt(w) (kappa-1) sin(m/2 dp)/(pi sinh) sqrt(w)]
    Grid g = gauss_legendre(220, -q, q);
    ComplexMatrix a(220);
    for (int i = 0; i < 220; ++i) {
        for (int j = 0; j < 220; ++j) {
            double vij;
            if (i == j) {
                vij = p.m * bare_momentum_deriv_real(m, g.nodes[i]) / (2.0 * pi);
            } else {
                vij = std::sin(0.5 * p.m * (bare_momentum(m, g.nodes[i]) - bare_momentum(m, g.nodes[j]))) /
                      (pi * std::sinh(g.nodes[i] - g.nodes[j]));
            }
            a(i, j) = (i == j ? 1.0 : 0.0) +
                      std::sqrt(g.weights[i]) * p.gamma * vij * std::sqrt(g.weights[j]);
        }
    }
    REQUIRE(std::abs(lib - log_det(a)) < 1e-10);
}

TEST_CASE("w0 closed forms") {
    SECTION("nu = 0 gives 0") {
        GskProblem p = pure_sine(0.0, 100);
        REQUIRE(std::abs(w0(p)) < 1e-13);
    }
    SECTION("constant nu against the analytic simplification") {
        GskProblem p = pure_sine(0.1, 150);
        cx nu0 = -std::log(cx(1.1, 0.0)) / (2.0 * pi * ii);
        cx expected = -ii * static_cast<double>(p.m) * nu0 * (p.p0(p.q) - p.p0(-p.q)) -
                      nu0 * nu0 *
                          (std::log(p.m * std::sinh(2.0 * p.q) * 1.0) +
                           std::log(p.m * std::sinh(2.0 * p.q) * 1.0)) +
                      2.0 * barnes_pair(nu0, 1);
        REQUIRE(std::abs(w0(p) - expected) < 1e-11);
    }
    SECTION("barnes pole flagged") {
        // synthetic nu = 1: F = const makes 1 + gamma F = e^{-2 pi i}; use
        // gamma = e^{-2pi i} - 1 = 0 -> impossible; instead check the guard via
        // a direct degenerate barnes_pair query
        REQUIRE(std::isinf(barnes_pair(cx(1.0, 0.0), 1).real()));
    }
}

TEST_CASE("periodicity relation between w0 and w_osc") {
    // W_{+-1} e^{+- i m dp} = exp(W0[nu -+ 1] - W0[nu])
    for (double gamma : {0.05, 0.1}) {
        for (int m : {1, 10, 100}) {
            GskProblem p = pure_sine(gamma, m);
            cx ref = w0(p);
            cx plus = w_osc(p, +1);
            cx rhs_plus = std::exp(w0_shifted(p, cx(-1.0, 0.0)) - ref);
            REQUIRE(std::abs(plus - rhs_plus) / std::abs(plus) < 1e-10);
            cx minus = w_osc(p, -1);
            cx rhs_minus = std::exp(w0_shifted(p, cx(+1.0, 0.0)) - ref);
            REQUIRE(std::abs(minus - rhs_minus) / std::abs(minus) < 1e-10);
        }
    }
}

TEST_CASE("periodicity relation with a non-constant F") {
    GskProblem p = pure_sine(0.05, 20);
    p.F = [](double x) { return cx(1.0 + 0.3 * x + 0.1 * x * x, 0.0); };
    p.Fd = [](double x) { return cx(0.3 + 0.2 * x, 0.0); };
    cx ref = w0(p, 160);
    cx plus = w_osc(p, +1, 160);
    cx rhs = std::exp(w0_shifted(p, cx(-1.0, 0.0), 160) - ref);
    REQUIRE(std::abs(plus - rhs) / std::abs(plus) < 1e-8);
}

TEST_CASE("w0 residual decays against the exact engine") {
    const double gamma = 0.1;
    double prev = 1e9;
    for (int m : {50, 100, 200}) {
        GskProblem p = pure_sine(gamma, m);
        cx exact = exact_gsk_logdet(p, nodes_for(p));
        double r0 = std::abs(exact - w0(p));
        REQUIRE(r0 < prev);
        prev = r0;
    }
}

TEST_CASE("w_osc amplitude matches the demodulated exact residual") {
    // project exact - W0 onto {1, 1/m, cos(2m)/m^2, sin(2m)/m^2} over a
    // window of m and compare the oscillating quadratures with w_osc
    const double gamma = 0.1;
    const int m0 = 200, K = 12;
    std::vector<std::array<double, 4>> A(K);
    std::vector<double> y(K);
    for (int k = 0; k < K; ++k) {
        int m = m0 + k;
        GskProblem p = pure_sine(gamma, m);
        cx exact = exact_gsk_logdet(p, nodes_for(p));
        y[k] = (exact - w0(p)).real();
        A[k] = {1.0, 1.0 / m, std::cos(2.0 * m) / (double(m) * m), std::sin(2.0 * m) / (double(m) * m)};
    }
    std::vector<double> ata(16, 0.0), aty(4, 0.0);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < 4; ++i) {
            aty[i] += A[k][i] * y[k];
            for (int j = 0; j < 4; ++j) ata[i * 4 + j] += A[k][i] * A[k][j];
        }
    auto sol = solve_dense(4, ata, aty);

    GskProblem p = pure_sine(gamma, m0);
    cx w1 = w_osc(p, +1) * std::exp(-2.0 * ii * static_cast<double>(m0));
    double cos_amp = 2.0 * w1.real() * m0 * m0;
    double sin_amp = -2.0 * w1.imag() * m0 * m0;
    REQUIRE(std::abs(sol[2] - cos_amp) < 0.1 * std::abs(cos_amp));
    REQUIRE(std::abs(sol[3] - sin_amp) < 0.1 * std::abs(sin_amp));
}

TEST_CASE("uniform small-gamma decay") {
    // residual after W0 + W_{+-1} times m^{2.5} stays bounded
    const double gamma = 0.05;
    double bound = 0.0;
    for (int m : {100, 200, 400, 800}) {
        GskProblem p = pure_sine(gamma, m);
        cx exact = exact_gsk_logdet(p, nodes_for(p));
        double r = std::abs(exact - (w0(p) + w_osc(p, +1) + w_osc(p, -1)));
        bound = std::max(bound, r * std::pow(m, 2.5));
    }
    REQUIRE(bound < 1.0);
}
