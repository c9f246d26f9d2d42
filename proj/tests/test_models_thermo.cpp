#include <catch2/catch_amalgamated.hpp>

#include <bethe/models.hpp>
#include <bethe/thermo.hpp>

#include <cmath>

using namespace bethe;

TEST_CASE("kernel values") {
    ModelSpec ff = ModelSpec::xxz(pi / 2, 2.0);
    for (double lam : {-1.3, 0.0, 0.4, 2.0})
        REQUIRE(std::abs(kernel_K(ff, cx(lam, 0.0))) < 1e-15);

    ModelSpec m3 = ModelSpec::xxz(pi / 3, 1.0);
    REQUIRE(std::abs(kernel_K(m3, cx(0.0, 0.0)) - 2.0 / std::sqrt(3.0)) < 1e-14);

    ModelSpec ll = ModelSpec::lieb_liniger(1.0, 1.0);
    REQUIRE(std::abs(kernel_K(ll, cx(0.0, 0.0)) - 2.0) < 1e-15);
    REQUIRE_THROWS_AS(kernel_K(ll, cx(0.0, 1.0)), pole_error);
}

TEST_CASE("bare momentum") {
    ModelSpec m = ModelSpec::xxz(1.1, 1.0);
    REQUIRE(bare_momentum(m, 0.0) == 0.0);
    SECTION("parity and continuity") {
        double prev = bare_momentum(m, -3.0);
        for (double lam = -3.0 + 0.01; lam <= 3.0; lam += 0.01) {
            double p = bare_momentum(m, lam);
            REQUIRE(p > prev - 1e-12); // strictly increasing
            prev = p;
        }
        for (double lam : {0.3, 1.7, 2.9}) {
            REQUIRE(std::abs(bare_momentum(m, -lam) + bare_momentum(m, lam)) < 1e-12);
            REQUIRE(std::abs(kernel_K_real(m, -lam) - kernel_K_real(m, lam)) < 1e-14);
            REQUIRE(std::abs(bare_momentum_deriv_real(m, -lam) - bare_momentum_deriv_real(m, lam)) < 1e-14);
        }
    }
    SECTION("derivative by finite differences") {
        for (double lam = -2.0; lam <= 2.0; lam += 0.25) {
            for (double del : {1e-4, 1e-5}) {
                double fd = (bare_momentum(m, lam + del) - bare_momentum(m, lam - del)) / (2.0 * del);
                REQUIRE(std::abs(fd - bare_momentum_deriv_real(m, lam)) < 50.0 * del * del + 1e-10);
            }
        }
    }
    SECTION("closed forms") {
        ModelSpec ff = ModelSpec::xxz(pi / 2, 2.0);
        for (double lam : {0.0, 0.7, -1.2})
            REQUIRE(std::abs(bare_momentum_deriv_real(ff, lam) - 2.0 / std::cosh(2.0 * lam)) < 1e-14);
        REQUIRE(std::abs(bare_momentum_deriv_real(m, 0.0) - 2.0 / std::tan(0.5 * m.zeta)) < 1e-13);
        // complex evaluation agrees with the real one on the axis
        REQUIRE(std::abs(bare_momentum_deriv(m, cx(0.4, 0.0)) - bare_momentum_deriv_real(m, 0.4)) < 1e-14);
    }
}

TEST_CASE("free fermion thermodynamics") {
    ModelSpec m = ModelSpec::xxz(pi / 2, 2.0);
    ThermoSolution t = dressed_quantities(m, 128);
    const double q_exact = 0.5 * std::log(2.0 + std::sqrt(3.0));

    REQUIRE(std::abs(t.q - q_exact) < 1e-10);
    REQUIRE(std::abs(t.p_F - pi / 3.0) < 1e-10);
    REQUIRE(std::abs(t.D - 1.0 / 3.0) < 1e-10);
    REQUIRE(std::abs(std::sin(t.p_F) - std::tanh(2.0 * t.q)) < 1e-10);
    REQUIRE(std::abs(t.D - t.p_F / pi) < 1e-10);

    for (int i = 0; i < t.grid.size(); ++i) {
        REQUIRE(std::abs(t.Z[i] - 1.0) < 1e-12);
        REQUIRE(std::abs(t.rho[i] - 1.0 / (pi * std::cosh(2.0 * t.grid.nodes[i]))) < 1e-12);
        REQUIRE(t.eps[i] < 1e-9);
    }
    // dressed energy vanishes at the boundary and is interior-negative
    REQUIRE(std::abs(t.eps_sol(t.q)) < 1e-9);
    REQUIRE(t.eps_sol(0.0) < 0.0);
}

TEST_CASE("free fermion boundary limits") {
    // h -> 4 gives q -> 0
    ModelSpec m = ModelSpec::xxz(pi / 2, 3.98);
    double q = find_fermi_boundary(m, 64);
    REQUIRE(q < 0.06);
    REQUIRE(q > 0.0);
    REQUIRE_THROWS_AS(find_fermi_boundary(ModelSpec::xxz(pi / 2, 4.5), 64), no_fermi_sea_error);
}

TEST_CASE("solve_linear_ie free fermion cases") {
    ModelSpec m = ModelSpec::xxz(pi / 2, 2.0);
    double q = 0.5 * std::acosh(2.0);
    auto rho = solve_linear_ie(m, q, [&](double lam) { return bare_momentum_deriv_real(m, lam) / (2.0 * pi); }, 64);
    for (int i = 0; i < rho.grid.size(); ++i)
        REQUIRE(std::abs(rho.values[i] - 1.0 / (pi * std::cosh(2.0 * rho.grid.nodes[i]))) < 1e-12);
    auto z = solve_linear_ie(m, q, [](double) { return 1.0; }, 64);
    for (double v : z.values) REQUIRE(std::abs(v - 1.0) < 1e-13);
}

TEST_CASE("Nystrom residual at off-grid points") {
    ModelSpec m = ModelSpec::xxz(pi / 3, 1.0);
    ThermoSolution t = dressed_quantities(m, 128);
    Grid fine = gauss_legendre(512, -t.q, t.q);
    for (int k = 0; k < 50; ++k) {
        double lam = -t.q + (2.0 * t.q) * (k + 0.5) / 50.0;
        double integral = 0.0;
        for (int j = 0; j < fine.size(); ++j)
            integral += fine.weights[j] * kernel_K_real(m, lam - fine.nodes[j]) * t.Z_sol(fine.nodes[j]);
        double residual = t.Z_sol(lam) + integral / (2.0 * pi) - 1.0;
        REQUIRE(std::abs(residual) < 1e-9);
    }
}

TEST_CASE("interacting point stability and symmetry") {
    ModelSpec m = ModelSpec::xxz(pi / 3, 1.0);
    ThermoSolution a = dressed_quantities(m, 128);
    ThermoSolution b = dressed_quantities(m, 256);
    REQUIRE(std::abs(a.q - b.q) < 1e-9);
    REQUIRE(std::abs(a.p_F - b.p_F) < 1e-9);
    REQUIRE(std::abs(a.Z_q - b.Z_q) < 1e-9);
    REQUIRE(a.D > 0.0);
    REQUIRE(a.D <= 0.5);
    // evenness of rho and Z through the interpolant
    for (double lam : {0.13, 0.47 * a.q, 0.9 * a.q}) {
        REQUIRE(std::abs(a.rho_sol(lam) - a.rho_sol(-lam)) < 1e-10);
        REQUIRE(std::abs(a.Z_sol(lam) - a.Z_sol(-lam)) < 1e-10);
        REQUIRE(a.rho_sol(lam) > 0.0);
        REQUIRE(a.Z_sol(lam) > 0.0);
    }
}

TEST_CASE("q decreases with the field") {
    double prev = 1e9;
    for (double h : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        double q = find_fermi_boundary(ModelSpec::xxz(pi / 3, h), 96);
        REQUIRE(q < prev);
        prev = q;
    }
}

TEST_CASE("Lieb-Liniger") {
    SECTION("large coupling pushes Z to 1") {
        ModelSpec m = ModelSpec::lieb_liniger(1e6, 1.0);
        ThermoSolution t = dressed_quantities(m, 128);
        REQUIRE(std::abs(t.Z_q - 1.0) < 1e-5);
        for (double v : t.Z) REQUIRE(std::abs(v - 1.0) < 1e-5);
        REQUIRE(std::abs(t.rho_q - t.Z_q / (2.0 * pi)) < 1e-12);
    }
    SECTION("dressed charge at huge c via plain solve") {
        auto z = solve_linear_ie(ModelSpec::lieb_liniger(1e6, 1.0), 1.0, [](double) { return 1.0; }, 64);
        for (double v : z.values) REQUIRE(std::abs(v - 1.0) < 1e-5);
    }
    SECTION("c = 4, h = 1 boundary against a Picard oracle at 4x nodes") {
        ModelSpec m = ModelSpec::lieb_liniger(4.0, 1.0);
        double q = find_fermi_boundary(m, 128);
        // oracle: Picard iteration of the dressed-energy equation at 512 nodes,
        // bisection in q on eps(q) = 0
        auto eps_at_boundary = [&](double qq) {
            Grid g = gauss_legendre(512, -qq, qq);
            std::vector<double> e(g.size());
            for (int i = 0; i < g.size(); ++i) e[i] = g.nodes[i] * g.nodes[i] - m.h;
            for (int it = 0; it < 500; ++it) {
                std::vector<double> ne(g.size());
                double delta = 0.0;
                for (int i = 0; i < g.size(); ++i) {
                    double s = 0.0;
                    for (int j = 0; j < g.size(); ++j)
                        s += g.weights[j] * kernel_K_real(m, g.nodes[i] - g.nodes[j]) * e[j];
                    ne[i] = g.nodes[i] * g.nodes[i] - m.h + s / (2.0 * pi);
                    delta = std::max(delta, std::abs(ne[i] - e[i]));
                }
                e = std::move(ne);
                if (delta < 1e-14) break;
            }
            // interpolate eps to the boundary via the Nystrom formula
            double s = 0.0;
            for (int j = 0; j < g.size(); ++j)
                s += g.weights[j] * kernel_K_real(m, qq - g.nodes[j]) * e[j];
            return qq * qq - m.h + s / (2.0 * pi);
        };
        double lo = 0.5, hi = 2.0;
        REQUIRE(eps_at_boundary(lo) < 0.0);
        REQUIRE(eps_at_boundary(hi) > 0.0);
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (eps_at_boundary(mid) < 0.0 ? lo : hi) = mid;
        }
        REQUIRE(std::abs(q - 0.5 * (lo + hi)) < 1e-8);
    }
    SECTION("refinement stability at c = 4") {
        ThermoSolution a = dressed_quantities(ModelSpec::lieb_liniger(4.0, 1.0), 128);
        ThermoSolution b = dressed_quantities(ModelSpec::lieb_liniger(4.0, 1.0), 256);
        REQUIRE(std::abs(a.q - b.q) < 1e-9);
        REQUIRE(std::abs(a.Z_q - b.Z_q) < 1e-9);
        REQUIRE(std::abs(a.D - b.D) < 1e-9);
    }
}
