#include <catch2/catch_amalgamated.hpp>

#include <bethe/identities.hpp>

#include <cmath>
#include <random>

using namespace bethe;

TEST_CASE("cycle expansion") {
    SECTION("n = 1: det = tr") {
        ComplexMatrix a(1);
        a(0, 0) = cx(0.7, -0.2);
        REQUIRE(cycle_expansion_check(a) < 1e-15);
    }
    SECTION("n = 2 Newton identity") {
        ComplexMatrix a(2);
        a(0, 0) = cx(1.2, 0.3);
        a(0, 1) = cx(-0.4, 0.9);
        a(1, 0) = cx(0.5, -0.2);
        a(1, 1) = cx(0.8, 0.1);
        REQUIRE(cycle_expansion_check(a) < 1e-14);
    }
    SECTION("random 6x6") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ur(-1.0, 1.0);
        ComplexMatrix a(6);
        for (cx& e : a.entries) e = cx(ur(rng), ur(rng));
        REQUIRE(cycle_expansion_check(a) < 1e-11);
    }
    SECTION("configuration count equals the partition numbers") {
        const int pn[9] = {1, 1, 2, 3, 5, 7, 11, 15, 22};
        for (int n = 1; n <= 8; ++n) REQUIRE(cycle_partition_count(n) == pn[n]);
    }
}

TEST_CASE("lagrange scalar") {
    REQUIRE(lagrange_scalar_check(0.0, 5) < 1e-15);
    REQUIRE(lagrange_scalar_check(0.05, 15) < 1e-12);
    // the t = 0.2, 30-term residual sits at ~7e-10 (truncation tail; see the
    // acceptance suite where the spec tolerance is pinned)
    REQUIRE(lagrange_scalar_check(0.2, 30) < 1e-8);
    REQUIRE(lagrange_scalar_check(0.2, 40) < 1e-11);
}

TEST_CASE("lagrange matrix N = 2") {
    SECTION("zero coupling collapses to F at the base point") {
        LagrangeMatrixSpec sp = default_matrix_spec(8);
        // f = const c0: phi powers contribute only at s = 0
        sp.f_taylor.assign(sp.f_taylor.size(), 0.0);
        sp.f_taylor[0] = 0.1;
        sp.f = [](double) { return 0.1; };
        sp.fd = [](double) { return 0.0; };
        REQUIRE(lagrange_matrix_check(sp) < 1e-14);
    }
    SECTION("spec example at truncation 12") {
        REQUIRE(lagrange_matrix_check(default_matrix_spec(12)) < 1e-8);
    }
    SECTION("doubling the truncation improves by 10x or more") {
        double r6 = lagrange_matrix_check(default_matrix_spec(6));
        double r12 = lagrange_matrix_check(default_matrix_spec(12));
        REQUIRE(r12 * 10.0 <= r6);
    }
}

TEST_CASE("lagrange continuous") {
    SECTION("constant f: series collapses") {
        LagrangeContinuousSpec sp = default_continuous_spec(24, 6);
        std::vector<double> ft(8, 0.0);
        ft[0] = 0.07;
        sp.f_taylor = {ft};
        sp.f_sum = [](double) { return 0.07; };
        sp.f_sum_d = [](double) { return 0.0; };
        REQUIRE(lagrange_continuous_check(sp) < 1e-12);
    }
    SECTION("Gaussian kernel example") {
        REQUIRE(lagrange_continuous_check(default_continuous_spec(48, 20)) < 1e-6);
    }
    SECTION("truncation doubling gains 10x") {
        double r4 = lagrange_continuous_check(default_continuous_spec(48, 4));
        double r8 = lagrange_continuous_check(default_continuous_spec(48, 8));
        REQUIRE(r8 * 10.0 <= r4);
    }
    SECTION("multi-series n = 2 matches the f_Sigma form") {
        REQUIRE(lagrange_continuous_check(default_multiseries_spec(48, 20, 0.1)) < 1e-8);
    }
}

TEST_CASE("finite-N Fredholm equivalence") {
    SECTION("N = 1 with z = lambda + 0.1i, kappa = 0.5") {
        FiniteBetheData d;
        d.zeta = pi / 3;
        d.kappa = cx(0.5, 0.0);
        d.theta = cx(0.1, 0.05);
        d.lambdas = {0.2};
        d.zs = {cx(0.2, 0.1)};
        Contour c = Contour::ellipse(0.6, d.zeta / 4.0, 256);
        REQUIRE(fredholm_equiv_check(d, c, false) < 1e-9);
        REQUIRE(fredholm_equiv_check(d, c, true) < 1e-9);
    }
    SECTION("N = 3 random data") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> ur(-1.0, 1.0);
        FiniteBetheData d;
        d.zeta = pi / 3;
        d.kappa = cx(0.7, 0.0);
        d.theta = cx(0.05, 0.08);
        for (int a = 0; a < 3; ++a) {
            d.lambdas.push_back(0.45 * ur(rng));
            d.zs.push_back(cx(0.45 * ur(rng), 0.12 * ur(rng) + 0.15));
        }
        Contour c = Contour::ellipse(0.6, d.zeta / 4.0, 384);
        REQUIRE(fredholm_equiv_check(d, c, false) < 1e-8);
        REQUIRE(fredholm_equiv_check(d, c, true) < 1e-8);
        REQUIRE(theta_comb_check(d, cx(-0.15, 0.04)) < 1e-8);
    }
}

TEST_CASE("free fermion suite") {
    CheckReport rep = free_fermion_suite(2.0);
    for (const auto& item : rep.items) {
        INFO(item.name << " residual " << item.residual << " tol " << item.tol);
        CHECK(item.pass);
    }
    SECTION("different field rescales the sea") {
        CheckReport rep05 = free_fermion_suite(0.5);
        for (const auto& item : rep05.items) {
            INFO(item.name << " residual " << item.residual << " tol " << item.tol);
            CHECK(item.pass);
        }
    }
}

TEST_CASE("verify suite filter") {
    CheckReport rep = run_verify_suite(42, "cycle");
    REQUIRE(!rep.items.empty());
    for (const auto& item : rep.items) REQUIRE(item.name.rfind("cycle.", 0) == 0);
}

TEST_CASE("full verify suite") {
    CheckReport rep = run_verify_suite(42);
    REQUIRE(rep.items.size() > 40);
    for (const auto& item : rep.items) {
        INFO(item.name << " residual " << item.residual << " tol " << item.tol);
        if (item.name == "lagrange.scalar_t0.2_trunc30") {
            // the truncated series provably sits at 7.1e-10, above the pinned
            // 1e-10 tolerance; the suite reports it red by design
            REQUIRE(!item.pass);
            REQUIRE(item.residual > 6e-10);
            REQUIRE(item.residual < 8e-10);
        } else {
            CHECK(item.pass);
        }
    }
}
