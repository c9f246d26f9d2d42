#include <catch2/catch_amalgamated.hpp>

#include <bethe/specfun.hpp>

#include <cmath>
#include <random>

using namespace bethe;

namespace {

// Literal product series for log G(1+z), partial sums S(N), S(2N), S(4N) with
// two Richardson steps to cancel the 1/N and 1/N^2 tails. Long double keeps
// the accumulated rounding of the ~10^6 log evaluations below 1e-12.
// Independent of the library path.
cx barnes_series_oracle(cx z) {
    using cxl = std::complex<long double>;
    const cxl zl(z.real(), z.imag());
    auto partial = [&](long n_terms) {
        cxl s = 0.5L * zl * std::log(2.0L * 3.14159265358979323846264338327950288L) -
                0.5L * zl * (zl + 1.0L) - 0.577215664901532860606512090082L * 0.5L * zl * zl;
        for (long n = 1; n <= n_terms; ++n) {
            long double dn = static_cast<long double>(n);
            s += dn * std::log(1.0L + zl / dn) - zl + zl * zl / (2.0L * dn);
        }
        return s;
    };
    const long n0 = 100000;
    cxl s1 = partial(n0), s2 = partial(2 * n0), s4 = partial(4 * n0);
    cxl r1 = 2.0L * s2 - s1;       // kills 1/N
    cxl r2 = 2.0L * s4 - s2;
    cxl r = (4.0L * r2 - r1) / 3.0L; // kills 1/N^2
    return cx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
}

} // namespace

TEST_CASE("log_gamma spot values") {
    REQUIRE(std::abs(log_gamma(cx(1.0, 0.0))) < 1e-13);
    REQUIRE(std::abs(log_gamma(cx(0.5, 0.0)) - 0.5 * std::log(pi)) < 1e-13);
    REQUIRE(std::abs(log_gamma(cx(5.0, 0.0)) - std::log(24.0)) < 1e-12);
    // reflection side: Gamma(-1/2) = -2 sqrt(pi)
    REQUIRE(std::abs(std::exp(log_gamma(cx(-0.5, 0.0))) - cx(-2.0 * std::sqrt(pi), 0.0)) < 1e-12);
    REQUIRE_THROWS_AS(log_gamma(cx(0.0, 0.0)), pole_error);
    REQUIRE_THROWS_AS(log_gamma(cx(-3.0, 0.0)), pole_error);
}

TEST_CASE("log_gamma recurrence and conjugation across the plane") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        cx z(6.0 * ur(rng), 6.0 * ur(rng));
        if (std::abs(z.imag()) < 0.05 && z.real() < 0.6) continue; // keep off the cut
        cx g1 = log_gamma(z + 1.0);
        cx g0 = log_gamma(z);
        // Gamma(z+1) = z Gamma(z), modulo 2 pi i at log level
        cx diff = g1 - g0 - std::log(z);
        double frac = std::abs(std::remainder(diff.imag(), 2.0 * pi));
        REQUIRE(std::abs(diff.real()) < 1e-11);
        REQUIRE(frac < 1e-11);
        REQUIRE(std::abs(log_gamma(std::conj(z)) - std::conj(log_gamma(z))) < 1e-12);
    }
    // consistency at |z| ~ 40 against the recurrence-built value
    cx z(3.7, 2.1);
    cx acc = log_gamma(z);
    cx zz = z;
    for (int k = 0; k < 40; ++k) {
        acc += std::log(zz);
        zz += 1.0;
    }
    REQUIRE(std::abs(acc - log_gamma(zz)) / std::abs(log_gamma(zz)) < 1e-12);
}

TEST_CASE("log_barnes_g1 values") {
    REQUIRE(std::abs(log_barnes_g1(cx(0.0, 0.0))) < 1e-14);                 // G(1) = 1
    REQUIRE(std::abs(log_barnes_g1(cx(1.0, 0.0))) < 1e-13);                 // G(2) = 1
    REQUIRE(std::abs(log_barnes_g1(cx(3.0, 0.0)) - std::log(2.0)) < 1e-12); // G(4) = 2
    SECTION("series oracle at z = 0.5") {
        cx oracle = barnes_series_oracle(cx(0.5, 0.0));
        REQUIRE(std::abs(log_barnes_g1(cx(0.5, 0.0)) - oracle) < 1e-10);
    }
    SECTION("series oracle at complex points") {
        for (cx z : {cx(0.3, 0.4), cx(-0.2, 0.35), cx(0.45, -0.3)}) {
            cx oracle = barnes_series_oracle(z);
            REQUIRE(std::abs(log_barnes_g1(z) - oracle) < 1e-10);
        }
    }
}

TEST_CASE("barnes recurrence on the |z| <= 2 disk") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    int tested = 0;
    while (tested < 200) {
        cx z(2.0 * ur(rng), 2.0 * ur(rng));
        if (std::abs(z) > 2.0) continue;
        if (std::abs(z.imag()) < 0.02 && z.real() < 0.02) continue; // off the cut
        ++tested;
        cx lhs = log_barnes_g1(z + 1.0);                // log G(2+z)
        cx rhs = log_gamma(z + 1.0) + log_barnes_g1(z); // log Gamma(1+z) + log G(1+z)
        REQUIRE(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("barnes conjugation symmetry") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        cx z(1.8 * ur(rng), 1.8 * ur(rng));
        if (std::abs(z.imag()) < 0.05 && z.real() < 0.0) continue;
        REQUIRE(std::abs(log_barnes_g1(std::conj(z)) - std::conj(log_barnes_g1(z))) < 1e-10);
    }
}

TEST_CASE("barnes_pair") {
    REQUIRE(std::abs(barnes_pair(cx(0.0, 0.0), 1)) < 1e-14);
    REQUIRE(std::abs(barnes_pair(cx(0.0, 0.0), 2)) < 1e-13);
    SECTION("degenerate nu = -+1 at offset 1 flagged with a -inf sentinel") {
        REQUIRE(std::isinf(barnes_pair(cx(1.0, 0.0), 1).real()));
        REQUIRE(std::isinf(barnes_pair(cx(-1.0, 0.0), 1).real()));
        REQUIRE(barnes_pair(cx(1.0, 0.0), 1).real() < 0.0);
    }
    SECTION("G(2,Z) = Gamma(1+Z) Gamma(1-Z) G(1,Z)") {
        for (double zq : {0.3, 0.77, 1.2}) {
            cx lhs = barnes_pair(cx(zq, 0.0), 2);
            cx rhs = log_gamma(cx(1.0 + zq, 0.0)) + log_gamma(cx(1.0 - zq, 0.0)) + barnes_pair(cx(zq, 0.0), 1);
            REQUIRE(std::abs(lhs - rhs) < 1e-11);
        }
    }
}
