#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "apos/special.hpp"

using namespace apos;

namespace {

// Defining power series in extended precision.
long double series_j(int k, long double x) {
    long double term = 1.0L;
    for (int i = 1; i <= k; ++i) term *= x / (2.0L * i);
    long double sum = term;
    for (int m = 1; m < 50; ++m) {
        term *= -(x * x / 4.0L) / (static_cast<long double>(m) * (m + k));
        sum += term;
    }
    return sum;
}

long double series_i(int k, long double x) {
    long double term = 1.0L;
    for (int i = 1; i <= k; ++i) term *= x / (2.0L * i);
    long double sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= (x * x / 4.0L) / (static_cast<long double>(m) * (m + k));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("bessel_j trivial values") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    for (int k = 1; k <= 10; ++k) CHECK(bessel_j(k, 0.0) == 0.0);
    for (double x : {0.5, 1.0, 2.0}) CHECK(std::abs(bessel_j_prime(0, x) + bessel_j(1, x)) <= 1e-12);
}

TEST_CASE("bessel_j against the series oracle") {
    for (int k = 0; k <= 12; ++k) {
        for (double x = 0.05; x <= 20.0; x += 0.37) {
            const double ref = static_cast<double>(series_j(k, x));
            const double got = bessel_j(k, x);
            // Extended-precision cancellation limits the oracle to ~1e-12 absolute at x = 20.
            CHECK(std::abs(got - ref) <= 1e-10 * std::max(std::abs(ref), 1e-2));
        }
    }
}

TEST_CASE("bessel_i against the series oracle") {
    for (int k = 0; k <= 12; ++k) {
        for (double x = 0.05; x <= 20.0; x += 0.37) {
            const double ref = static_cast<double>(series_i(k, x));
            CHECK(std::abs(bessel_i(k, x) - ref) <= 1e-10 * std::abs(ref));
        }
    }
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(std::abs(bessel_i_prime(0, 1.3) - bessel_i(1, 1.3)) < 1e-14);
}

TEST_CASE("derivatives agree with central differences") {
    const double h = 1e-5;
    for (int k : {0, 1, 3, 7}) {
        for (double x : {0.7, 3.1, 9.4}) {
            const double fd_j = (bessel_j(k, x + h) - bessel_j(k, x - h)) / (2 * h);
            const double fd_i = (bessel_i(k, x + h) - bessel_i(k, x - h)) / (2 * h);
            CHECK(std::abs(bessel_j_prime(k, x) - fd_j) < 1e-8);
            CHECK(std::abs(bessel_i_prime(k, x) - fd_i) < 1e-8 * std::max(1.0, std::abs(fd_i)));
        }
    }
}

TEST_CASE("Wronskian-type identity has the classical sign") {
    // J_{k+1}/J_k increases between zeros of J_k, so the combination is negative.
    for (int k = 0; k <= 5; ++k) {
        for (double x = 0.1; x < 30.0; x += 0.5) {
            const double w = bessel_j(k + 1, x) * bessel_j_prime(k, x) - bessel_j(k, x) * bessel_j_prime(k + 1, x);
            const double j = bessel_j(k, x);
            const double j1 = bessel_j(k + 1, x);
            CHECK(w < 0.0);
            CHECK(std::abs(w - ((2.0 * k + 1.0) * j * j1 / x - j * j - j1 * j1)) < 1e-12);
        }
    }
}

TEST_CASE("bessel arguments out of range fail") {
    CHECK_THROWS_AS(bessel_j(61, 1.0), NumericalFailure);
    CHECK_THROWS_AS(bessel_j(0, -1.0), NumericalFailure);
    CHECK_THROWS_AS(bessel_j(0, 2e3), NumericalFailure);
    CHECK_THROWS_AS(bessel_i(0, 900.0), NumericalFailure);
    CHECK(std::isfinite(bessel_j(60, 1000.0)));
}

TEST_CASE("bessel zeros") {
    CHECK(std::abs(bessel_zero(0, 1) - 2.404825557695773) < 1e-9);
    CHECK(std::abs(bessel_zero(1, 1) - 3.831705970207512) < 1e-9);
    CHECK(std::abs(bessel_zero(0, 3) - 8.653727912911013) < 1e-9);
    for (int k = 0; k < 10; ++k) CHECK(bessel_zero(k, 1) < bessel_zero(k + 1, 1));
    for (int k : {0, 2, 5, 17, 40, 60})
        for (int l : {1, 2, 5, 20}) CHECK(std::abs(bessel_j(k, bessel_zero(k, l))) <= 1e-12);
    CHECK_THROWS_AS(bessel_zero(0, 21), NumericalFailure);
}

TEST_CASE("count_roots examples") {
    const CharFunction id{"identity", [](Complex z) { return z; }, [](Complex) { return Complex(1.0, 0.0); }};
    CHECK(count_roots(id, {-1, 1, -1, 1}) == 1);
    const CharFunction cube{"cube", [](Complex z) { return z * z * z - 1.0; }, [](Complex z) { return 3.0 * z * z; }};
    CHECK(count_roots(cube, {-2, 2, -2, 2}) == 3);
    CHECK(count_roots(cube, {0.5, 2, -0.5, 0.5}) == 1);

    CHECK(count_roots(delay_characteristic(), {-0.01, 2.0, -60.0, 60.0}) == 1);
    CHECK_THROWS_AS(count_roots(id, {0.0, 1.0, -1.0, 1.0}), NumericalFailure);
}

TEST_CASE("network characteristic roots near the imaginary axis") {
    const CharFunction f = network_characteristic(std::sqrt(2.0));
    // Roots at −0.0142 ± 31.23i and −0.0848 ± 13.02i sit inside Re > −0.05.
    CHECK(count_roots(f, {-0.05, 1.0, -40.0, 40.0}) == 3);
    CHECK(count_roots(f, {-0.01, 1.0, -40.0, 40.0}) == 1);
    const RootSet rs = find_roots(f, {-0.05, 1.0, -40.0, 40.0});
    CHECK_FALSE(rs.mismatch);
    REQUIRE(rs.roots.size() == 3);
    CHECK(std::abs(rs.roots[0].value) < 1e-11);
    for (const Complex want : {Complex(-0.014233, 31.2305), Complex(-0.014233, -31.2305)}) {
        const bool found = std::any_of(rs.roots.begin(), rs.roots.end(),
                                       [&](const RefinedRoot& r) { return std::abs(r.value - want) < 1e-4; });
        CHECK(found);
    }
}

TEST_CASE("count_roots is additive under subdivision") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    const CharFunction f = delay_characteristic();
    for (int trial = 0; trial < 6; ++trial) {
        const double x0 = uni(rng) - 0.5, y0 = uni(rng) * 3.0;
        const Rect r{x0, x0 + 2.3 + std::abs(uni(rng)), y0, y0 + 5.1 + std::abs(uni(rng))};
        int parts = 0;
        for (const Rect& q : r.split()) parts += count_roots(f, q);
        CHECK(count_roots(f, r) == parts);
    }
}

TEST_CASE("refine_roots examples") {
    const CharFunction h = delay_characteristic();
    const RootSet rs = refine_roots(h, {-0.01, 2.0, -60.0, 60.0}, {Complex(0.1, 0.05), Complex(0.3, -0.2)});
    REQUIRE(rs.roots.size() == 1);
    CHECK(std::abs(rs.roots[0].value) <= 1e-11);
    CHECK(rs.count_by_argument == 1);
    CHECK_FALSE(rs.mismatch);

    const CharFunction s = network_characteristic(std::sqrt(2.0));
    CHECK(std::abs(s(0.0)) == 0.0);

    const double j01 = bessel_zero(0, 1);
    const CharFunction b = bose_characteristic(0, 1.0);
    const RootSet br = find_roots(b, {0.0, j01 * j01, -1.0, 1.0});
    REQUIRE(br.roots.size() == 1);
    CHECK(br.roots[0].value.real() > 0.0);
    CHECK(br.roots[0].value.real() < j01 * j01);
    CHECK_FALSE(br.mismatch);
    CHECK(std::abs(bose_first_root(0, 1.0) - br.roots[0].value.real()) < 1e-10);
}

TEST_CASE("refine_roots keeps non-convergent seeds as rejected") {
    const CharFunction h = delay_characteristic();
    const RootSet rs = refine_roots(h, {-0.01, 2.0, -2.0, 2.0}, {Complex(0.01, 0.0), Complex(-5.0, 40.0)});
    CHECK(rs.roots.size() == 1);
    CHECK(rs.rejected.size() == 1);
}

TEST_CASE("characteristic derivatives are consistent with central differences") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    const double h = 1e-6;
    for (const CharFunction& f : {delay_characteristic(), network_characteristic(std::sqrt(2.0))}) {
        for (int i = 0; i < 20; ++i) {
            const Complex z(uni(rng), 10.0 * uni(rng));
            const Complex fd = (f(z + h) - f(z - h)) / (2.0 * h);
            CHECK(std::abs(fd - f.derivative(z)) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
    const CharFunction b = bose_characteristic(2, 0.7);
    for (double x : {0.5, 3.0, 20.0}) {
        const Complex fd = (b(x + h) - b(x - h)) / (2.0 * h);
        CHECK(std::abs(fd - b.derivative(x)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}
