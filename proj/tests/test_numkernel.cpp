#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "apos/lattice.hpp"
#include "apos/numkernel.hpp"
#include "test_support.hpp"

using namespace apos;

namespace {

// Truncated Taylor series; independent of the Padé path.
ComplexMatrix exp_series(const ComplexMatrix& a, int terms = 80) {
    const auto n = a.rows();
    ComplexMatrix sum = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    for (int k = 1; k < terms; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("schur_decompose on triangular and nilpotent input") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    const SchurForm s = schur_decompose(d);
    CHECK(test::max_abs(s.triangular - d) < 1e-14);
    CHECK(test::max_abs(s.unitary.cwiseAbs() - RealMatrix::Identity(2, 2).cast<Complex>()) < 1e-14);

    const ComplexMatrix j = test::jordan2();
    const SchurForm sj = schur_decompose(j);
    CHECK(std::abs(sj.eigenvalue(0)) < 1e-14);
    CHECK(std::abs(sj.eigenvalue(1)) < 1e-14);
    CHECK(test::max_abs(sj.unitary * sj.triangular * sj.unitary.adjoint() - j) < 1e-14);
}

TEST_CASE("schur_decompose recovers the spectrum of spiral3") {
    const SchurForm s = schur_decompose(test::spiral3());
    std::vector<Complex> want = {{0, 0}, {-1, 1}, {-1, -1}};
    for (const auto& w : want) {
        double best = 1e9;
        for (Eigen::Index k = 0; k < 3; ++k) best = std::min(best, std::abs(s.eigenvalue(k) - w));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("schur reconstruction on random matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 12;
        const ComplexMatrix a = test::random_disk_matrix(n, rng);
        const SchurForm s = schur_decompose(a);
        const double err = test::max_abs(s.unitary * s.triangular * s.unitary.adjoint() - a);
        CHECK(err <= 1e-9 * n * std::max(1.0, spectral_norm(a)));
        CHECK(test::max_abs(s.unitary.adjoint() * s.unitary - ComplexMatrix::Identity(n, n)) < 1e-12);
        CHECK(test::max_abs(ComplexMatrix(s.triangular.triangularView<Eigen::StrictlyLower>())) == 0.0);
    }
}

TEST_CASE("eigenpairs satisfy their defining residuals") {
    std::mt19937_64 rng(5);
    const ComplexMatrix a = test::random_disk_matrix(8, rng);
    const SchurForm s = schur_decompose(a);
    for (Eigen::Index k = 0; k < 8; ++k) {
        const EigenPair ep = eigenpair(s, k);
        CHECK((a * ep.right - ep.value * ep.right).norm() <= 1e-10 * spectral_norm(a));
        CHECK((ep.left.adjoint() * a - ep.value * ep.left.adjoint()).norm() <= 1e-10 * spectral_norm(a) * ep.left.norm());
        CHECK(std::abs(ep.right.norm() - 1.0) < 1e-13);
        CHECK(std::abs(ep.left.dot(ep.right) - 1.0) < 1e-10);
    }
}

TEST_CASE("expm basic values") {
    CHECK(test::max_abs(expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)) == 0.0);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    const ComplexMatrix e = expm(d);
    CHECK(std::abs(e(0, 0) - std::exp(1.0)) < 1e-12);
    CHECK(std::abs(e(1, 1) - std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(e(0, 1)) < 1e-15);
}

TEST_CASE("expm of spiral3 matches the rotation-decay block and the series") {
    const double t = std::numbers::pi / 2;
    const ComplexMatrix e = expm(t * test::spiral3());
    const ComplexMatrix series = exp_series(t * test::spiral3());
    CHECK(test::max_abs(e - series) < 1e-12);
    const double decay = std::exp(-t);
    CHECK(std::abs(e(1, 1) - decay * std::cos(t)) < 1e-12);
    CHECK(std::abs(e(1, 2) + decay * std::sin(t)) < 1e-12);
    CHECK(std::abs(e(2, 1) - decay * std::sin(t)) < 1e-12);
    CHECK(std::abs(e(2, 2) - decay * std::cos(t)) < 1e-12);
    CHECK(std::abs(e(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("expm relative error against the series for small norms") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = test::random_disk_matrix(6, rng) * 0.5;
        const ComplexMatrix e = expm(a);
        CHECK(test::max_abs(e - exp_series(a)) <= 1e-9 * test::max_abs(e));
    }
}

TEST_CASE("expm of commuting sums factorizes") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix m = test::random_disk_matrix(5, rng);
        const ComplexMatrix a = 0.3 * m + 0.1 * m * m;
        const ComplexMatrix b = -0.2 * m * m * m + 0.5 * ComplexMatrix::Identity(5, 5);
        const ComplexMatrix lhs = expm(a + b);
        CHECK(test::max_abs(lhs - expm(a) * expm(b)) <= 1e-8 * std::max(1.0, test::max_abs(lhs)));
    }
}

TEST_CASE("semigroup law for sampled times") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a = test::random_disk_matrix(7, rng) * 2.0;
        const double t = 0.3 + 0.2 * trial;
        const ComplexMatrix et = expm(t * a);
        const double scale = std::pow(spectral_norm(et), 2);
        CHECK(spectral_norm(expm(2 * t * a) - et * et) <= 1e-8 * scale);
    }
}

TEST_CASE("expm rejects absurd norms") {
    ComplexMatrix a = ComplexMatrix::Identity(2, 2) * 1e305;
    CHECK_THROWS_AS(expm(a), NumericalFailure);
}

TEST_CASE("resolvent values and failures") {
    ComplexMatrix zero = ComplexMatrix::Zero(1, 1);
    CHECK(std::abs(resolvent(zero, 2.0)(0, 0) - 0.5) < 1e-15);

    const ComplexMatrix r = resolvent(test::spiral3(), 1.0);
    CHECK(std::abs(r(0, 0) - 1.0) < 1e-14);

    CHECK_THROWS_AS(resolvent(test::spiral3(), 0.0), NumericalFailure);
    try {
        resolvent(test::jordan2(), 0.0);
        FAIL("expected failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.where() == "resolvent");
    }
}

TEST_CASE("resolvent identity on random pairs") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = test::random_disk_matrix(6, rng);
        const Complex z1(uni(rng) + 4.0, uni(rng));
        const Complex z2(uni(rng) - 4.0, uni(rng));
        const ComplexMatrix r1 = resolvent(a, z1);
        const ComplexMatrix r2 = resolvent(a, z2);
        const double cond = spectral_norm(r1) * spectral_norm(r2);
        CHECK(test::max_abs(r1 - r2 - (z2 - z1) * r1 * r2) <= 1e-8 * std::max(1.0, cond));
    }
}

TEST_CASE("operator_norm for p in {1,2,inf}") {
    const auto ctx_inf = LatticeContext::sequence(2, Exponent::Inf);
    const auto ctx_one = LatticeContext::sequence(2, Exponent::One);
    const auto ctx_two = LatticeContext::sequence(3, Exponent::Two);
    CHECK(operator_norm(ComplexMatrix::Identity(2, 2), ctx_inf) == doctest::Approx(1.0));
    CHECK(operator_norm(ComplexMatrix::Identity(3, 3), ctx_two) == doctest::Approx(1.0));
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -4.0;
    CHECK(operator_norm(d, ctx_inf) == doctest::Approx(4.0));
    ComplexMatrix n = ComplexMatrix::Zero(2, 2);
    n(0, 1) = 2.0;
    CHECK(operator_norm(n, ctx_one) == doctest::Approx(2.0));

    // Weighted l^1: the norm of e_j is w_j, so ‖A‖ = max_j Σ_i w_i|a_ij| / w_j.
    LatticeContext w = ctx_one;
    w.weights << 1.0, 4.0;
    CHECK(operator_norm(n, w) == doctest::Approx(0.5));
    CHECK_THROWS_AS(operator_norm(ComplexMatrix::Identity(3, 3), ctx_inf), UsageError);
}

TEST_CASE("Propagator agrees with expm") {
    std::mt19937_64 rng(17);
    const ComplexMatrix a = test::random_disk_matrix(9, rng);
    const Propagator prop(a);
    CHECK(prop.diagonalized());
    for (double t : {0.0, 0.5, 3.0}) {
        CHECK(test::max_abs(prop.at(t) - expm(t * a)) < 1e-10 * std::max(1.0, test::max_abs(expm(t * a))));
    }
    const Propagator jordan(test::jordan2());
    CHECK_FALSE(jordan.diagonalized());
    CHECK(std::abs(jordan.at(2.0)(0, 1) - 2.0) < 1e-14);
}
