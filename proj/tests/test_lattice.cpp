#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "apos/lattice.hpp"
#include "test_support.hpp"

using namespace apos;

namespace {

// Per-coordinate brute-force minimization of |f_i − q| over q ≥ 0.
double residual_brute(Complex f) {
    double best = std::abs(f);
    for (int k = 0; k <= 20000; ++k) {
        const double q = 0.001 * k;
        best = std::min(best, std::abs(f - q));
    }
    return best;
}

}  // namespace

TEST_CASE("dist_to_cone examples") {
    ComplexVector f(3);
    f << 1.0, 2.0, 3.0;
    CHECK(dist_to_cone(f, LatticeContext::sequence(3, Exponent::Two)) == 0.0);

    ComplexVector g(3);
    g << -1.0, 0.0, 0.0;
    CHECK(dist_to_cone(g, LatticeContext::sequence(3, Exponent::Inf)) == doctest::Approx(1.0));

    ComplexVector h(1);
    h << Complex(0.0, 1.0);
    CHECK(dist_to_cone(h, LatticeContext::sequence(1, Exponent::Two)) == doctest::Approx(residual_brute(h(0))));
    CHECK(dist_to_cone(h, LatticeContext::sequence(1, Exponent::Two)) == doctest::Approx(1.0));
}

TEST_CASE("dist_to_cone coordinate residual matches brute force") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const Complex z(uni(rng), uni(rng));
        ComplexVector f(1);
        f << z;
        CHECK(dist_to_cone(f, LatticeContext::sequence(1, Exponent::One)) ==
              doctest::Approx(residual_brute(z)).epsilon(1e-5));
    }
}

TEST_CASE("dist_to_cone properties") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (Exponent p : {Exponent::One, Exponent::Two, Exponent::Inf}) {
        LatticeContext ctx = LatticeContext::sequence(6, p);
        for (int i = 0; i < 6; ++i) ctx.weights(i) = 0.5 + 0.25 * i;
        for (int trial = 0; trial < 200; ++trial) {
            ComplexVector f(6), g(6);
            for (int i = 0; i < 6; ++i) {
                f(i) = Complex(uni(rng), uni(rng));
                g(i) = Complex(uni(rng), uni(rng));
            }
            // 1-Lipschitz
            CHECK(std::abs(dist_to_cone(f, ctx) - dist_to_cone(g, ctx)) <= ctx.norm(f - g) + 1e-14);
            // Monotone for real vectors: f ≤ g ⟹ d₊(f) ≥ d₊(g)
            const RealVector fr = f.real();
            const RealVector gr = fr + RealVector(g.real().cwiseAbs());
            CHECK(dist_to_cone(fr.cast<Complex>(), ctx) >= dist_to_cone(gr.cast<Complex>(), ctx) - 1e-15);
            // zero iff real part nonnegative and imaginary part zero
            ComplexVector pos = ComplexVector(f.real().cwiseAbs().cast<Complex>());
            CHECK(dist_to_cone(pos, ctx) == 0.0);
        }
    }
}

TEST_CASE("gauge_norm examples and embedding bound") {
    auto ctx = LatticeContext::sequence(2, Exponent::Two);
    RealVector u(2);
    u << 1.0, 2.0;
    ctx = ctx.with_u(u);
    CHECK(gauge_norm(u.cast<Complex>(), ctx) == doctest::Approx(1.0));
    ComplexVector f(2);
    f << 2.0, 6.0;
    CHECK(gauge_norm(f, ctx) == doctest::Approx(3.0));

    RealVector u2(2);
    u2 << 0.0, 1.0;
    const auto ctx2 = LatticeContext::sequence(2, Exponent::Inf).with_u(u2);
    ComplexVector e1(2);
    e1 << 1.0, 0.0;
    CHECK(gauge_norm(e1, ctx2) == std::numeric_limits<double>::infinity());

    CHECK_THROWS_AS(gauge_norm(f, LatticeContext::sequence(2, Exponent::Two)), UsageError);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (Exponent p : {Exponent::One, Exponent::Two, Exponent::Inf}) {
        RealVector uu(5);
        for (int i = 0; i < 5; ++i) uu(i) = 0.1 + std::abs(uni(rng));
        auto c = LatticeContext::sequence(5, p).with_u(uu);
        for (int t = 0; t < 100; ++t) {
            ComplexVector g(5);
            for (int i = 0; i < 5; ++i) g(i) = Complex(uni(rng), uni(rng));
            CHECK(c.norm(g) <= gauge_norm(g, c) * c.norm(uu.cast<Complex>()) * (1 + 1e-14));
        }
    }
}

TEST_CASE("strong_positivity examples") {
    const auto ctx = LatticeContext::ones(2, Exponent::Inf);
    RealVector f(2);
    f << 2.0, 3.0;
    auto cert = strong_positivity(f, ctx);
    CHECK(cert.constant == doctest::Approx(2.0));
    CHECK(cert.strongly_positive());
    CHECK(cert.witness_index == 0);

    auto self = strong_positivity(RealVector(RealVector::Ones(2)), ctx);
    CHECK(self.constant == doctest::Approx(1.0));

    RealVector z(2);
    z << 1.0, 0.0;
    auto zc = strong_positivity(z, ctx);
    CHECK(zc.constant == 0.0);
    CHECK_FALSE(zc.strongly_positive());
    CHECK(zc.witness_index == 1);

    ComplexVector c(2);
    c << Complex(1.0, 0.5), 1.0;
    CHECK_THROWS_AS(strong_positivity(c, ctx), NumericalFailure);
}

TEST_CASE("strong_positivity constant is maximal") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        RealVector u(6), f(6);
        for (int i = 0; i < 6; ++i) {
            u(i) = 0.1 + uni(rng);
            f(i) = uni(rng) - 0.2;
        }
        const auto ctx = LatticeContext::sequence(6, Exponent::Two).with_u(u);
        const auto cert = strong_positivity(f, ctx);
        CHECK((f - cert.constant * u).minCoeff() >= -1e-14);
        CHECK((f - (cert.constant + 1e-9) * u).minCoeff() < 0.0);
    }
}

TEST_CASE("operator_strong_positivity examples") {
    const Eigen::Index n = 4;
    RealVector u(n);
    u << 1.0, 2.0, 3.0, 0.5;
    const auto ctx = LatticeContext::sequence(n, Exponent::Two).with_u(u);
    const ComplexMatrix rank_one = (u * RealVector::Ones(n).transpose()).cast<Complex>();
    const auto c1 = operator_strong_positivity(rank_one, ctx);
    CHECK(c1.strongly_positive());
    CHECK(c1.entrywise_positive);
    // T f = u·Σf ≥ κ·avg(f)·u with κ = n.
    CHECK(c1.constant == doctest::Approx(static_cast<double>(n)));

    const auto ones = LatticeContext::ones(n, Exponent::Inf);
    const auto id = operator_strong_positivity(ComplexMatrix::Identity(n, n), ones);
    CHECK(id.entrywise_positive);
    CHECK_FALSE(id.strongly_positive());

    ComplexMatrix p = ComplexMatrix::Zero(3, 3);
    p(0, 0) = 1.0;
    const auto pc = operator_strong_positivity(p, LatticeContext::ones(3, Exponent::Inf));
    CHECK(pc.entrywise_positive);
    CHECK_FALSE(pc.strongly_positive());

    ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
    neg(0, 1) = -0.5;
    const auto nc = operator_strong_positivity(neg, LatticeContext::ones(2, Exponent::Inf));
    CHECK(nc.kind == PositivityCertificate::Kind::NotPositive);
    CHECK_THROWS_AS(operator_strong_positivity(neg, LatticeContext::ones(3, Exponent::Inf)), UsageError);
}

TEST_CASE("LatticeContext validation") {
    auto ctx = LatticeContext::sequence(3, Exponent::One);
    ctx.weights(1) = 0.0;
    CHECK_THROWS_AS(ctx.validate(), UsageError);
    RealVector bad(3);
    bad << 1.0, -1.0, 1.0;
    CHECK_THROWS_AS(LatticeContext::sequence(3, Exponent::One).with_u(bad), UsageError);
    RealVector half(3);
    half << 1.0, 0.0, 1.0;
    CHECK_FALSE(LatticeContext::sequence(3, Exponent::One).with_u(half).has_quasi_interior_u());
    CHECK(exponent_from_string("inf") == Exponent::Inf);
    CHECK_THROWS_AS(exponent_from_string("3"), UsageError);
}
