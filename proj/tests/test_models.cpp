#include <doctest.h>

#include <cmath>
#include <numbers>

#include "apos/models.hpp"
#include "apos/numkernel.hpp"
#include "apos/spectral.hpp"
#include "test_support.hpp"

using namespace apos;
using apos::test::max_abs;

namespace {

void check_oracles(const ModelBundle& m) {
    INFO(m.name);
    const double scale = std::max(1.0, max_abs(m.A));
    if (m.oracles.semigroup) {
        for (double t : {0.0, 0.1, 1.0, 5.0}) {
            const ComplexMatrix diff = m.oracles.semigroup(t) - expm(t * m.A);
            CHECK(max_abs(diff) <= 1e-8);
        }
    }
    if (m.oracles.resolvent) {
        for (Complex z : {Complex(0.5, 1.0), Complex(2.0, 0.0), Complex(0.3, -4.0)}) {
            const ComplexMatrix diff = m.oracles.resolvent(z) - resolvent(m.A, z);
            CHECK(max_abs(diff) <= 1e-8 * std::max(1.0, max_abs(resolvent(m.A, z))));
        }
    }
    for (const RealVector& w : m.oracles.conserved_functionals) {
        const ComplexVector wa = m.A.transpose() * w.cast<Complex>();
        CHECK(wa.cwiseAbs().maxCoeff() <= 1e-10 * scale * w.cwiseAbs().maxCoeff() * static_cast<double>(w.size()));
    }
}

double leading_real_part(const ComplexMatrix& a) { return spectrum_report(a).spectral_bound; }

}  // namespace

TEST_CASE("closed-form oracles agree with the numerical kernels") {
    check_oracles(spiral3());
    check_oracles(reflection_lp(16, Exponent::Two));
    check_oracles(reflection_lp(16, Exponent::One));
    check_oracles(make_model("shifted_direct_sum"));
    check_oracles(dtn_disk(0.0, 10));
    check_oracles(dtn_disk(3.0, 10));
    check_oracles(dtn_disk(-2.0, 10));
    check_oracles(bose_disk({1.0, 0.5}, 10));
    check_oracles(truncated_tower(4, TowerVariant::B));
    check_oracles(truncated_tower(4, TowerVariant::C));
}

TEST_CASE("stock inner matrix spectrum") {
    const SpectrumReport r = spectrum_report(stock_eventually_positive_inner());
    REQUIRE(r.clusters.size() == 3);
    CHECK(std::abs(r.clusters[0].center) < 1e-12);
    CHECK(std::abs(r.clusters[1].center.real() + 1.0) < 1e-12);
    CHECK(std::abs(std::abs(r.clusters[1].center.imag()) - 3.0) < 1e-12);
    CHECK(resolvent(stock_eventually_positive_inner(), 1.0).real().minCoeff() >= 0.0);
    CHECK_THROWS_AS(shifted_direct_sum(stock_eventually_positive_inner(), 1.0), NumericalFailure);
}

TEST_CASE("reflection generator") {
    const ModelBundle m = reflection_lp(32, Exponent::Two);
    REQUIRE(m.profile);
    CHECK(m.profile->minCoeff() > 0.0);
    CHECK(m.A.real().minCoeff() < 0.0);
    CHECK(std::abs(leading_real_part(m.A)) < 1e-12);
    CHECK_THROWS_AS(reflection_lp(7, Exponent::Two), UsageError);
}

TEST_CASE("fourth-order models approximate the continuum spectrum") {
    const double pi4 = std::pow(std::numbers::pi, 4);
    CHECK(std::abs(leading_real_part(dirichlet_laplacian_sq_1d(64).A) + pi4) < 1e-2 * pi4);
    // First clamped-beam eigenvalue (4.730040745)^4.
    const double beam = std::pow(4.730040744862704, 4);
    const ModelBundle b = bilaplacian_clamped_1d(100);
    CHECK(max_abs(ComplexMatrix(b.A - b.A.transpose())) == 0.0);
    CHECK(std::abs(spectrum_report(b.A, b.tol_cluster).spectral_bound + beam) < 2e-2 * beam);
}

TEST_CASE("nonlocal Robin constructions") {
    const ModelBundle ones = nonlocal_robin_ones(100);
    // Constant functions decay only through the boundary coupling.
    CHECK(leading_real_part(ones.A) < 0.0);
    const ModelBundle t = nonlocal_robin_thermostat(100, 0.0);
    CHECK(t.A.real().minCoeff() <= 0.0);
    CHECK(std::abs(t.A.real().rowwise().sum().maxCoeff()) < 1e-9);
    CHECK(std::abs(leading_real_part(t.A)) < 1e-9);
    CHECK_THROWS_AS(nonlocal_robin_1d(8, 1.0, RealMatrix::Ones(2, 2)), UsageError);
}

TEST_CASE("Dirichlet-to-Neumann symbol") {
    for (int k = 0; k <= 5; ++k) {
        CHECK(dtn_symbol(k, 0.0) == doctest::Approx(k));
        CHECK(std::abs(dtn_symbol(k, 1e-7) - k) < 1e-6);
        CHECK(std::abs(dtn_symbol(k, -1e-7) - k) < 1e-6);
    }
    CHECK(dtn_condition(0.0, 32));
    CHECK(dtn_condition(-5.0, 32));
    const double j01 = bessel_zero(0, 1);
    CHECK_THROWS_AS(dtn_symbol(0, j01 * j01), NumericalFailure);
    CHECK_FALSE(dtn_condition(j01 * j01 + 0.5, 32));
    const ModelBundle m = dtn_disk(0.0, 16);
    CHECK(std::abs(leading_real_part(m.A)) < 1e-12);
    CHECK(m.oracles.conserved_functionals.size() == 1);
}

TEST_CASE("Beurling-Deny values") {
    CHECK(std::abs(beurling_deny_value({1.0}, 1) - 2.0 / std::numbers::pi) < 1e-12);
    CHECK(std::abs(beurling_deny_value({1.0, 0.5}, 1) - 0.24392) < 1e-5);
    for (const auto& q : std::vector<std::vector<double>>{{1.0, 0.5}, {1.0, 0.3, 0.2}, {0.5, 1.0, 0.0, 0.7}}) {
        for (int m = 1; m < static_cast<int>(q.size()); ++m) {
            CHECK(std::abs(beurling_deny_quadrature(q, m) - beurling_deny_value(q, m)) < 1e-6);
        }
    }
    CHECK_THROWS_AS(beurling_deny_value({1.0}, 0), UsageError);
}

TEST_CASE("Bose analysis") {
    const BoseAnalysis a = bose_analysis({1.0}, 8);
    REQUIRE(a.lambda_k1.size() == 9);
    CHECK(a.dominant);
    CHECK(a.violating_m == 1);
    for (double r : a.residuals) CHECK(r < 1e-10);
    CHECK(a.lambda1 > 0.0);
    CHECK(a.lambda1 < std::pow(bessel_zero(0, 1), 2));
    const BoseAnalysis b = bose_analysis({0.1, 4.0}, 4);
    CHECK(b.beurling_deny[0] < 0.0);
    CHECK_FALSE(b.violating_m);
    CHECK_FALSE(make_model("bose_disk").predicted.positive.value());
    CHECK_THROWS_AS(bose_analysis({0.0}, 4), UsageError);
}

TEST_CASE("tower truncations") {
    const int n = 6;
    const SpectrumReport a = spectrum_report(truncated_tower(n, TowerVariant::A).A);
    CHECK(a.peripheral.size() == 2);
    for (TowerVariant v : {TowerVariant::B, TowerVariant::C}) {
        const SpectrumReport r = spectrum_report(truncated_tower(n, v).A);
        CHECK(std::abs(r.spectral_bound) < 1e-12);
        CHECK(r.dominant);
        CHECK(std::abs(r.dominance_margin - 1.0 / n) < 1e-9);
    }
}

TEST_CASE("make_model registry") {
    for (const auto& name : model_names()) CHECK_NOTHROW(make_model(name, name == "delay" ? ModelParams{{"cells", 10}} : ModelParams{}));
    CHECK_THROWS_AS(make_model("nope"), UsageError);
    CHECK_THROWS_AS(make_model("spiral3", {{"N", 3}}), UsageError);
    CHECK_THROWS_AS(make_model("reflection_lp", {{"N", 10.5}}), UsageError);
    CHECK(make_model("bose_disk", {{"q0", 1.0}, {"q2", 0.5}, {"K", 8}}).params.at("q1") == 0.0);
    CHECK(make_model("delay").simulator_backed());
    CHECK(make_model("network_flow").characteristic.has_value());
    for (const auto& m : matrix_models()) {
        CHECK_FALSE(m.simulator_backed());
        CHECK(m.ctx.n == m.A.rows());
        CHECK_NOTHROW(m.ctx.validate());
    }
}
