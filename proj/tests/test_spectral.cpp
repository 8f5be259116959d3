#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "apos/spectral.hpp"
#include "test_support.hpp"

using namespace apos;

namespace {

ComplexMatrix diag01() { return test::diag({0.0, -1.0}); }

// Random matrix with prescribed, well separated eigenvalues.
ComplexMatrix random_with_spectrum(const std::vector<Complex>& eigs, std::mt19937_64& rng) {
    const int n = static_cast<int>(eigs.size());
    ComplexMatrix v = test::random_disk_matrix(n, rng) + 2.0 * ComplexMatrix::Identity(n, n);
    ComplexVector d(n);
    for (int i = 0; i < n; ++i) d(i) = eigs[static_cast<std::size_t>(i)];
    return v * d.asDiagonal() * v.inverse();
}

// Block diagonal Jordan structure: blocks of sizes {3,1} at 0 and {2} at −1.
ComplexMatrix jordan_structure() {
    ComplexMatrix j = ComplexMatrix::Zero(6, 6);
    j(0, 1) = 1.0;
    j(1, 2) = 1.0;
    j(4, 4) = -1.0;
    j(5, 5) = -1.0;
    j(4, 5) = 1.0;
    return j;
}

}  // namespace

TEST_CASE("spectrum_report on diag(0,-1)") {
    const SpectrumReport r = spectrum_report(diag01());
    REQUIRE(r.clusters.size() == 2);
    CHECK(std::abs(r.spectral_bound) < 1e-14);
    CHECK(r.dominant);
    CHECK(r.clusters[0].pole_order == 1);
    CHECK(r.clusters[1].pole_order == 1);
    CHECK(r.dominance_margin == doctest::Approx(1.0));
    CHECK_FALSE(r.ambiguous_clustering);
}

TEST_CASE("spectrum_report on a Jordan block") {
    const SpectrumReport r = spectrum_report(test::jordan2());
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].algebraic_multiplicity == 2);
    CHECK(r.clusters[0].geometric_multiplicity == 1);
    CHECK(r.clusters[0].pole_order == 2);
    CHECK_FALSE(r.clusters[0].semisimple());
    CHECK(r.dominance_margin == std::numeric_limits<double>::infinity());
}

TEST_CASE("spectrum_report on spiral3") {
    const SpectrumReport r = spectrum_report(test::spiral3());
    REQUIRE(r.clusters.size() == 3);
    CHECK(std::abs(r.spectral_bound) < 1e-12);
    CHECK(r.dominant);
    CHECK(r.dominance_margin == doctest::Approx(1.0));
    REQUIRE(r.peripheral.size() == 1);
    CHECK(std::abs(r.clusters[r.peripheral[0]].center) < 1e-12);
    REQUIRE(r.leading_real_cluster().has_value());
}

TEST_CASE("complex peripheral pair is not dominant") {
    const SpectrumReport r = spectrum_report(test::diag({Complex(0, 1), Complex(0, -1), -2.0}));
    CHECK(r.peripheral.size() == 2);
    CHECK_FALSE(r.dominant);
}

TEST_CASE("nearby clusters set the ambiguity flag") {
    const SpectrumReport r = spectrum_report(test::diag({0.0, 1.5e-7, -1.0}));
    CHECK(r.ambiguous_clustering);
}

TEST_CASE("multiplicities are invariant under similarity") {
    std::mt19937_64 rng(31);
    const ComplexMatrix j = jordan_structure();
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix s = test::random_disk_matrix(6, rng) + 3.0 * ComplexMatrix::Identity(6, 6);
        const ComplexMatrix a = s * j * s.inverse();
        // Defective eigenvalues split by O(eps^{1/k}); widen the cluster radius accordingly.
        const SpectrumReport r = spectrum_report(a, 1e-3);
        REQUIRE(r.clusters.size() == 2);
        const auto& c0 = r.clusters[r.nearest_cluster(0.0)];
        const auto& c1 = r.clusters[r.nearest_cluster(-1.0)];
        CHECK(c0.algebraic_multiplicity == 4);
        CHECK(c0.geometric_multiplicity == 2);
        CHECK(c0.pole_order == 3);
        CHECK(c1.algebraic_multiplicity == 2);
        CHECK(c1.geometric_multiplicity == 1);
        CHECK(c1.pole_order == 2);
    }
}

TEST_CASE("spectral_projection examples") {
    const ComplexMatrix a = diag01();
    const SpectrumReport r = spectrum_report(a);
    const ProjectionData p = spectral_projection(a, r, r.nearest_cluster(0.0));
    CHECK(test::max_abs(p.P - test::diag({1.0, 0.0})) < 1e-14);
    CHECK(p.method == ProjectionData::Method::EigenDyad);

    const ComplexMatrix s3 = test::spiral3();
    const SpectrumReport rs = spectrum_report(s3);
    const ProjectionData ps = spectral_projection(s3, rs, rs.nearest_cluster(0.0));
    CHECK(test::max_abs(ps.P - test::diag({1.0, 0.0, 0.0})) < 1e-12);
    CHECK(ps.residual < 1e-12);
}

TEST_CASE("spectral_projection for a defective cluster uses the Sylvester route") {
    std::mt19937_64 rng(41);
    const ComplexMatrix j = jordan_structure();
    const ComplexMatrix s = test::random_disk_matrix(6, rng) + 3.0 * ComplexMatrix::Identity(6, 6);
    const ComplexMatrix a = s * j * s.inverse();
    const SpectrumReport r = spectrum_report(a, 1e-3);
    const std::size_t k = r.nearest_cluster(0.0);
    const ProjectionData p = spectral_projection(a, r, k);
    CHECK(p.method == ProjectionData::Method::SchurSylvester);
    // Exact projection for the similar Jordan form.
    ComplexMatrix pj = ComplexMatrix::Zero(6, 6);
    for (int i = 0; i < 4; ++i) pj(i, i) = 1.0;
    const ComplexMatrix exact = s * pj * s.inverse();
    CHECK(test::max_abs(p.P - exact) < 1e-6 * test::max_abs(exact));
    const ComplexMatrix contour = projection_by_contour(a, 0.0, 0.5, 256);
    CHECK(test::max_abs(p.P - contour) < 1e-6 * test::max_abs(exact));
}

TEST_CASE("spectral_projection refuses clusters that are not isolated") {
    const ComplexMatrix a = test::diag({0.0, 3e-7, -1.0});
    const SpectrumReport r = spectrum_report(a);
    CHECK_THROWS_AS(spectral_projection(a, r, r.nearest_cluster(0.0)), NumericalFailure);
}

TEST_CASE("projection_by_contour examples") {
    CHECK(test::max_abs(projection_by_contour(diag01(), 0.0, 0.4, 64) - test::diag({1.0, 0.0})) < 1e-10);

    const ComplexMatrix s3 = test::spiral3();
    const SpectrumReport rs = spectrum_report(s3);
    const ComplexMatrix p = spectral_projection(s3, rs, rs.nearest_cluster(0.0)).P;
    CHECK(test::max_abs(projection_by_contour(s3, 0.0, 0.5, 128) - p) < 1e-8);

    CHECK(test::max_abs(projection_by_contour(test::jordan2(), 0.0, 1.0, 64) - ComplexMatrix::Identity(2, 2)) <
          1e-10);
    CHECK_THROWS_AS(projection_by_contour(diag01(), 0.0, 1.0, 64), NumericalFailure);
}

TEST_CASE("projection_by_abel examples") {
    const ComplexMatrix p = projection_by_abel(diag01(), 0.0, 6);
    CHECK(std::abs(p(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(p(1, 1)) < 2e-6);
    CHECK(std::abs(projection_by_abel(test::spiral3(), 0.0, 8)(0, 0) - 1.0) < 1e-7);
    CHECK(test::max_abs(projection_by_abel(test::jordan2(), 0.0, 6)) > 1e5);
}

TEST_CASE("projection_by_power examples") {
    const ComplexMatrix p = projection_by_power(diag01(), 1.0, 30);
    CHECK(std::abs(p(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(p(1, 1) - std::ldexp(1.0, -30)) < 1e-18);

    const ComplexMatrix s3 = test::spiral3();
    CHECK(test::max_abs(projection_by_power(s3, 1.0, 60) - test::diag({1.0, 0.0, 0.0})) < 1e-8);

    const ComplexMatrix shifted_identity = ComplexMatrix::Identity(3, 3) - ComplexMatrix::Identity(3, 3);
    CHECK(test::max_abs(projection_by_power(shifted_identity, 1.0, 1) - ComplexMatrix::Identity(3, 3)) < 1e-15);
    CHECK_THROWS_AS(projection_by_power(test::diag({1.0, -1.0}), 0.75, 200), NumericalFailure);
}

TEST_CASE("abel_growth_check examples") {
    const auto ctx2 = LatticeContext::sequence(2, Exponent::Two);
    const AbelGrowth g = abel_growth_check(diag01(), 0.0, ctx2, 6, 1);
    CHECK(g.bounded);
    CHECK(g.values.back() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(g.consistent_with_pole_order.value());

    const AbelGrowth gj = abel_growth_check(test::jordan2(), 0.0, ctx2, 6, 2);
    CHECK_FALSE(gj.bounded);
    CHECK(gj.consistent_with_pole_order.value());
    for (std::size_t j = 1; j < gj.values.size(); ++j)
        CHECK(gj.values[j] / gj.values[j - 1] == doctest::Approx(10.0).epsilon(0.05));

    CHECK(abel_growth_check(test::spiral3(), 0.0, LatticeContext::sequence(3, Exponent::Two), 6).bounded);
}

TEST_CASE("pole order from rank tests matches Abel growth slope") {
    std::mt19937_64 rng(51);
    for (int m = 1; m <= 3; ++m) {
        ComplexMatrix j = ComplexMatrix::Zero(4, 4);
        for (int i = 0; i + 1 < m; ++i) j(i, i + 1) = 1.0;
        for (int i = m; i < 4; ++i) j(i, i) = -1.0 - i;
        const ComplexMatrix s = test::random_disk_matrix(4, rng) + 3.0 * ComplexMatrix::Identity(4, 4);
        const ComplexMatrix a = s * j * s.inverse();
        const SpectrumReport r = spectrum_report(a, 1e-3);
        const int pole = r.clusters[r.nearest_cluster(0.0)].pole_order;
        CHECK(pole == m);
        const AbelGrowth g = abel_growth_check(a, 0.0, LatticeContext::sequence(4, Exponent::Two), 4, pole);
        const std::size_t last = g.values.size() - 1;
        const double slope = std::log10(g.values[last] / g.values[last - 1]);
        CHECK(slope == doctest::Approx(static_cast<double>(m - 1)).epsilon(0.05));
        CHECK(g.consistent_with_pole_order.value());
    }
}

TEST_CASE("contour and Sylvester projections agree on random separated spectra") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 9;
        std::vector<Complex> eigs;
        for (int i = 0; i < n; ++i) eigs.emplace_back(-2.0 * i + 0.3 * uni(rng), 0.3 * uni(rng));
        const ComplexMatrix a = random_with_spectrum(eigs, rng);
        const SpectrumReport r = spectrum_report(a);
        REQUIRE(r.clusters.size() == static_cast<std::size_t>(n));
        ComplexMatrix sum = ComplexMatrix::Zero(n, n);
        for (std::size_t k = 0; k < r.clusters.size(); ++k) {
            const ProjectionData p = spectral_projection(a, r, k);
            const ComplexMatrix c = projection_by_contour(a, r.clusters[k].center, 0.6, 256);
            CHECK(test::max_abs(p.P - c) < 1e-7 * std::max(1.0, test::max_abs(p.P)));
            sum += p.P;
        }
        CHECK(test::max_abs(sum - ComplexMatrix::Identity(n, n)) < 1e-8);
    }
}

TEST_CASE("resolution of identity with repeated eigenvalues") {
    std::mt19937_64 rng(71);
    const ComplexMatrix j = jordan_structure();
    const ComplexMatrix s = test::random_disk_matrix(6, rng) + 3.0 * ComplexMatrix::Identity(6, 6);
    const ComplexMatrix a = s * j * s.inverse();
    const SpectrumReport r = spectrum_report(a, 1e-3);
    const ComplexMatrix sum = spectral_projection_sum(a, r, {0, 1});
    CHECK(test::max_abs(sum - ComplexMatrix::Identity(6, 6)) < 1e-8);
}
