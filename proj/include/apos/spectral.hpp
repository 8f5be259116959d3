#pragma once

// Spectral structure of a dense generator: clustered eigenvalues with
// multiplicities and pole orders, spectral bound, peripheral spectrum,
// dominance, and spectral projections computed along independent routes.

#include <optional>
#include <string>
#include <vector>

#include "apos/lattice.hpp"
#include "apos/numkernel.hpp"

namespace apos {

struct EigenvalueCluster {
    Complex center;
    std::vector<Eigen::Index> members;  // indices into the Schur diagonal
    int algebraic_multiplicity = 1;
    int geometric_multiplicity = 1;
    int pole_order = 1;

    bool semisimple() const { return pole_order == 1; }
};

struct SpectrumReport {
    std::vector<EigenvalueCluster> clusters;  // sorted by descending real part
    double spectral_bound = 0.0;
    std::vector<std::size_t> peripheral;
    bool dominant = false;
    double dominance_margin = 0.0;  // +inf when every cluster is peripheral
    bool ambiguous_clustering = false;
    double tol_cluster = 0.0;
    double norm = 0.0;  // ‖A‖₁ used for the tolerance scales
    SchurForm schur;

    /// Index of the cluster whose center is nearest to z.
    std::size_t nearest_cluster(Complex z) const;
    /// Cluster containing s(A) if it is real and isolated, else nullopt.
    std::optional<std::size_t> leading_real_cluster() const;
};

/// Default cluster radius 1e-7·max(1, ‖A‖₁).
double default_tol_cluster(const ComplexMatrix& a);

/// Rank threshold: singular values below tol_rank·max(1,‖A‖)^k count as 0.
inline constexpr double kTolRank = 1e-9;

SpectrumReport spectrum_report(const ComplexMatrix& a, std::optional<double> tol_cluster = std::nullopt);

struct ProjectionData {
    enum class Method { EigenDyad, SchurSylvester, Contour };

    ComplexMatrix P;
    EigenvalueCluster cluster;
    Method method = Method::EigenDyad;
    double residual = 0.0;  // max(‖P²−P‖, ‖AP−PA‖), max-entry norm
};

std::string to_string(ProjectionData::Method m);

/// Riesz projection onto the generalized eigenspace of one cluster.
/// Simple clusters use the eigen-dyad right·left*; others reorder the Schur
/// form and solve the Sylvester equation for the coupling block.
ProjectionData spectral_projection(const ComplexMatrix& a, const SpectrumReport& report, std::size_t cluster);

/// Sum of spectral projections of several clusters.
ComplexMatrix spectral_projection_sum(const ComplexMatrix& a, const SpectrumReport& report,
                                      const std::vector<std::size_t>& clusters);

/// (1/2πi)∮ R(z,A) dz by the m-point trapezoid rule on a circle. Oracle
/// for spectral_projection.
ComplexMatrix projection_by_contour(const ComplexMatrix& a, Complex center, double radius, int m);

/// (λ − λ0)·R(λ, A) at λ = λ0 + 10^{-steps}. Oracle; O(10^{-steps}) error
/// at simple poles.
ComplexMatrix projection_by_abel(const ComplexMatrix& a, double lambda0, int steps);

/// [λ R(λ, A)]^n for a generator with s(A) = 0. Oracle.
ComplexMatrix projection_by_power(const ComplexMatrix& a, double lambda, int iterations);

struct AbelGrowth {
    bool bounded = false;
    std::vector<double> lambdas;
    std::vector<double> values;
    /// bounded agrees with (pole_order ≤ 1) when a pole order was supplied.
    std::optional<bool> consistent_with_pole_order;
};

/// Samples ‖(λ − λ0) R(λ, A)‖ at λ = λ0 + 10^{-j}, j = 1..samples.
AbelGrowth abel_growth_check(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx, int samples,
                             std::optional<int> pole_order = std::nullopt);

}  // namespace apos
