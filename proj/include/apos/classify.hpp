#pragma once

// Decision procedures for positivity of spectral projections, semigroups,
// resolvents and powers, each paired with an empirical sampler.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "apos/lattice.hpp"
#include "apos/spectral.hpp"

namespace apos {

struct ClassifyOptions {
    std::optional<double> tol_cluster;
    /// Time grid for the semigroup samplers; empty selects
    /// {0} ∪ {0.01·1.2^k} up to 200/dominance margin.
    std::vector<double> t_grid;
    /// Witnesses use at most this many basis vectors, evenly spaced.
    int max_witness_vectors = 32;
    bool witnesses = true;
    /// Threshold for d₊ → 0 in the samplers, relative to ‖f‖.
    double eps = 1e-8;
    /// Largest sampled power; 0 picks one from the spectral gap.
    std::int64_t n_max = 0;
    /// Resolvent offsets λ0 ± δ·2^{−j}, j = 0..resolvent_samples−1.
    int resolvent_samples = 24;
    std::optional<double> resolvent_delta;
    /// Extra initial data for the resolvent sampler (non-negative).
    std::vector<RealVector> test_vectors;
};

struct EigenConditions {
    bool geom_simple = false;
    bool alg_simple = false;
    bool eigvec_strongly_pos = false;
    bool left_eigvec_strictly_pos = false;
    /// Indeterminate when λ0 is not algebraically simple.
    std::optional<bool> range_meets_cone_trivially;
};

struct ProjectionVerdict {
    Complex eigenvalue;
    ComplexMatrix P;
    bool positive = false;
    bool strongly_positive_wrt_u = false;
    bool irreducible_rank1 = false;
    EigenConditions eigen_conditions;
    PositivityCertificate certificate;
    int pole_order = 1;
    /// The equivalent characterizations give the same answer.
    bool faces_agree = true;
};

/// Positivity of the spectral projection at the real spectral value λ0.
/// A missing ctx.u is taken as 𝟙. Throws NumericalFailure if λ0 is not
/// within tol_cluster of a real cluster center.
ProjectionVerdict check_projection(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx,
                                   std::optional<double> tol_cluster = std::nullopt);
ProjectionVerdict check_projection(const ComplexMatrix& a, const SpectrumReport& report, std::size_t cluster,
                                   const LatticeContext& ctx);

enum class SemigroupVerdict {
    Positive,
    UniformlyEventuallyStronglyPositive,
    IndividuallyEventuallyStronglyPositive,
    UniformlyAsymptoticallyPositive,
    IndividuallyAsymptoticallyPositive,
    None
};

std::string to_string(SemigroupVerdict v);

struct DistanceTrace {
    std::vector<double> times;
    std::vector<double> distances;
    /// First grid time after which the distance stays below eps.
    std::optional<double> t0;
};

struct SemigroupWitnesses {
    std::vector<Eigen::Index> basis_indices;
    std::vector<std::optional<double>> t0_per_basis_vector;         // d₊ below eps
    std::vector<std::optional<double>> strong_t0_per_basis_vector;  // ≫_u 0 from then on
    double sup_tail_distance = 0.0;
    bool bounded_rescaled = false;
};

struct SemigroupClassification {
    SemigroupVerdict verdict = SemigroupVerdict::None;
    std::string theorem_basis;
    bool positive = false;
    bool eventually_strongly_positive = false;
    bool asymptotically_positive = false;
    /// positive or eventually strongly positive; eventual positivity
    /// without a strong limit is not certified.
    bool eventually_positive = false;
    /// Metzler criterion and sampled e^{hA} entries agree.
    bool positivity_audit_agrees = true;
    double spectral_bound = 0.0;
    bool dominant = false;
    bool bounded_rescaled = false;
    double dominance_margin = 0.0;
    std::optional<ProjectionVerdict> projection;
    SemigroupWitnesses witnesses;
};

SemigroupClassification classify_semigroup(const ComplexMatrix& a, const LatticeContext& ctx,
                                           const ClassifyOptions& opts = {});

/// Default grid {0} ∪ {0.01·1.2^k : 0.01·1.2^k ≤ horizon}.
std::vector<double> default_time_grid(double horizon);

/// d₊(e^{t(A−s(A))}f) on the grid.
DistanceTrace sample_semigroup_distance(const ComplexMatrix& a, const LatticeContext& ctx, const RealVector& f,
                                        const std::vector<double>& t_grid, double eps = 1e-8);

/// Smallest grid time from which strong_positivity(e^{t(A−s)}f).constant ≥
/// eps on the rest of the grid. eps ≤ 0 selects 1e-8·‖f‖/‖u‖.
std::optional<double> find_t0_strong(const ComplexMatrix& a, const LatticeContext& ctx, const RealVector& f,
                                     double eps = 0.0, const std::vector<double>& t_grid = {});

/// Eigenvector of the eigenvalue with largest real part, phase-normalized so
/// its largest entry is real positive and scaled to gauge norm 1.
struct LeadingEigenvector {
    Complex value;
    ComplexVector vector;
    /// min_i Re(v_i)/u_i.
    double constant = 0.0;
};

LeadingEigenvector leading_eigenvector(const ComplexMatrix& a, const LatticeContext& ctx,
                                       std::optional<double> tol_cluster = std::nullopt);

enum class ResolventVerdict { EventuallyStronglyPositive, AsymptoticallyPositiveBoundedType, None };

std::string to_string(ResolventVerdict v);

struct ResolventSample {
    double lambda = 0.0;
    /// Smallest strong-positivity constant over the sampled vectors (right
    /// side) or of −R(λ,A)f (left side).
    double min_constant = 0.0;
    /// Largest d₊(R(λ,A)f) over the sampled vectors.
    double max_distance = 0.0;
};

struct ResolventClassification {
    ResolventVerdict verdict = ResolventVerdict::None;
    std::string theorem_basis;
    ProjectionVerdict projection;
    bool simple_pole = false;
    /// Empirical faces, all evaluated on the sampled λ.
    bool right_strongly_positive = false;
    bool left_strongly_negative = false;
    bool right_positive = false;
    bool scaled_distance_vanishes = false;  // (λ−λ0)d₊(R(λ,A)f) → 0
    bool bounded_type = false;              // sup d₊(R(λ,A)f) < ∞
    std::optional<double> lambda1;          // strong positivity on (λ0, λ1]
    std::vector<ResolventSample> right_samples;
    std::vector<ResolventSample> left_samples;
};

ResolventClassification classify_resolvent(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx,
                                           const ClassifyOptions& opts = {});

struct PowerClassification {
    double spectral_radius = 0.0;
    bool power_bounded = false;
    std::vector<std::size_t> peripheral;  // clusters with |λ| = r
    ComplexMatrix P;                      // peripheral spectral projection
    bool projection_positive = false;
    bool asymptotically_positive = false;
    bool eventually_strongly_positive = false;
    std::optional<std::int64_t> n0;
    std::vector<std::int64_t> sampled_n;
    std::vector<double> max_distance;  // max over basis vectors of d₊((T/r)^n f)
};

PowerClassification classify_power(const ComplexMatrix& t, const LatticeContext& ctx, const ClassifyOptions& opts = {});

struct EquivalenceCheck {
    bool semigroup_side = false;
    bool shifted_power_side = false;
    bool consistent = false;
    double shift = 0.0;
    SemigroupClassification semigroup;
    PowerClassification power;
};

/// Compares asymptotic positivity of (e^{tA}) with that of the powers of
/// A + cI for a shift c making s(A) + c the only peripheral value.
EquivalenceCheck finite_dim_equivalence_check(const ComplexMatrix& a, const LatticeContext& ctx,
                                              const ClassifyOptions& opts = {});

struct TwoDimCheck {
    bool asymptotically_positive = false;
    bool positive = false;
    bool theorem_holds = false;
};

TwoDimCheck two_dim_theorem_check(const RealMatrix& a, const LatticeContext& ctx);

/// Σ_{n<terms} (μ−λ)^n R(μ,A)^{n+1}. Throws NumericalFailure when the terms
/// grow.
ComplexMatrix neumann_series_resolvent(const ComplexMatrix& a, Complex mu, Complex lambda, int terms);

enum class RandomShape {
    PositiveRankOne,  // P = v·wᵀ with v, w > 0
    MixedLeft,        // v > 0, w of mixed sign
    Generic           // v, w with random signs
};

/// Real n×n matrix s·v·wᵀ + (stable complement) with a simple dominant
/// real eigenvalue s ∈ [−1, 1]; entries drawn uniformly in [−1, 1].
RealMatrix random_dominant_matrix(int n, RandomShape shape, std::mt19937_64& rng);

}  // namespace apos
