#pragma once

// Cone geometry of a discretized Banach lattice: distance to the positive
// cone, the gauge norm of the principal ideal E_u, and strong positivity
// certificates f ≫_u 0.

#include <optional>
#include <string>

#include "apos/types.hpp"

namespace apos {

/// Discretization metadata: exponent p, quadrature weights and an optional
/// reference vector u.
struct LatticeContext {
    Eigen::Index n = 0;
    Exponent p = Exponent::Inf;
    RealVector weights;
    std::optional<RealVector> u;

    /// Unit weights, no reference vector.
    static LatticeContext sequence(Eigen::Index n, Exponent p);
    /// Unit weights and u = 𝟙.
    static LatticeContext ones(Eigen::Index n, Exponent p);

    LatticeContext with_u(RealVector ref) const;

    /// Throws UsageError if weights are not strictly positive, lengths
    /// disagree, or u has a negative entry.
    void validate() const;

    /// u > 0 entrywise (the finite-dimensional quasi-interior condition).
    bool has_quasi_interior_u() const;

    /// tol_strict = 1e-10·max_i u_i.
    double tol_strict() const;

    /// Norm of a vector in this lattice (weighted l^p, or sup norm).
    double norm(const ComplexVector& f) const;
};

/// Trapezoid weights for `n` equispaced nodes of spacing `h` with the two
/// end nodes on the boundary.
RealVector trapezoid_weights(Eigen::Index n, double h);

struct PositivityCertificate {
    enum class Kind { Positive, StronglyPositive, NotPositive, NotStronglyPositive };

    Kind kind = Kind::NotPositive;
    /// For vectors: the largest c with f ≥ c·u. For operators: the largest
    /// κ with T f ≥ κ·avg_w(f)·u for every f ≥ 0 (avg_w is the
    /// weight-normalized mean).
    double constant = 0.0;
    /// Coordinate (vector) or column (operator) attaining the constant.
    Eigen::Index witness_index = 0;
    /// Operators only: all entries ≥ −tol_entry.
    bool entrywise_positive = false;

    bool strongly_positive() const { return kind == Kind::StronglyPositive; }
};

std::string to_string(PositivityCertificate::Kind k);

/// dist(f, E₊) in the lattice norm: coordinatewise residual |Im f_i| where
/// Re f_i ≥ 0, |f_i| otherwise, then the weighted p-norm.
double dist_to_cone(const ComplexVector& f, const LatticeContext& ctx);

/// ‖f‖_u = max_i |f_i| / u_i; +∞ when f ∉ E_u.
double gauge_norm(const ComplexVector& f, const LatticeContext& ctx);

/// Strong positivity of a real vector with respect to ctx.u. Complex input
/// with a non-negligible imaginary part is rejected.
PositivityCertificate strong_positivity(const ComplexVector& f, const LatticeContext& ctx);
PositivityCertificate strong_positivity(const RealVector& f, const LatticeContext& ctx);

/// T ≫_u 0 iff every column T e_j is ≫_u 0.
PositivityCertificate operator_strong_positivity(const ComplexMatrix& t, const LatticeContext& ctx);

/// Largest imaginary part relative to the largest modulus; used to decide
/// whether a computed matrix/vector is real "to tolerance".
double relative_imag(const ComplexMatrix& m);

}  // namespace apos
