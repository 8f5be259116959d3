#pragma once

// Dense complex linear algebra kernels: Schur form, eigenpairs,
// matrix exponential, resolvents and lattice operator norms.

#include <optional>
#include <vector>

#include "apos/types.hpp"

namespace apos {

struct LatticeContext;

/// A = Q·U·Q* with Q unitary and U upper triangular.
struct SchurForm {
    ComplexMatrix unitary;
    ComplexMatrix triangular;

    Eigen::Index size() const { return triangular.rows(); }
    Complex eigenvalue(Eigen::Index k) const { return triangular(k, k); }
    ComplexVector eigenvalues() const { return triangular.diagonal(); }
};

/// Right/left eigenvectors belonging to one Schur diagonal entry.
/// `right` has unit 2-norm; for an algebraically simple value `left` is
/// scaled so that left*·right = 1, otherwise it has unit 2-norm.
struct EigenPair {
    Complex value;
    ComplexVector right;
    ComplexVector left;
};

/// Deterministic complex Schur decomposition. Throws NumericalFailure when
/// the QR iteration stalls or the reconstruction error exceeds
/// 1e-10·n·‖A‖.
SchurForm schur_decompose(const ComplexMatrix& a);

/// Eigenpair for diagonal entry `k` of the Schur form, by back-substitution
/// on (U − λI) and forward substitution on (U − λI)*.
EigenPair eigenpair(const SchurForm& schur, Eigen::Index k, bool algebraically_simple = true);

/// Largest singular value (2-norm) of a matrix.
double spectral_norm(const ComplexMatrix& a);

/// Scaling-and-squaring with the degree-13 diagonal Padé approximant.
ComplexMatrix expm(const ComplexMatrix& a);

/// R(z, A) = (zI − A)^{-1} by LU with partial pivoting. Throws
/// NumericalFailure carrying the residual (or the singularity estimate)
/// when z is numerically an eigenvalue.
ComplexMatrix resolvent(const ComplexMatrix& a, Complex z);

/// Induced operator norm on the weighted l^p space described by `ctx`
/// (p ∈ {1, 2, ∞}).
double operator_norm(const ComplexMatrix& a, const LatticeContext& ctx);

/// Evaluates t ↦ e^{tA} repeatedly. Uses a diagonalization when the
/// eigenvector basis is well conditioned and falls back to expm otherwise;
/// both paths agree to ~1e-10 relative on the matrices we build.
class Propagator {
public:
    explicit Propagator(ComplexMatrix a);

    ComplexMatrix at(double t) const;
    ComplexVector apply(double t, const ComplexVector& f) const;
    /// e^{tA}·F for a block of column vectors.
    ComplexMatrix apply(double t, const ComplexMatrix& f) const;
    bool diagonalized() const { return basis_.has_value(); }
    const ComplexMatrix& generator() const { return a_; }

private:
    struct Basis {
        ComplexMatrix vectors;
        ComplexMatrix inverse;
        ComplexVector values;
    };

    ComplexMatrix a_;
    std::optional<Basis> basis_;
};

}  // namespace apos
