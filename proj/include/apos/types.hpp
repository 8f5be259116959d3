#pragma once

// Shared vocabulary for the apos core: matrix/vector aliases, the lattice
// exponent, and the two exception types that cross module boundaries.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace apos {

using Complex = std::complex<double>;

/// Dense complex square matrix: a generator A, a bounded operator T, or a
/// projection. Row/column access follows Eigen conventions.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Exponent of the discretized L^p norm. `Inf` is the sup-norm grid case.
enum class Exponent { One, Two, Inf };

std::string to_string(Exponent p);
Exponent exponent_from_string(const std::string& s);

/// A numerical procedure could not deliver a result within its contract
/// (singular shift, stalled iteration, ill-conditioned Sylvester system...).
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(std::string where, const std::string& what, double value = 0.0)
        : std::runtime_error(where + ": " + what), where_(std::move(where)), value_(value) {}

    const std::string& where() const noexcept { return where_; }
    /// Diagnostic number attached to the failure (residual, separation,
    /// scaling exponent...). Zero when not applicable.
    double value() const noexcept { return value_; }

private:
    std::string where_;
    double value_;
};

/// Bad input: dimension mismatch, unknown model, out-of-range parameter.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws NumericalFailure if any entry of `m` is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* where);

}  // namespace apos
