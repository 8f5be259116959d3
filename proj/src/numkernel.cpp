#include "apos/numkernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "apos/lattice.hpp"

namespace apos {

std::string to_string(Exponent p) {
    switch (p) {
        case Exponent::One: return "1";
        case Exponent::Two: return "2";
        case Exponent::Inf: return "inf";
    }
    return "?";
}

Exponent exponent_from_string(const std::string& s) {
    if (s == "1") return Exponent::One;
    if (s == "2") return Exponent::Two;
    if (s == "inf" || s == "Inf" || s == "INF") return Exponent::Inf;
    throw UsageError("unsupported exponent '" + s + "' (expected 1, 2 or inf)");
}

void require_finite(const ComplexMatrix& m, const char* where) {
    if (!m.allFinite()) throw NumericalFailure(where, "matrix has non-finite entries");
}

namespace {

double norm1(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

namespace {

// Splits the 2×2 blocks of a real quasi-triangular Schur form with complex
// Givens rotations.
SchurForm real_to_complex_schur(const RealMatrix& u, const RealMatrix& t) {
    ComplexMatrix q = u.cast<Complex>();
    ComplexMatrix r = t.cast<Complex>();
    const Eigen::Index n = r.rows();
    for (Eigen::Index m = n - 1; m >= 1; --m) {
        if (r(m, m - 1) == Complex(0.0)) continue;
        const Complex a = r(m - 1, m - 1);
        const Complex b = r(m - 1, m);
        const Complex c = r(m, m - 1);
        const Complex d = r(m, m);
        const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
        const Complex mu = 0.5 * (a - d) + disc;
        const double rho = std::hypot(std::abs(mu), std::abs(c));
        const Complex cs = mu / rho;
        const Complex sn = c / rho;
        Eigen::Matrix2cd g;
        g << std::conj(cs), std::conj(sn), -sn, cs;
        r.block(m - 1, m - 1, 2, n - m + 1) = g * r.block(m - 1, m - 1, 2, n - m + 1);
        r.block(0, m - 1, m + 1, 2) = r.block(0, m - 1, m + 1, 2) * g.adjoint();
        q.middleCols(m - 1, 2) = q.middleCols(m - 1, 2) * g.adjoint();
        r(m, m - 1) = 0.0;
    }
    return {q, r};
}

}  // namespace

SchurForm schur_decompose(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw UsageError("schur_decompose: matrix is not square");
    require_finite(a, "schur_decompose");
    const Eigen::Index n = a.rows();
    if (n == 0) return {};

    const auto stalled = [n] {
        return NumericalFailure("schur_decompose",
                                "QR iteration stalled on the active " + std::to_string(n) + "x" +
                                    std::to_string(n) + " Hessenberg block",
                                static_cast<double>(n));
    };
    SchurForm out;
    if (a.imag().isZero(0.0)) {
        Eigen::RealSchur<RealMatrix> rs;
        rs.setMaxIterations(60 * n);
        rs.compute(a.real(), true);
        if (rs.info() != Eigen::Success) throw stalled();
        out = real_to_complex_schur(rs.matrixU(), rs.matrixT());
    } else {
        Eigen::ComplexSchur<ComplexMatrix> cs;
        cs.setMaxIterations(60 * n);
        cs.compute(a, true);
        if (cs.info() != Eigen::Success) throw stalled();
        out = {cs.matrixU(), cs.matrixT()};
    }

    const double scale = std::max(norm1(a), std::numeric_limits<double>::min());
    const double err = norm1(out.unitary * out.triangular * out.unitary.adjoint() - a);
    if (err > 1e-10 * static_cast<double>(n) * scale) {
        throw NumericalFailure("schur_decompose", "reconstruction error too large", err);
    }
    return out;
}

EigenPair eigenpair(const SchurForm& schur, Eigen::Index k, bool algebraically_simple) {
    const auto& u = schur.triangular;
    const Eigen::Index n = u.rows();
    const Complex lambda = u(k, k);
    const double tie = 1e-14 * std::max(1.0, u.cwiseAbs().maxCoeff());

    auto safe_den = [&](Complex d) {
        if (std::abs(d) < tie) return Complex(tie, 0.0);
        return d;
    };

    ComplexVector y = ComplexVector::Zero(n);
    y(k) = 1.0;
    for (Eigen::Index j = k - 1; j >= 0; --j) {
        Complex s = 0.0;
        for (Eigen::Index m = j + 1; m <= k; ++m) s += u(j, m) * y(m);
        y(j) = -s / safe_den(u(j, j) - lambda);
    }

    // w* U = λ w*, solved on the conjugate-transpose (lower triangular) system.
    ComplexVector wbar = ComplexVector::Zero(n);
    wbar(k) = 1.0;
    for (Eigen::Index j = k + 1; j < n; ++j) {
        Complex s = 0.0;
        for (Eigen::Index m = k; m < j; ++m) s += wbar(m) * u(m, j);
        wbar(j) = -s / safe_den(u(j, j) - lambda);
    }

    EigenPair out;
    out.value = lambda;
    out.right = schur.unitary * y;
    out.right /= out.right.norm();
    out.left = schur.unitary * wbar.conjugate();
    const Complex pairing = out.left.dot(out.right);  // left* · right
    if (algebraically_simple && std::abs(pairing) > 1e-300) {
        out.left /= std::conj(pairing);
    } else {
        out.left /= out.left.norm();
    }
    return out;
}

double spectral_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::BDCSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

namespace {

template <class Matrix>
Matrix pade13_expm(const Matrix& a, double nrm) {
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const Eigen::Index n = a.rows();
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    if (s > 1000) throw NumericalFailure("expm", "scaling exponent out of range", s);

    const Matrix x = a / std::ldexp(1.0, s);
    const Matrix id = Matrix::Identity(n, n);
    const Matrix x2 = x * x;
    const Matrix x4 = x2 * x2;
    const Matrix x6 = x4 * x2;

    const Matrix u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
    const Matrix u_poly = x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
    const Matrix v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
    const Matrix v_poly = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

    Matrix r = (v_poly - u_poly).partialPivLu().solve(v_poly + u_poly);
    for (int i = 0; i < s; ++i) r = r * r;
    if (!r.allFinite()) throw NumericalFailure("expm", "overflow while squaring", s);
    return r;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw UsageError("expm: matrix is not square");
    require_finite(a, "expm");
    const Eigen::Index n = a.rows();
    if (n == 0) return a;
    if (a.isZero(0.0)) return ComplexMatrix::Identity(n, n);
    const double nrm = norm1(a);
    if (a.imag().isZero(0.0)) return pade13_expm<RealMatrix>(a.real(), nrm).cast<Complex>();
    return pade13_expm<ComplexMatrix>(a, nrm);
}

ComplexMatrix resolvent(const ComplexMatrix& a, Complex z) {
    if (a.rows() != a.cols()) throw UsageError("resolvent: matrix is not square");
    const Eigen::Index n = a.rows();
    ComplexMatrix m = -a;
    m.diagonal().array() += z;

    const double nrm_a = std::max(norm1(a), 1.0);
    // z is an eigenvalue of a perturbation of size σ_min(zI − A).
    const double tol_singular = 10.0 * std::numeric_limits<double>::epsilon() * nrm_a * static_cast<double>(n);
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const double sigma_est = lu.rcond() * norm1(m);
    if (!(sigma_est > tol_singular)) {
        throw NumericalFailure("resolvent", "shift is numerically an eigenvalue", sigma_est);
    }
    ComplexMatrix r = lu.inverse();
    const double residual = norm1(m * r - ComplexMatrix::Identity(n, n));
    // Backward-stable inversion leaves a residual of order eps·cond.
    const double cond = 1.0 / std::max(lu.rcond(), 1e-300);
    const double allowed = std::max(1e-10 * n, 1e3 * n * 2.2e-16 * cond);
    if (!(residual <= allowed)) {
        throw NumericalFailure("resolvent", "residual above threshold", residual);
    }
    return r;
}

double operator_norm(const ComplexMatrix& a, const LatticeContext& ctx) {
    if (a.rows() != ctx.n || a.cols() != ctx.n) throw UsageError("operator_norm: dimension mismatch");
    const Eigen::Index n = ctx.n;
    switch (ctx.p) {
        case Exponent::One: {
            double best = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                double col = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) col += ctx.weights(i) * std::abs(a(i, j));
                best = std::max(best, col / ctx.weights(j));
            }
            return best;
        }
        case Exponent::Inf:
            return a.cwiseAbs().rowwise().sum().maxCoeff();
        case Exponent::Two: {
            const RealVector sq = ctx.weights.cwiseSqrt();
            const ComplexMatrix scaled =
                sq.cast<Complex>().asDiagonal() * a * sq.cwiseInverse().cast<Complex>().asDiagonal();
            return spectral_norm(scaled);
        }
    }
    throw UsageError("operator_norm: unsupported exponent");
}

Propagator::Propagator(ComplexMatrix a) : a_(std::move(a)) {
    const Eigen::Index n = a_.rows();
    if (n == 0) return;
    SchurForm schur = schur_decompose(a_);
    ComplexMatrix vecs(n, n);
    for (Eigen::Index k = 0; k < n; ++k) vecs.col(k) = eigenpair(schur, k, false).right;
    Eigen::PartialPivLU<ComplexMatrix> lu(vecs);
    if (lu.rcond() < 1e-6) return;
    ComplexMatrix inv = lu.inverse();
    ComplexVector values = schur.eigenvalues();
    const double err = norm1(vecs * values.asDiagonal() * inv - a_);
    if (err > 1e-11 * std::max(norm1(a_), 1.0) * static_cast<double>(n)) return;
    basis_ = Basis{std::move(vecs), std::move(inv), std::move(values)};
}

ComplexMatrix Propagator::at(double t) const {
    if (!basis_) return expm(t * a_);
    const ComplexVector e = (t * basis_->values).array().exp().matrix();
    if (!e.allFinite()) return expm(t * a_);
    return basis_->vectors * e.asDiagonal() * basis_->inverse;
}

ComplexVector Propagator::apply(double t, const ComplexVector& f) const {
    if (!basis_) return expm(t * a_) * f;
    const ComplexVector e = (t * basis_->values).array().exp().matrix();
    if (!e.allFinite()) return expm(t * a_) * f;
    return basis_->vectors * (e.asDiagonal() * (basis_->inverse * f));
}

ComplexMatrix Propagator::apply(double t, const ComplexMatrix& f) const {
    if (!basis_) return expm(t * a_) * f;
    const ComplexVector e = (t * basis_->values).array().exp().matrix();
    if (!e.allFinite()) return expm(t * a_) * f;
    return basis_->vectors * (e.asDiagonal() * (basis_->inverse * f));
}

}  // namespace apos
