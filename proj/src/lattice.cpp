#include "apos/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace apos {

LatticeContext LatticeContext::sequence(Eigen::Index n, Exponent p) {
    LatticeContext ctx;
    ctx.n = n;
    ctx.p = p;
    ctx.weights = RealVector::Ones(n);
    return ctx;
}

LatticeContext LatticeContext::ones(Eigen::Index n, Exponent p) {
    return sequence(n, p).with_u(RealVector::Ones(n));
}

LatticeContext LatticeContext::with_u(RealVector ref) const {
    LatticeContext out = *this;
    out.u = std::move(ref);
    out.validate();
    return out;
}

void LatticeContext::validate() const {
    if (weights.size() != n) throw UsageError("LatticeContext: weight vector length differs from n");
    if (n > 0 && !(weights.minCoeff() > 0.0)) throw UsageError("LatticeContext: weights must be strictly positive");
    if (u) {
        if (u->size() != n) throw UsageError("LatticeContext: reference vector length differs from n");
        if (n > 0 && u->minCoeff() < 0.0) throw UsageError("LatticeContext: reference vector must be >= 0");
    }
}

bool LatticeContext::has_quasi_interior_u() const {
    return u && (n == 0 || u->minCoeff() > 0.0);
}

double LatticeContext::tol_strict() const {
    if (!u || n == 0) return 1e-10;
    return 1e-10 * u->maxCoeff();
}

namespace {

double weighted_pnorm(const RealVector& r, const LatticeContext& ctx) {
    switch (ctx.p) {
        case Exponent::One: return ctx.weights.dot(r);
        case Exponent::Two: return std::sqrt(ctx.weights.dot(r.cwiseAbs2()));
        case Exponent::Inf: return r.size() ? r.maxCoeff() : 0.0;
    }
    return 0.0;
}

void require_length(Eigen::Index got, const LatticeContext& ctx, const char* where) {
    if (got != ctx.n) {
        throw UsageError(std::string(where) + ": vector length " + std::to_string(got) +
                         " differs from lattice dimension " + std::to_string(ctx.n));
    }
}

}  // namespace

double LatticeContext::norm(const ComplexVector& f) const {
    require_length(f.size(), *this, "LatticeContext::norm");
    return weighted_pnorm(f.cwiseAbs(), *this);
}

RealVector trapezoid_weights(Eigen::Index n, double h) {
    RealVector w = RealVector::Constant(n, h);
    if (n >= 2) {
        w(0) = 0.5 * h;
        w(n - 1) = 0.5 * h;
    }
    return w;
}

std::string to_string(PositivityCertificate::Kind k) {
    switch (k) {
        case PositivityCertificate::Kind::Positive: return "positive";
        case PositivityCertificate::Kind::StronglyPositive: return "strongly-positive-wrt-u";
        case PositivityCertificate::Kind::NotPositive: return "not-positive";
        case PositivityCertificate::Kind::NotStronglyPositive: return "not-strongly-positive";
    }
    return "?";
}

double dist_to_cone(const ComplexVector& f, const LatticeContext& ctx) {
    require_length(f.size(), ctx, "dist_to_cone");
    RealVector r(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double g = f(i).real();
        const double h = f(i).imag();
        r(i) = g >= 0.0 ? std::abs(h) : std::hypot(g, h);
    }
    return weighted_pnorm(r, ctx);
}

double gauge_norm(const ComplexVector& f, const LatticeContext& ctx) {
    require_length(f.size(), ctx, "gauge_norm");
    if (!ctx.u) throw UsageError("gauge_norm: lattice context has no reference vector u");
    double best = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double m = std::abs(f(i));
        const double ui = (*ctx.u)(i);
        if (ui > 0.0) {
            best = std::max(best, m / ui);
        } else if (m > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return best;
}

PositivityCertificate strong_positivity(const RealVector& f, const LatticeContext& ctx) {
    require_length(f.size(), ctx, "strong_positivity");
    if (!ctx.has_quasi_interior_u()) {
        throw UsageError("strong_positivity: reference vector u must be present and strictly positive");
    }
    const RealVector& u = *ctx.u;
    PositivityCertificate cert;
    cert.constant = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double c = f(i) / u(i);
        if (c < cert.constant) {
            cert.constant = c;
            cert.witness_index = i;
        }
    }
    if (f.size() == 0) cert.constant = 0.0;
    const double scale = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    const bool nonneg = f.size() == 0 || f.minCoeff() >= -1e-12 * scale;
    cert.entrywise_positive = nonneg;
    if (cert.constant > ctx.tol_strict()) {
        cert.kind = PositivityCertificate::Kind::StronglyPositive;
    } else if (nonneg) {
        cert.kind = PositivityCertificate::Kind::NotStronglyPositive;
    } else {
        cert.kind = PositivityCertificate::Kind::NotPositive;
    }
    return cert;
}

PositivityCertificate strong_positivity(const ComplexVector& f, const LatticeContext& ctx) {
    const double scale = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    const double im = f.size() ? f.imag().cwiseAbs().maxCoeff() : 0.0;
    if (im > 1e-10 * std::max(scale, 1e-300)) {
        throw NumericalFailure("strong_positivity", "vector has a non-negligible imaginary part", im);
    }
    return strong_positivity(RealVector(f.real()), ctx);
}

PositivityCertificate operator_strong_positivity(const ComplexMatrix& t, const LatticeContext& ctx) {
    if (t.rows() != ctx.n || t.cols() != ctx.n) throw UsageError("operator_strong_positivity: dimension mismatch");
    if (!ctx.has_quasi_interior_u()) {
        throw UsageError("operator_strong_positivity: reference vector u must be strictly positive");
    }
    const double scale = t.size() ? t.cwiseAbs().maxCoeff() : 0.0;
    const double tol_entry = 1e-9 * std::max(scale, 1e-300);
    if (t.size() && t.imag().cwiseAbs().maxCoeff() > tol_entry) {
        throw NumericalFailure("operator_strong_positivity", "operator is not real to tolerance",
                               t.imag().cwiseAbs().maxCoeff());
    }
    const RealMatrix re = t.real();
    const RealVector& u = *ctx.u;
    const double total_weight = ctx.weights.sum();

    PositivityCertificate cert;
    cert.entrywise_positive = re.size() == 0 || re.minCoeff() >= -tol_entry;
    cert.constant = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < re.cols(); ++j) {
        const double cj = (re.col(j).array() / u.array()).minCoeff();
        const double kappa = cj / ctx.weights(j) * total_weight;
        if (kappa < cert.constant) {
            cert.constant = kappa;
            cert.witness_index = j;
        }
    }
    if (re.size() == 0) cert.constant = 0.0;
    if (cert.constant > ctx.tol_strict()) {
        cert.kind = PositivityCertificate::Kind::StronglyPositive;
    } else if (cert.entrywise_positive) {
        cert.kind = PositivityCertificate::Kind::NotStronglyPositive;
    } else {
        cert.kind = PositivityCertificate::Kind::NotPositive;
    }
    return cert;
}

double relative_imag(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return m.imag().cwiseAbs().maxCoeff() / scale;
}

}  // namespace apos
