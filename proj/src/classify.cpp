#include "apos/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apos/numkernel.hpp"

namespace apos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

LatticeContext with_default_u(const LatticeContext& ctx) {
    if (ctx.u) return ctx;
    return ctx.with_u(RealVector::Ones(ctx.n));
}

bool real_to_tolerance(const ComplexMatrix& m, double rel = 1e-8) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= rel * std::max(max_abs(m), 1e-300);
}

ComplexVector normalize_phase(const ComplexVector& v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if (std::abs(v(k)) == 0.0) return v;
    return v * (std::abs(v(k)) / v(k));
}

// Strong positivity constant of ±v scaled to gauge norm 1, better sign.
double signed_gauge_constant(const ComplexVector& v, const LatticeContext& ctx) {
    const RealVector re = v.real();
    const double g = gauge_norm(v, ctx);
    if (!(g > 0.0) || !std::isfinite(g)) return -kInf;
    const RealVector& u = *ctx.u;
    const double plus = (re.array() / u.array()).minCoeff() / g;
    const double minus = (-re.array() / u.array()).minCoeff() / g;
    return std::max(plus, minus);
}

bool strictly_one_signed(const ComplexVector& w) {
    const ComplexVector v = normalize_phase(w);
    if (!real_to_tolerance(v)) return false;
    const double scale = v.cwiseAbs().maxCoeff();
    const RealVector re = v.real() / scale;
    return re.minCoeff() > 1e-10 || re.maxCoeff() < -1e-10;
}

std::vector<Eigen::Index> witness_indices(Eigen::Index n, int max_vectors) {
    std::vector<Eigen::Index> idx;
    if (n <= max_vectors) {
        for (Eigen::Index i = 0; i < n; ++i) idx.push_back(i);
        return idx;
    }
    for (int k = 0; k < max_vectors; ++k) {
        const auto i = static_cast<Eigen::Index>(std::llround(static_cast<double>(k) * (n - 1) / (max_vectors - 1)));
        if (idx.empty() || idx.back() != i) idx.push_back(i);
    }
    return idx;
}

ComplexMatrix basis_block(Eigen::Index n, const std::vector<Eigen::Index>& idx) {
    ComplexMatrix f = ComplexMatrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) f(idx[k], static_cast<Eigen::Index>(k)) = 1.0;
    return f;
}

double strong_eps(const RealVector& f, const LatticeContext& ctx) {
    return 1e-8 * ctx.norm(f.cast<Complex>()) / ctx.norm(ctx.u->cast<Complex>());
}

std::optional<double> first_stable_time(const std::vector<double>& times, const std::vector<bool>& good) {
    std::optional<double> t0;
    for (std::size_t k = times.size(); k-- > 0;) {
        if (!good[k]) break;
        t0 = times[k];
    }
    return t0;
}

double horizon_from_margin(double margin) {
    if (!(margin > 0.0) || !std::isfinite(margin)) return 200.0;
    return 200.0 / margin;
}

// M^n for many n, by diagonalization when the eigenvector basis is well
// conditioned and by binary powering otherwise.
class PowerSampler {
public:
    explicit PowerSampler(const ComplexMatrix& m) : m_(m) {
        const Eigen::Index n = m.rows();
        SchurForm schur = schur_decompose(m);
        ComplexMatrix vecs(n, n);
        for (Eigen::Index k = 0; k < n; ++k) vecs.col(k) = eigenpair(schur, k, false).right;
        Eigen::PartialPivLU<ComplexMatrix> lu(vecs);
        if (lu.rcond() < 1e-8) return;
        ComplexMatrix inv = lu.inverse();
        ComplexVector values = schur.eigenvalues();
        const double err = max_abs(vecs * values.asDiagonal() * inv - m);
        if (err > 1e-11 * std::max(max_abs(m), 1.0) * static_cast<double>(n)) return;
        vecs_ = std::move(vecs);
        inv_ = std::move(inv);
        values_ = std::move(values);
        diagonal_ = true;
    }

    bool diagonalized() const { return diagonal_; }

    ComplexMatrix apply(std::int64_t power, const ComplexMatrix& f) const {
        if (diagonal_) {
            ComplexVector d(values_.size());
            for (Eigen::Index k = 0; k < d.size(); ++k) {
                const double mod = std::abs(values_(k));
                d(k) = mod == 0.0 ? Complex(0.0) : std::polar(std::pow(mod, static_cast<double>(power)),
                                                               static_cast<double>(power) * std::arg(values_(k)));
            }
            return vecs_ * (d.asDiagonal() * (inv_ * f));
        }
        ComplexMatrix result = f;
        ComplexMatrix base = m_;
        for (std::int64_t p = power; p > 0; p >>= 1) {
            if (p & 1) result = base * result;
            if (p > 1) base = base * base;
        }
        return result;
    }

private:
    ComplexMatrix m_;
    ComplexMatrix vecs_;
    ComplexMatrix inv_;
    ComplexVector values_;
    bool diagonal_ = false;
};

}  // namespace

std::string to_string(SemigroupVerdict v) {
    switch (v) {
        case SemigroupVerdict::Positive:
            return "positive";
        case SemigroupVerdict::UniformlyEventuallyStronglyPositive:
            return "uniformly-eventually-strongly-positive";
        case SemigroupVerdict::IndividuallyEventuallyStronglyPositive:
            return "individually-eventually-strongly-positive";
        case SemigroupVerdict::UniformlyAsymptoticallyPositive:
            return "uniformly-asymptotically-positive";
        case SemigroupVerdict::IndividuallyAsymptoticallyPositive:
            return "individually-asymptotically-positive";
        case SemigroupVerdict::None:
            return "none";
    }
    return "none";
}

std::string to_string(ResolventVerdict v) {
    switch (v) {
        case ResolventVerdict::EventuallyStronglyPositive:
            return "eventually-strongly-positive";
        case ResolventVerdict::AsymptoticallyPositiveBoundedType:
            return "asymptotically-positive-bounded-type";
        case ResolventVerdict::None:
            return "none";
    }
    return "none";
}

ProjectionVerdict check_projection(const ComplexMatrix& a, const SpectrumReport& report, std::size_t cluster,
                                   const LatticeContext& ctx_in) {
    const LatticeContext ctx = with_default_u(ctx_in);
    ctx.validate();
    if (ctx.n != a.rows()) throw UsageError("check_projection: dimension mismatch");
    const EigenvalueCluster& c = report.clusters.at(cluster);

    ProjectionVerdict out;
    out.eigenvalue = c.center;
    out.pole_order = c.pole_order;
    const ProjectionData pd = spectral_projection(a, report, cluster);
    out.P = pd.P;
    if (!real_to_tolerance(out.P)) {
        throw NumericalFailure("check_projection", "spectral projection is not real to tolerance", relative_imag(out.P));
    }
    const ComplexMatrix p_real = out.P.real().cast<Complex>();
    const double scale = max_abs(p_real);
    const RealMatrix re = p_real.real();
    out.positive = re.minCoeff() >= -1e-9 * scale;
    if (ctx.has_quasi_interior_u()) {
        out.certificate = operator_strong_positivity(p_real, ctx);
        out.strongly_positive_wrt_u = out.certificate.strongly_positive();
    }

    EigenConditions& e = out.eigen_conditions;
    e.geom_simple = c.geometric_multiplicity == 1;
    e.alg_simple = c.algebraic_multiplicity == 1;

    ComplexVector right, left;
    if (e.alg_simple) {
        const EigenPair ep = eigenpair(report.schur, c.members.front(), true);
        right = ep.right;
        left = ep.left;
    } else {
        const ComplexMatrix shifted = a - c.center * ComplexMatrix::Identity(a.rows(), a.cols());
        Eigen::BDCSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
        right = svd.matrixV().col(a.cols() - 1);
        left = svd.matrixU().col(a.rows() - 1);
    }
    right = normalize_phase(right);
    e.eigvec_strongly_pos = real_to_tolerance(right) && ctx.has_quasi_interior_u() &&
                            signed_gauge_constant(right, ctx) > 1e-10;
    e.left_eigvec_strictly_pos = strictly_one_signed(left);
    if (e.alg_simple) e.range_meets_cone_trivially = strictly_one_signed(left);

    out.irreducible_rank1 = e.alg_simple && re.minCoeff() > 1e-10 * scale;

    if (ctx.has_quasi_interior_u()) {
        const bool faces = e.alg_simple && e.eigvec_strongly_pos && e.left_eigvec_strictly_pos;
        out.faces_agree = faces == out.strongly_positive_wrt_u && out.irreducible_rank1 == out.strongly_positive_wrt_u;
        if (out.pole_order == 1 && out.strongly_positive_wrt_u) {
            out.faces_agree = out.faces_agree && e.geom_simple && e.range_meets_cone_trivially.value_or(false);
        }
    }
    return out;
}

ProjectionVerdict check_projection(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx,
                                   std::optional<double> tol_cluster) {
    const SpectrumReport report = spectrum_report(a, tol_cluster);
    const std::size_t k = report.nearest_cluster(lambda0);
    const Complex center = report.clusters.at(k).center;
    if (std::abs(center - lambda0) > report.tol_cluster || std::abs(center.imag()) > report.tol_cluster) {
        throw NumericalFailure("check_projection", "lambda0 is not a real spectral value", std::abs(center - lambda0));
    }
    return check_projection(a, report, k, ctx);
}

std::vector<double> default_time_grid(double horizon) {
    std::vector<double> grid{0.0};
    for (double t = 0.01; t <= horizon; t *= 1.2) grid.push_back(t);
    return grid;
}

DistanceTrace sample_semigroup_distance(const ComplexMatrix& a, const LatticeContext& ctx, const RealVector& f,
                                        const std::vector<double>& t_grid, double eps) {
    if (f.size() != a.rows()) throw UsageError("sample_semigroup_distance: dimension mismatch");
    if (f.minCoeff() < 0.0 || f.isZero(0.0)) throw UsageError("sample_semigroup_distance: f must be positive");
    const double s = a.rows() ? spectrum_report(a).spectral_bound : 0.0;
    const Propagator prop(a - s * ComplexMatrix::Identity(a.rows(), a.cols()));
    const ComplexMatrix fm = f.cast<Complex>();
    const ComplexMatrix orbit_cols = [&] {
        ComplexMatrix out(a.rows(), static_cast<Eigen::Index>(t_grid.size()));
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            out.col(static_cast<Eigen::Index>(k)) = prop.apply(t_grid[k], fm).col(0);
        return out;
    }();
    DistanceTrace trace;
    trace.times = t_grid;
    const double bound = eps * ctx.norm(fm.col(0));
    std::vector<bool> good;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double d = dist_to_cone(orbit_cols.col(static_cast<Eigen::Index>(k)), ctx);
        trace.distances.push_back(d);
        good.push_back(d <= bound);
    }
    trace.t0 = first_stable_time(t_grid, good);
    return trace;
}

std::optional<double> find_t0_strong(const ComplexMatrix& a, const LatticeContext& ctx_in, const RealVector& f,
                                     double eps, const std::vector<double>& t_grid) {
    const LatticeContext ctx = with_default_u(ctx_in);
    if (f.size() != a.rows()) throw UsageError("find_t0_strong: dimension mismatch");
    if (!ctx.has_quasi_interior_u()) throw UsageError("find_t0_strong: u must be strictly positive");
    const SpectrumReport report = spectrum_report(a);
    const Propagator prop(a - report.spectral_bound * ComplexMatrix::Identity(a.rows(), a.cols()));
    const std::vector<double> grid = t_grid.empty() ? default_time_grid(horizon_from_margin(report.dominance_margin))
                                                    : t_grid;
    const double threshold = eps > 0.0 ? eps : strong_eps(f, ctx);
    std::vector<bool> good;
    const ComplexMatrix fm = f.cast<Complex>();
    for (double t : grid) {
        const ComplexVector g = prop.apply(t, fm).col(0);
        good.push_back(strong_positivity(RealVector(g.real()), ctx).constant >= threshold);
    }
    return first_stable_time(grid, good);
}

LeadingEigenvector leading_eigenvector(const ComplexMatrix& a, const LatticeContext& ctx_in,
                                       std::optional<double> tol_cluster) {
    const LatticeContext ctx = with_default_u(ctx_in);
    const SpectrumReport report = spectrum_report(a, tol_cluster);
    // Peripheral clusters are ordered by descending real part; take the first member.
    const EigenvalueCluster& c = report.clusters.front();
    const EigenPair ep = eigenpair(report.schur, c.members.front(), c.algebraic_multiplicity == 1);
    LeadingEigenvector out;
    out.value = ep.value;
    ComplexVector v = normalize_phase(ep.right);
    v /= gauge_norm(v, ctx);
    out.vector = v;
    out.constant = (v.real().array() / ctx.u->array()).minCoeff();
    return out;
}

SemigroupClassification classify_semigroup(const ComplexMatrix& a, const LatticeContext& ctx_in,
                                           const ClassifyOptions& opts) {
    const LatticeContext ctx = with_default_u(ctx_in);
    ctx.validate();
    if (a.rows() != a.cols() || a.rows() != ctx.n) throw UsageError("classify_semigroup: dimension mismatch");
    require_finite(a, "classify_semigroup");
    const Eigen::Index n = a.rows();
    SemigroupClassification out;

    const SpectrumReport report = spectrum_report(a, opts.tol_cluster);
    out.spectral_bound = report.spectral_bound;
    out.dominant = report.dominant;
    out.dominance_margin = report.dominance_margin;
    out.bounded_rescaled = std::all_of(report.peripheral.begin(), report.peripheral.end(),
                                       [&](std::size_t k) { return report.clusters[k].semisimple(); });

    // Plain positivity: Metzler criterion, audited by e^{hA}.
    const bool is_real = real_to_tolerance(a, 1e-14);
    if (is_real) {
        const RealMatrix re = a.real();
        const double tol = 1e-12 * std::max(max_abs(a), 1e-300);
        bool metzler = true;
        for (Eigen::Index i = 0; i < n && metzler; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j && re(i, j) < -tol) {
                    metzler = false;
                    break;
                }
        out.positive = metzler;
        const double norm = std::max(1.0, report.norm);
        bool sampled = true;
        for (double h : {1e-3, 1e-2, 1e-1}) {
            const ComplexMatrix e = expm((h / norm) * a);
            if (e.real().minCoeff() < -1e-12 * max_abs(e)) sampled = false;
        }
        out.positivity_audit_agrees = sampled == metzler;
    }

    std::optional<std::size_t> lead = report.leading_real_cluster();
    if (out.dominant && lead) {
        out.projection = check_projection(a, report, *lead, ctx);
        const bool usable = out.bounded_rescaled;
        out.eventually_strongly_positive = usable && out.projection->strongly_positive_wrt_u;
        out.asymptotically_positive = usable && out.projection->positive;
    }
    out.eventually_positive = out.positive || out.eventually_strongly_positive;

    if (out.positive) {
        out.verdict = SemigroupVerdict::Positive;
        out.theorem_basis = "off-diagonal entries are non-negative";
    } else if (!out.bounded_rescaled) {
        out.theorem_basis = "theorems not applicable: rescaled semigroup unbounded";
    } else if (!out.dominant) {
        out.theorem_basis = "spectral bound is not a dominant spectral value";
    } else if (out.eventually_strongly_positive) {
        out.verdict = SemigroupVerdict::UniformlyEventuallyStronglyPositive;
        out.theorem_basis = "bounded, s(A) dominant, P strongly positive";
    } else if (out.asymptotically_positive) {
        out.verdict = SemigroupVerdict::UniformlyAsymptoticallyPositive;
        out.theorem_basis = "bounded, s(A) dominant, P positive";
    } else {
        out.theorem_basis = "spectral projection is not positive";
    }

    out.witnesses.bounded_rescaled = out.bounded_rescaled;
    if (!opts.witnesses || n == 0) return out;

    const std::vector<double> grid =
        opts.t_grid.empty() ? default_time_grid(horizon_from_margin(report.dominance_margin)) : opts.t_grid;
    const Propagator prop(a - report.spectral_bound * ComplexMatrix::Identity(n, n));
    const std::vector<Eigen::Index> idx = witness_indices(n, opts.max_witness_vectors);
    const ComplexMatrix basis = basis_block(n, idx);
    out.witnesses.basis_indices = idx;
    const std::size_t m = idx.size();
    std::vector<std::vector<bool>> small(m), strong(m);
    const std::size_t tail_start = grid.size() - std::max<std::size_t>(1, grid.size() / 4);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const ComplexMatrix orbit = prop.apply(grid[k], basis);
        for (std::size_t j = 0; j < m; ++j) {
            const ComplexVector g = orbit.col(static_cast<Eigen::Index>(j));
            const double d = dist_to_cone(g, ctx);
            const RealVector e = basis.col(static_cast<Eigen::Index>(j)).real();
            small[j].push_back(d <= opts.eps * ctx.norm(e.cast<Complex>()));
            strong[j].push_back(strong_positivity(RealVector(g.real()), ctx).constant >= strong_eps(e, ctx));
            if (k >= tail_start) out.witnesses.sup_tail_distance = std::max(out.witnesses.sup_tail_distance, d);
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        out.witnesses.t0_per_basis_vector.push_back(first_stable_time(grid, small[j]));
        out.witnesses.strong_t0_per_basis_vector.push_back(first_stable_time(grid, strong[j]));
    }
    return out;
}

ResolventClassification classify_resolvent(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx_in,
                                           const ClassifyOptions& opts) {
    const LatticeContext ctx = with_default_u(ctx_in);
    ctx.validate();
    if (a.rows() != ctx.n) throw UsageError("classify_resolvent: dimension mismatch");
    const Eigen::Index n = a.rows();
    const SpectrumReport report = spectrum_report(a, opts.tol_cluster);
    const std::size_t k = report.nearest_cluster(lambda0);
    const EigenvalueCluster& c = report.clusters.at(k);
    if (std::abs(c.center - lambda0) > report.tol_cluster) {
        throw NumericalFailure("classify_resolvent", "lambda0 is not a real spectral value", std::abs(c.center - lambda0));
    }

    ResolventClassification out;
    out.projection = check_projection(a, report, k, ctx);
    out.simple_pole = c.pole_order == 1;

    // Distance from λ0 to the rest of the spectrum sets the sampling scale.
    double gap = kInf;
    for (std::size_t j = 0; j < report.clusters.size(); ++j)
        if (j != k) gap = std::min(gap, std::abs(report.clusters[j].center - lambda0));
    const double delta = opts.resolvent_delta.value_or(std::isfinite(gap) ? gap / 10.0 : 0.1 * std::max(1.0, std::abs(lambda0)));

    std::vector<RealVector> vectors;
    for (Eigen::Index i : witness_indices(n, opts.max_witness_vectors)) vectors.push_back(RealVector::Unit(n, i));
    for (const RealVector& f : opts.test_vectors) {
        if (f.size() != n || f.minCoeff() < 0.0) throw UsageError("classify_resolvent: test vectors must be positive");
        vectors.push_back(f);
    }
    ComplexMatrix block(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) block.col(static_cast<Eigen::Index>(j)) = vectors[j].cast<Complex>();

    std::vector<bool> right_strong, left_strong, right_pos;
    std::vector<double> scaled;
    bool stop = false;
    for (int j = 0; j < opts.resolvent_samples && !stop; ++j) {
        const double off = delta * std::ldexp(1.0, -j);
        for (int side : {1, -1}) {
            const double lambda = lambda0 + side * off;
            ComplexMatrix r;
            try {
                r = resolvent(a, lambda) * block;
            } catch (const NumericalFailure&) {
                // Higher-order poles reach the singularity threshold first.
                if (j < 4) throw;
                stop = true;
                break;
            }
            ResolventSample sample{lambda, kInf, 0.0};
            double scaled_max = 0.0;
            bool all_pos = true;
            for (Eigen::Index col = 0; col < r.cols(); ++col) {
                const ComplexVector g = r.col(col);
                const RealVector f = block.col(col).real();
                const double eps = strong_eps(f, ctx);
                const double constant = strong_positivity(RealVector(side * g.real()), ctx).constant;
                sample.min_constant = std::min(sample.min_constant, constant / eps);
                const double d = dist_to_cone(g, ctx);
                sample.max_distance = std::max(sample.max_distance, d);
                scaled_max = std::max(scaled_max, off * d / ctx.norm(block.col(col)));
                if (d > 1e-12 * ctx.norm(g)) all_pos = false;
            }
            if (side == 1) {
                out.right_samples.push_back(sample);
                right_strong.push_back(sample.min_constant >= 1.0);
                right_pos.push_back(all_pos);
                scaled.push_back(scaled_max);
            } else {
                out.left_samples.push_back(sample);
                left_strong.push_back(sample.min_constant >= 1.0);
            }
        }
    }

    // Eventual behaviour is read off the smallest offsets.
    const std::size_t tail = std::max<std::size_t>(1, right_strong.size() / 4);
    auto tail_all = [tail](const std::vector<bool>& v) {
        return std::all_of(v.end() - static_cast<std::ptrdiff_t>(tail), v.end(), [](bool b) { return b; });
    };
    out.right_strongly_positive = tail_all(right_strong);
    out.left_strongly_negative = tail_all(left_strong);
    out.right_positive = tail_all(right_pos);
    if (out.right_strongly_positive) {
        std::size_t first = right_strong.size();
        while (first > 0 && right_strong[first - 1]) --first;
        out.lambda1 = out.right_samples[first].lambda;
    }
    const double scaled_peak = *std::max_element(scaled.begin(), scaled.end());
    out.scaled_distance_vanishes = scaled.back() <= std::max(1e-4 * scaled_peak, 1e-13);
    double early = 0.0, late = 0.0;
    for (std::size_t j = 0; j < out.right_samples.size(); ++j) {
        (j < out.right_samples.size() / 2 ? early : late) =
            std::max(j < out.right_samples.size() / 2 ? early : late, out.right_samples[j].max_distance);
    }
    const double fscale = block.cwiseAbs().maxCoeff();
    out.bounded_type = late <= 4.0 * early + 1e-10 * fscale / std::max(delta, 1e-300);

    if (out.projection.strongly_positive_wrt_u) {
        out.verdict = ResolventVerdict::EventuallyStronglyPositive;
        out.theorem_basis = "P strongly positive at a pole";
    } else if (out.projection.positive && out.simple_pole) {
        out.verdict = ResolventVerdict::AsymptoticallyPositiveBoundedType;
        out.theorem_basis = "P positive at a simple pole";
    } else {
        out.theorem_basis = out.simple_pole ? "spectral projection is not positive" : "pole of order greater than one";
    }
    return out;
}

PowerClassification classify_power(const ComplexMatrix& t, const LatticeContext& ctx_in, const ClassifyOptions& opts) {
    const LatticeContext ctx = with_default_u(ctx_in);
    ctx.validate();
    if (t.rows() != t.cols() || t.rows() != ctx.n) throw UsageError("classify_power: dimension mismatch");
    const Eigen::Index n = t.rows();
    PowerClassification out;
    const SpectrumReport report = spectrum_report(t, opts.tol_cluster);
    double r = 0.0;
    for (const auto& c : report.clusters) r = std::max(r, std::abs(c.center));
    if (!(r > report.tol_cluster)) throw NumericalFailure("classify_power", "spectral radius is zero to tolerance", r);
    out.spectral_radius = r;
    double rest = 0.0;
    for (std::size_t k = 0; k < report.clusters.size(); ++k) {
        const double mod = std::abs(report.clusters[k].center);
        if (mod >= r - report.tol_cluster) {
            out.peripheral.push_back(k);
        } else {
            rest = std::max(rest, mod);
        }
    }
    out.power_bounded = std::all_of(out.peripheral.begin(), out.peripheral.end(),
                                    [&](std::size_t k) { return report.clusters[k].semisimple(); });
    out.P = spectral_projection_sum(t, report, out.peripheral);
    const double pscale = max_abs(out.P);
    out.projection_positive = real_to_tolerance(out.P) && out.P.real().minCoeff() >= -1e-9 * pscale;

    std::int64_t n_max = opts.n_max;
    const PowerSampler sampler(t / r);
    if (n_max <= 0) {
        const double rho = rest / r;
        const double needed = rho > 0.0 ? 60.0 / -std::log(rho) : 64.0;
        const double cap = sampler.diagonalized() ? 1e12 : 1e6;
        n_max = static_cast<std::int64_t>(std::clamp(std::ceil(needed), 64.0, cap));
    }
    std::vector<std::int64_t> grid;
    for (double v = 1.0; v < static_cast<double>(n_max) - 8; v *= 1.25) {
        const auto k = static_cast<std::int64_t>(std::floor(v));
        if (grid.empty() || grid.back() != k) grid.push_back(k);
    }
    const std::int64_t tail_start = std::max<std::int64_t>(grid.empty() ? 1 : grid.back() + 1, n_max - 7);
    for (std::int64_t k = tail_start; k <= n_max; ++k) grid.push_back(k);
    const std::size_t tail = static_cast<std::size_t>(n_max - tail_start + 1);

    const std::vector<Eigen::Index> idx = witness_indices(n, opts.max_witness_vectors);
    const ComplexMatrix basis = basis_block(n, idx);
    std::vector<bool> strong;
    for (std::int64_t k : grid) {
        const ComplexMatrix orbit = sampler.apply(k, basis);
        double worst = 0.0;
        bool all_strong = real_to_tolerance(orbit);
        for (Eigen::Index j = 0; j < orbit.cols(); ++j) {
            const ComplexVector g = orbit.col(j);
            worst = std::max(worst, dist_to_cone(g, ctx) / ctx.norm(basis.col(j)));
            if (all_strong) {
                const RealVector e = basis.col(j).real();
                all_strong = strong_positivity(RealVector(g.real()), ctx).constant >= strong_eps(e, ctx);
            }
        }
        out.sampled_n.push_back(k);
        out.max_distance.push_back(worst);
        strong.push_back(all_strong);
    }
    const double tail_distance =
        *std::max_element(out.max_distance.end() - static_cast<std::ptrdiff_t>(tail), out.max_distance.end());
    out.asymptotically_positive = out.power_bounded && out.projection_positive && tail_distance <= 1e-7;
    bool tail_strong = true;
    for (std::size_t k = strong.size() - tail; k < strong.size(); ++k) tail_strong = tail_strong && strong[k];
    out.eventually_strongly_positive = out.power_bounded && tail_strong;
    if (tail_strong) {
        std::size_t first = strong.size();
        while (first > 0 && strong[first - 1]) --first;
        out.n0 = grid[first];
    }
    return out;
}

EquivalenceCheck finite_dim_equivalence_check(const ComplexMatrix& a, const LatticeContext& ctx,
                                              const ClassifyOptions& opts) {
    EquivalenceCheck out;
    ClassifyOptions sopts = opts;
    sopts.witnesses = false;
    out.semigroup = classify_semigroup(a, ctx, sopts);
    if (!out.semigroup.bounded_rescaled) {
        throw UsageError("finite_dim_equivalence_check: rescaled semigroup is unbounded");
    }
    out.semigroup_side = out.semigroup.asymptotically_positive;

    const SpectrumReport report = spectrum_report(a, opts.tol_cluster);
    const double s = report.spectral_bound;
    double min_re = 0.0;
    double c = 0.0;
    for (const auto& cl : report.clusters) {
        min_re = std::min(min_re, cl.center.real());
        const double gap = s - cl.center.real();
        // s + c > |λ + c| ⟺ 2c(s − Re λ) > |λ|² − s².
        if (gap > report.tol_cluster) c = std::max(c, (std::norm(cl.center) - s * s) / (2.0 * gap));
    }
    const double margin = std::isfinite(report.dominance_margin) ? report.dominance_margin : 0.0;
    c = std::max(c + 1.0, 1.0 + std::max(0.0, -min_re) + margin);
    // Keep s + c well away from zero.
    if (s + c < 1.0) c = 1.0 - s;
    out.shift = c;
    ClassifyOptions popts = opts;
    if (popts.tol_cluster) popts.tol_cluster = std::max(*popts.tol_cluster, default_tol_cluster(a));
    out.power = classify_power(a + c * ComplexMatrix::Identity(a.rows(), a.cols()), ctx, popts);
    out.shifted_power_side = out.power.asymptotically_positive;
    out.consistent = out.semigroup_side == out.shifted_power_side;
    return out;
}

TwoDimCheck two_dim_theorem_check(const RealMatrix& a, const LatticeContext& ctx) {
    if (a.rows() != 2 || a.cols() != 2) throw UsageError("two_dim_theorem_check: matrix must be 2x2");
    ClassifyOptions opts;
    opts.witnesses = false;
    const SemigroupClassification c = classify_semigroup(a.cast<Complex>(), ctx, opts);
    TwoDimCheck out;
    out.asymptotically_positive = c.asymptotically_positive;
    const double tol = 1e-12 * std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    out.positive = a(0, 1) >= -tol && a(1, 0) >= -tol;
    out.theorem_holds = !out.asymptotically_positive || out.positive;
    return out;
}

ComplexMatrix neumann_series_resolvent(const ComplexMatrix& a, Complex mu, Complex lambda, int terms) {
    if (terms < 1) throw UsageError("neumann_series_resolvent: need at least one term");
    const ComplexMatrix r = resolvent(a, mu);
    ComplexMatrix term = r;
    ComplexMatrix sum = r;
    const double first = std::max(max_abs(r), 1e-300);
    const Complex q = mu - lambda;
    for (int k = 1; k < terms; ++k) {
        term = q * (r * term);
        const double size = max_abs(term);
        if (!std::isfinite(size) || size > 1e3 * first) {
            throw NumericalFailure("neumann_series_resolvent", "series terms grow; lambda outside the convergence disk",
                                   size / first);
        }
        sum += term;
    }
    return sum;
}

RealMatrix random_dominant_matrix(int n, RandomShape shape, std::mt19937_64& rng) {
    if (n < 2) throw UsageError("random_dominant_matrix: n must be at least 2");
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.1, 1.0);
    RealVector v(n), w(n);
    for (;;) {
        for (int i = 0; i < n; ++i) {
            switch (shape) {
                case RandomShape::PositiveRankOne:
                    v(i) = pos(rng);
                    w(i) = pos(rng);
                    break;
                case RandomShape::MixedLeft:
                    v(i) = pos(rng);
                    w(i) = uni(rng);
                    break;
                case RandomShape::Generic:
                    v(i) = uni(rng);
                    w(i) = uni(rng);
                    break;
            }
        }
        if (shape == RandomShape::MixedLeft) {
            // Force one entry of each sign with modulus at least 0.1.
            w(0) = pos(rng);
            w(n - 1) = -pos(rng);
        }
        const double dot = w.dot(v);
        if (std::abs(dot) > 0.1) {
            w /= dot;
            break;
        }
    }
    const RealMatrix q = RealMatrix::Identity(n, n) - v * w.transpose();
    RealMatrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = uni(rng);
    const RealMatrix c = q * b * q;
    const double s = uni(rng);
    const ComplexVector ev = Eigen::ComplexEigenSolver<ComplexMatrix>(c.cast<Complex>(), false).eigenvalues();
    const double alpha = ev.real().maxCoeff() - s + 0.2 + 0.8 * (0.5 * (uni(rng) + 1.0));
    return s * v * w.transpose() + c - alpha * q;
}

}  // namespace apos
