#include "apos/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace apos {

namespace {

double norm1(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

double max_entry(const ComplexMatrix& a) {
    return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::Index numerical_rank(const ComplexMatrix& m, double threshold) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) ++r;
    }
    return r;
}

// Swap the adjacent diagonal entries k, k+1 of an upper triangular Schur
// factor with one unitary rotation, updating Q alongside.
void swap_schur_pair(ComplexMatrix& u, ComplexMatrix& q, Eigen::Index k) {
    const Complex a = u(k, k);
    const Complex c = u(k + 1, k + 1);
    const Complex b = u(k, k + 1);
    Complex x1 = b;
    Complex x2 = c - a;
    const double len = std::hypot(std::abs(x1), std::abs(x2));
    if (len == 0.0) return;
    x1 /= len;
    x2 /= len;
    Eigen::Matrix2cd z;
    z << x1, -std::conj(x2), x2, std::conj(x1);
    const Eigen::Index n = u.rows();
    u.block(k, 0, 2, n) = z.adjoint() * u.block(k, 0, 2, n);
    u.block(0, k, n, 2) = u.block(0, k, n, 2) * z;
    q.block(0, k, n, 2) = q.block(0, k, n, 2) * z;
    u(k + 1, k) = 0.0;
}

}  // namespace

std::string to_string(ProjectionData::Method m) {
    switch (m) {
        case ProjectionData::Method::EigenDyad: return "eigen-dyad";
        case ProjectionData::Method::SchurSylvester: return "schur-sylvester";
        case ProjectionData::Method::Contour: return "contour";
    }
    return "?";
}

double default_tol_cluster(const ComplexMatrix& a) {
    return 1e-7 * std::max(1.0, norm1(a));
}

std::size_t SpectrumReport::nearest_cluster(Complex z) const {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const double d = std::abs(clusters[i].center - z);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

std::optional<std::size_t> SpectrumReport::leading_real_cluster() const {
    for (std::size_t idx : peripheral) {
        if (std::abs(clusters[idx].center.imag()) <= tol_cluster) return idx;
    }
    return std::nullopt;
}

SpectrumReport spectrum_report(const ComplexMatrix& a, std::optional<double> tol_cluster) {
    SpectrumReport rep;
    rep.schur = schur_decompose(a);
    rep.norm = norm1(a);
    rep.tol_cluster = tol_cluster.value_or(default_tol_cluster(a));
    const Eigen::Index n = a.rows();
    const double tol = rep.tol_cluster;

    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex ev = rep.schur.eigenvalue(k);
        EigenvalueCluster* target = nullptr;
        double best = tol;
        for (auto& c : rep.clusters) {
            const double d = std::abs(c.center - ev);
            if (d <= best) {
                best = d;
                target = &c;
            }
        }
        if (target) {
            target->members.push_back(k);
            Complex sum = 0.0;
            for (auto m : target->members) sum += rep.schur.eigenvalue(m);
            target->center = sum / static_cast<double>(target->members.size());
        } else {
            EigenvalueCluster c;
            c.center = ev;
            c.members = {k};
            rep.clusters.push_back(std::move(c));
        }
    }

    std::sort(rep.clusters.begin(), rep.clusters.end(), [](const EigenvalueCluster& x, const EigenvalueCluster& y) {
        if (x.center.real() != y.center.real()) return x.center.real() > y.center.real();
        return x.center.imag() > y.center.imag();
    });

    for (std::size_t i = 0; i < rep.clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.clusters.size(); ++j) {
            if (std::abs(rep.clusters[i].center - rep.clusters[j].center) < 2.0 * tol) rep.ambiguous_clustering = true;
        }
    }

    const double scale = std::max(1.0, rep.norm);
    for (auto& c : rep.clusters) {
        c.algebraic_multiplicity = static_cast<int>(c.members.size());
        if (c.algebraic_multiplicity == 1) {
            c.geometric_multiplicity = 1;
            c.pole_order = 1;
            continue;
        }
        // Rank tests in the Schur basis: same singular values, triangular factor.
        ComplexMatrix shifted = rep.schur.triangular;
        shifted.diagonal().array() -= c.center;
        ComplexMatrix power = shifted;
        Eigen::Index rank_prev = numerical_rank(power, kTolRank * scale);
        c.geometric_multiplicity = static_cast<int>(n - rank_prev);
        c.pole_order = c.algebraic_multiplicity;
        double thr = kTolRank * scale;
        for (int k = 1; k <= c.algebraic_multiplicity; ++k) {
            power = power * shifted;
            thr *= scale;
            const Eigen::Index rank_next = numerical_rank(power, thr);
            if (rank_next == rank_prev) {
                c.pole_order = k;
                break;
            }
            rank_prev = rank_next;
        }
        c.geometric_multiplicity = std::clamp(c.geometric_multiplicity, 1, c.algebraic_multiplicity);
    }

    rep.spectral_bound = -std::numeric_limits<double>::infinity();
    for (const auto& c : rep.clusters) rep.spectral_bound = std::max(rep.spectral_bound, c.center.real());

    double rest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.clusters.size(); ++i) {
        const double re = rep.clusters[i].center.real();
        if (std::abs(re - rep.spectral_bound) <= tol) {
            rep.peripheral.push_back(i);
        } else {
            rest = std::max(rest, re);
        }
    }
    rep.dominant = rep.peripheral.size() == 1 &&
                   std::abs(rep.clusters[rep.peripheral.front()].center.imag()) <= tol;
    rep.dominance_margin = std::isfinite(rest) ? rep.spectral_bound - rest : std::numeric_limits<double>::infinity();
    return rep;
}

ProjectionData spectral_projection(const ComplexMatrix& a, const SpectrumReport& report, std::size_t cluster) {
    if (cluster >= report.clusters.size()) throw UsageError("spectral_projection: cluster index out of range");
    const auto& cl = report.clusters[cluster];
    const auto& schur = report.schur;
    const Eigen::Index n = schur.size();

    // Isolation: no eigenvalue of another cluster within 4·tol_cluster.
    double separation = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::find(cl.members.begin(), cl.members.end(), k) != cl.members.end()) continue;
        for (auto m : cl.members) separation = std::min(separation, std::abs(schur.eigenvalue(k) - schur.eigenvalue(m)));
    }
    if (!(separation > 4.0 * report.tol_cluster)) {
        throw NumericalFailure("spectral_projection", "cluster is not isolated from the rest of the spectrum",
                               separation);
    }

    ProjectionData out;
    out.cluster = cl;
    if (cl.algebraic_multiplicity == 1) {
        const EigenPair ep = eigenpair(schur, cl.members.front(), true);
        out.P = ep.right * ep.left.adjoint();
        out.method = ProjectionData::Method::EigenDyad;
    } else {
        ComplexMatrix u = schur.triangular;
        ComplexMatrix q = schur.unitary;
        std::vector<Eigen::Index> members = cl.members;
        std::sort(members.begin(), members.end());
        // Bubble each member to the front, preserving relative order.
        for (std::size_t target = 0; target < members.size(); ++target) {
            for (Eigen::Index pos = members[target]; pos > static_cast<Eigen::Index>(target); --pos) {
                swap_schur_pair(u, q, pos - 1);
            }
        }
        const Eigen::Index m = static_cast<Eigen::Index>(members.size());
        const Eigen::Index r = n - m;
        ComplexMatrix x = ComplexMatrix::Zero(m, r);
        if (r > 0) {
            const ComplexMatrix u11 = u.topLeftCorner(m, m);
            const ComplexMatrix u12 = u.topRightCorner(m, r);
            const ComplexMatrix u22 = u.bottomRightCorner(r, r);
            double sep = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < r; ++j) sep = std::min(sep, std::abs(u11(i, i) - u22(j, j)));
            if (!(sep > 1e-13 * std::max(1.0, report.norm))) {
                throw NumericalFailure("spectral_projection", "Sylvester separation below threshold", sep);
            }
            // U11 X − X U22 = −U12, column by column.
            for (Eigen::Index j = 0; j < r; ++j) {
                ComplexVector rhs = -u12.col(j);
                for (Eigen::Index i = 0; i < j; ++i) rhs += x.col(i) * u22(i, j);
                ComplexMatrix shifted = u11;
                shifted.diagonal().array() -= u22(j, j);
                x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
            }
        }
        ComplexMatrix block = ComplexMatrix::Zero(n, n);
        block.topLeftCorner(m, m).setIdentity();
        block.topRightCorner(m, r) = -x;
        out.P = q * block * q.adjoint();
        out.method = ProjectionData::Method::SchurSylvester;
    }
    out.residual = std::max(max_entry(out.P * out.P - out.P), max_entry(a * out.P - out.P * a));
    return out;
}

ComplexMatrix spectral_projection_sum(const ComplexMatrix& a, const SpectrumReport& report,
                                      const std::vector<std::size_t>& clusters) {
    const Eigen::Index n = a.rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (auto c : clusters) sum += spectral_projection(a, report, c).P;
    return sum;
}

ComplexMatrix projection_by_contour(const ComplexMatrix& a, Complex center, double radius, int m) {
    if (m < 3) throw UsageError("projection_by_contour: need at least 3 nodes");
    if (!(radius > 0.0)) throw UsageError("projection_by_contour: radius must be positive");
    const SchurForm schur = schur_decompose(a);
    const double tol = 1e-8 * std::max(1.0, radius);
    for (Eigen::Index k = 0; k < schur.size(); ++k) {
        const double gap = std::abs(std::abs(schur.eigenvalue(k) - center) - radius);
        if (gap < tol) throw NumericalFailure("projection_by_contour", "contour passes through the spectrum", gap);
    }
    const Eigen::Index n = a.rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / m;
        const Complex offset = std::polar(radius, theta);
        sum += offset * resolvent(a, center + offset);
    }
    return sum / static_cast<double>(m);
}

ComplexMatrix projection_by_abel(const ComplexMatrix& a, double lambda0, int steps) {
    const double delta = std::pow(10.0, -steps);
    return delta * resolvent(a, lambda0 + delta);
}

ComplexMatrix projection_by_power(const ComplexMatrix& a, double lambda, int iterations) {
    if (!(lambda > 0.0)) throw UsageError("projection_by_power: lambda must be positive");
    const ComplexMatrix t = lambda * resolvent(a, lambda);
    const Eigen::Index n = a.rows();
    ComplexMatrix acc = ComplexMatrix::Identity(n, n);
    const double start = std::max(1.0, norm1(t));
    for (int k = 0; k < iterations; ++k) {
        acc = acc * t;
        const double growth = norm1(acc);
        if (!std::isfinite(growth) || growth > 1e8 * start) {
            throw NumericalFailure("projection_by_power", "power sequence diverges", growth);
        }
    }
    return acc;
}

AbelGrowth abel_growth_check(const ComplexMatrix& a, double lambda0, const LatticeContext& ctx, int samples,
                             std::optional<int> pole_order) {
    if (samples < 3) throw UsageError("abel_growth_check: need at least 3 samples");
    AbelGrowth out;
    for (int j = 1; j <= samples; ++j) {
        const double delta = std::pow(10.0, -j);
        out.lambdas.push_back(lambda0 + delta);
        out.values.push_back(operator_norm(delta * resolvent(a, lambda0 + delta), ctx));
    }
    const auto tail = std::vector<double>(out.values.end() - 3, out.values.end());
    const double hi = *std::max_element(tail.begin(), tail.end());
    const double lo = *std::min_element(tail.begin(), tail.end());
    out.bounded = lo > 0.0 && hi / lo < 10.0;
    if (pole_order) out.consistent_with_pole_order = out.bounded == (*pole_order <= 1);
    return out;
}

}  // namespace apos
