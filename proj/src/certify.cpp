#include "apos/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "apos/classify.hpp"
#include "apos/dynamics.hpp"
#include "apos/models.hpp"
#include "apos/special.hpp"
#include "apos/spectral.hpp"

namespace apos {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "FAILED " << what << "; ";
        }
    }
    template <class T>
    void note(const std::string& key, const T& value) {
        detail << key << "=" << value << "; ";
    }
};

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double min_real_entry(const ComplexMatrix& m) { return m.real().minCoeff(); }

// Criterion 1: the spiral example.
void spiral(Outcome& out) {
    const ModelBundle m = spiral3();
    const SemigroupClassification c = classify_semigroup(m.A, m.ctx);
    out.note("verdict", to_string(c.verdict));
    out.require(c.asymptotically_positive, "asymptotically positive");
    out.require(!c.eventually_positive, "not eventually positive");
    ComplexMatrix unit = ComplexMatrix::Zero(3, 3);
    unit(0, 0) = 1.0;
    double perr = INFINITY;
    if (c.projection) perr = max_abs(c.projection->P - unit);
    out.note("projection_error", perr);
    out.require(perr <= 1e-10, "P = unit(1,1) within 1e-10");

    const Propagator prop(m.A);
    for (int k = 0; k <= 3; ++k) {
        double best = INFINITY;
        const double t0 = 2.0 * std::numbers::pi * k;
        for (int j = 0; j <= 200; ++j) {
            const double t = t0 + 2.0 * std::numbers::pi * j / 200.0;
            best = std::min(best, min_real_entry(prop.at(t)) / std::exp(-t));
        }
        out.require(best <= -0.3, "window " + std::to_string(k) + " has an entry <= -0.3 e^{-t}");
    }
    double tail = 0.0;
    const ComplexVector e2 = ComplexVector::Unit(3, 1);
    for (double t = 16.0; t <= 60.0; t += 0.05) tail = std::max(tail, dist_to_cone(prop.apply(t, e2), m.ctx));
    out.note("sup_d_plus_t>=16", tail);
    out.require(tail <= 1e-6, "d+(e^{tA}e2) <= 1e-6 for t >= 16");
}

// Criterion 2: asymptotically positive 2×2 matrices are Metzler.
void two_by_two(Outcome& out) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const LatticeContext ctx = LatticeContext::ones(2, Exponent::Inf);
    int accepted = 0;
    int asymptotic = 0;
    int violations = 0;
    while (accepted < 1000) {
        RealMatrix a(2, 2);
        a << uni(rng), uni(rng), uni(rng), uni(rng);
        const SpectrumReport rep = spectrum_report(a.cast<Complex>());
        bool semisimple = true;
        for (std::size_t c : rep.peripheral) semisimple = semisimple && rep.clusters[c].semisimple();
        if (!semisimple) continue;
        ++accepted;
        const TwoDimCheck chk = two_dim_theorem_check(a, ctx);
        asymptotic += chk.asymptotically_positive;
        violations += !chk.theorem_holds;
    }
    out.note("asymptotically_positive", asymptotic);
    out.note("violations", violations);
    out.require(violations == 0, "asymptotically positive implies Metzler");
    out.require(asymptotic > 0, "some sampled matrix is asymptotically positive");
}

// Criterion 3: semigroup vs shifted powers.
void equivalence(Outcome& out) {
    int checked = 0;
    std::string bad;
    for (const ModelBundle& m : matrix_models()) {
        ClassifyOptions opts;
        opts.tol_cluster = m.tol_cluster;
        const EquivalenceCheck e = finite_dim_equivalence_check(m.A, m.ctx, opts);
        ++checked;
        if (!e.consistent) bad += m.name + " ";
    }
    std::mt19937_64 rng(314159);
    const RandomShape shapes[] = {RandomShape::PositiveRankOne, RandomShape::MixedLeft, RandomShape::Generic};
    for (int k = 0; k < 500; ++k) {
        const int n = 2 + k % 7;
        const RealMatrix a = random_dominant_matrix(n, shapes[k % 3], rng);
        const EquivalenceCheck e = finite_dim_equivalence_check(a.cast<Complex>(), LatticeContext::ones(n, Exponent::Inf));
        ++checked;
        if (!e.consistent) bad += "random#" + std::to_string(k) + " ";
    }
    out.note("checked", checked);
    out.require(bad.empty(), "consistent on " + (bad.empty() ? std::string("all") : bad));
}

// Criterion 4: the thermostat.
void thermostat(Outcome& out) {
    ClassifyOptions opts;
    opts.witnesses = false;
    const auto classify = [&](double beta) {
        const ModelBundle m = nonlocal_robin_thermostat(400, beta);
        return classify_semigroup(m.A, m.ctx, opts);
    };
    const SemigroupClassification neg = classify(-0.5);
    out.require(neg.positive, "beta=-0.5 positive");
    for (double beta : {0.2, 0.45}) {
        const SemigroupClassification c = classify(beta);
        out.require(c.eventually_strongly_positive && !c.positive,
                    "beta=" + std::to_string(beta) + " eventually strongly positive and not positive");
    }
    const ModelBundle m = nonlocal_robin_thermostat(400, 0.6);
    const SemigroupClassification c = classify_semigroup(m.A, m.ctx, opts);
    const LeadingEigenvector lead = leading_eigenvector(m.A, m.ctx);
    out.note("beta=0.6_constant", lead.constant);
    out.require(!c.eventually_strongly_positive, "beta=0.6 not eventually strongly positive");
    out.require(lead.constant <= 1e-8, "beta=0.6 leading eigenvector constant <= 0");
}

// Criterion 5: the ones-matrix Robin problem.
void robin_ones(Outcome& out) {
    const int n = 200;
    const ModelBundle m = nonlocal_robin_ones(n);
    const ComplexMatrix r = resolvent(m.A, 0.0);
    const ComplexVector y = r * ComplexVector::Ones(n);
    const double h = 1.0 / (n - 1);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        err = std::max(err, std::abs(y(i) - (0.25 + 0.5 * x - 0.5 * x * x)));
    }
    out.note("max_error", err);
    out.require(err <= 5.0 / n, "R(0)1 matches 1/4 + x/2 - x^2/2 within 5/N");

    // u⁺ supported at x = 0, u⁻ at x = 1: a(u⁺, u⁻) = ⟨−A u⁺, u⁻⟩_w.
    const RealVector plus = RealVector::Unit(n, 0);
    const RealVector minus = RealVector::Unit(n, n - 1);
    const double value = (minus.cwiseProduct(m.ctx.weights)).dot((-m.A.real() * plus));
    out.note("beurling_deny", value);
    out.require(std::abs(value - 1.0) <= 1e-10, "Beurling-Deny witness = 1");

    const SemigroupClassification c = classify_semigroup(m.A, m.ctx);
    out.note("verdict", to_string(c.verdict));
    out.require(c.eventually_strongly_positive && !c.positive, "eventually strongly positive and not positive");
}

// Criterion 6: the delay equation.
void delay(Outcome& out) {
    const CharFunction h = delay_characteristic();
    const Rect rect{-0.01, 2.0, -60.0, 60.0};
    const int count = count_roots(h, rect);
    out.note("root_count", count);
    out.require(count == 1, "one root in the rectangle");
    const RootSet roots = find_roots(h, rect);
    const bool at_zero = roots.roots.size() == 1 && std::abs(roots.roots[0].value) <= 1e-10;
    out.require(at_zero, "refined root at 0");

    const double step = 1e-3;
    const SimulationTrace tr = simulate_delay(hat_function(-1.0, 0.2), 50.0, step, {.record_every = 10});
    const auto& phi = tr.functionals.at("phi");
    double drift = 0.0;
    double early_min = 0.0;
    double d40 = INFINITY;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        drift = std::max(drift, std::abs(phi[k] - phi.front()));
        if (tr.times[k] <= 2.0) early_min = std::min(early_min, tr.min_value[k]);
        if (std::abs(tr.times[k] - 40.0) < 0.5 * step) d40 = tr.d_plus[k];
    }
    out.note("phi_drift", drift);
    out.note("early_min", early_min);
    out.note("d_plus_40", d40);
    out.require(drift <= 1e-8, "phi conserved to 1e-8");
    out.require(early_min < -1e-3, "solution negative before t = 2");
    out.require(d40 <= 1e-4, "d+ <= 1e-4 at t = 40");
}

// Criterion 7: the network flow.
void network(Outcome& out) {
    const double l = std::sqrt(2.0);
    const int n = 256;
    const CharFunction s = network_characteristic(l);
    out.require(s(0.0) == Complex(0.0, 0.0), "det S(0) = 0");
    const int count = count_roots(s, {-0.05, 1.0, -40.0, 40.0});
    out.note("root_count", count);
    out.require(count == 1, "one root in Re in [-0.05,1], |Im| <= 40");

    const GraphState init = graph_bump_state(l, n, 0.5, 0.05);
    const double mass = init.width[0] * init.f[0].sum();
    const SimulationTrace tr = simulate_graph_flow(init, 100.0, 1.0 / n, {.record_every = 4});
    const auto& psi = tr.functionals.at("psi");
    double drift = 0.0;
    double window_min = 0.0;
    double d80 = INFINITY;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        drift = std::max(drift, std::abs(psi[k] - psi.front()));
        if (tr.times[k] > 0.5 && tr.times[k] < 2.0) window_min = std::min(window_min, tr.min_value[k]);
        if (std::abs(tr.times[k] - 80.0) < 0.5 / n) d80 = tr.d_plus[k];
    }
    out.note("psi_drift", drift);
    out.note("window_min", window_min);
    out.note("d_plus_80", d80);
    out.require(drift <= 1e-3 * std::abs(psi.front()), "psi drift <= 1e-3 psi(0)");
    out.require(window_min <= -0.2 * mass, "minimum <= -0.2 mass for t in (0.5, 2)");
    out.require(d80 <= 1e-2 * std::abs(psi.front()), "d+(80) <= 1e-2 psi(0)");
}

// Criterion 8: the clamped beam.
constexpr double kBeamConstantFloor = 0.1;

void beam(Outcome& out) {
    for (int n : {50, 100, 200}) {
        const ModelBundle m = bilaplacian_clamped_1d(n);
        const SpectrumReport rep = spectrum_report(m.A, m.tol_cluster);
        const auto lead = rep.leading_real_cluster();
        const bool simple = lead && rep.clusters[*lead].algebraic_multiplicity == 1 && rep.dominance_margin > 0.0;
        out.require(simple, "N=" + std::to_string(n) + " leading eigenvalue simple with a gap");
        const LeadingEigenvector v = leading_eigenvector(m.A, m.ctx, m.tol_cluster);
        out.note("c(N=" + std::to_string(n) + ")", v.constant);
        out.require(v.constant >= kBeamConstantFloor, "N=" + std::to_string(n) + " eigenvector constant >= c0");
        if (!lead) continue;
        const ProjectionVerdict pv = check_projection(m.A, rep, *lead, m.ctx);
        const double pmin = min_real_entry(pv.P);
        out.require(pmin >= -1e-9, "N=" + std::to_string(n) + " P >= -1e-9");
    }
    const ModelBundle m = bilaplacian_clamped_1d(100);
    const Eigen::Index j = 50;
    double worst = 0.0;
    double at_h = 0.0;
    for (double h = 1e-12; h <= 1e-2; h *= 10.0) {
        const ComplexVector col = expm(h * m.A).col(j);
        const double v = col.real().minCoeff();
        if (v < worst) {
            worst = v;
            at_h = h;
        }
    }
    out.note("most_negative_entry", worst);
    out.note("at_h", at_h);
    out.require(worst <= -1e-6, "e^{hA}e_j has an entry <= -1e-6");
    const std::optional<double> t0 = find_t0_strong(m.A, m.ctx, RealVector::Unit(100, 50));
    out.note("t0_strong", t0 ? *t0 : INFINITY);
    out.require(t0.has_value(), "find_t0_strong finite for e_{N/2}");
}

// Criterion 9: the squared Dirichlet Laplacian.
void dirichlet_squared(Outcome& out) {
    const ModelBundle m = dirichlet_laplacian_sq_1d(64);
    const int n = 64;
    const double h = 1.0 / (n + 1);
    RealMatrix d = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = -2.0 / (h * h);
        if (i > 0) d(i, i - 1) = 1.0 / (h * h);
        if (i + 1 < n) d(i, i + 1) = 1.0 / (h * h);
    }
    const ComplexMatrix r = resolvent(m.A, 0.0);
    const ComplexMatrix rd = resolvent(d.cast<Complex>(), 0.0);
    const double err = max_abs(r - rd * rd) / max_abs(r);
    out.note("min_entry", r.real().minCoeff());
    out.note("relative_error", err);
    out.require(r.real().minCoeff() > 0.0, "R(0,A) entrywise positive");
    out.require(err <= 1e-10, "R(0,A) = R(0,Delta_D)^2");
    const SemigroupClassification c = classify_semigroup(m.A, m.ctx);
    out.note("verdict", to_string(c.verdict));
    out.require(c.eventually_strongly_positive && !c.positive, "eventually strongly positive wrt dist, not positive");
}

// Criterion 10: Dirichlet-to-Neumann on the disk.
void dtn(Outcome& out) {
    const int k_max = 32;
    for (double lambda : {0.0, -1.0, -4.0}) {
        bool monotone = true;
        for (int k = 1; k <= k_max; ++k) monotone = monotone && dtn_symbol(k, lambda) > dtn_symbol(k - 1, lambda);
        const std::string tag = "lambda=" + std::to_string(lambda);
        out.require(monotone, tag + " symbol increasing in |k|");
        const ModelBundle m = dtn_disk(lambda, k_max);
        ClassifyOptions opts;
        opts.witnesses = false;
        const SemigroupClassification c = classify_semigroup(m.A, m.ctx, opts);
        out.require(c.eventually_strongly_positive == dtn_condition(lambda, k_max), tag + " verdict matches the condition");

        std::vector<double> symbol;
        for (int k = -k_max; k <= k_max; ++k) symbol.push_back(-dtn_symbol(std::abs(k), lambda));
        std::vector<double> dense;
        const ComplexVector ev = schur_decompose(m.A).eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) dense.push_back(ev(i).real());
        std::sort(symbol.begin(), symbol.end());
        std::sort(dense.begin(), dense.end());
        double diff = ev.imag().cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < dense.size(); ++i) diff = std::max(diff, std::abs(dense[i] - symbol[i]));
        out.note(tag + "_eig_diff", diff);
        out.require(diff <= 1e-9, tag + " circulant eigenvalues match the dense solver");
    }
}

// Criterion 11: Bose condensation.
void bose(Outcome& out) {
    const double bd = beurling_deny_value({1.0}, 1);
    out.note("bd(1)", bd);
    out.require(std::abs(bd - 2.0 / std::numbers::pi) <= 1e-12, "BD(1) = 2/pi");
    const double quad = beurling_deny_quadrature({1.0}, 1);
    out.note("quadrature_diff", std::abs(quad - bd));
    out.require(std::abs(quad - bd) <= 1e-6, "quadrature agrees");
    const double root = bose_first_root(0, 1.0);
    const double j01 = bessel_zero(0, 1);
    const double residual = std::abs(bose_characteristic(0, 1.0)(root));
    out.note("lambda01", root);
    out.note("residual", residual);
    out.require(root > 0.0 && root < j01 * j01, "root in (0, j01^2)");
    out.require(residual <= 1e-10, "residual <= 1e-10");
}

// Smallest grid time after which e^{tA}f ≥ 0 for the singular profile f of
// the reflection model, evaluated through the closed-form action
// Pf + c(t)(f − Pf) − s(t)S(f − Pf). nullopt when the orbit never leaves the
// cone.
std::optional<double> reflection_onset(int n, Exponent p) {
    const double w = 2.0 / n;
    const double q = p == Exponent::One ? 1.0 : 2.0;
    RealVector f(n);
    for (int i = 0; i < n; ++i) f(i) = std::pow(1.0 - (-1.0 + (i + 0.5) * w), -1.0 / (2.0 * q));
    const double mean = f.mean();
    const RealVector g = f.array() - mean;
    const RealVector sg = g.reverse();
    std::optional<double> onset;
    bool negative_seen = false;
    for (int k = 0; k <= 4000; ++k) {
        const double t = 0.005 * k;
        const double c = 0.5 * (std::exp(-t) + std::exp(-3.0 * t));
        const double sn = 0.5 * (std::exp(-t) - std::exp(-3.0 * t));
        const double lowest = (mean + c * g.array() - sn * sg.array()).minCoeff();
        if (lowest < 0.0) {
            negative_seen = true;
            onset.reset();
        } else if (negative_seen && !onset) {
            onset = t;
        }
    }
    return onset;
}

// Criterion 12: projection routes and the reflection example.
void oracles(Outcome& out) {
    for (const ModelBundle& m : matrix_models()) {
        const SpectrumReport rep = spectrum_report(m.A, m.tol_cluster);
        if (!rep.leading_real_cluster()) {
            out.note(m.name, "no leading real cluster");
            continue;
        }
        const ProjectionRoutes routes = projection_routes(m.A, m.tol_cluster);
        out.note(m.name, routes.discrepancy);
        out.require(routes.discrepancy <= 1e-7, m.name + " projection routes agree to 1e-7");
    }

    for (Exponent p : {Exponent::One, Exponent::Two}) {
        const ModelBundle m = reflection_lp(64, p);
        double err = 0.0;
        for (double t : {0.1, 1.0, 5.0}) err = std::max(err, max_abs(m.oracles.semigroup(t) - expm(t * m.A)));
        for (Complex z : {Complex(0.5, 0.0), Complex(1.0, 1.0), Complex(-0.5, 2.0)})
            err = std::max(err, max_abs(m.oracles.resolvent(z) - resolvent(m.A, z)));
        out.require(err <= 1e-8, "reflection closed forms (p=" + to_string(p) + ")");

        std::vector<double> x;
        std::vector<double> y;
        for (int n = 1 << 8; n <= 1 << 16; n *= 2) {
            const std::optional<double> t0 = reflection_onset(n, p);
            if (!t0) continue;
            x.push_back(std::log(static_cast<double>(n)));
            y.push_back(*t0);
        }
        double slope = NAN;
        if (x.size() >= 3) {
            const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
            const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
            double sxy = 0.0;
            double sxx = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                sxy += (x[i] - mx) * (y[i] - my);
                sxx += (x[i] - mx) * (x[i] - mx);
            }
            slope = sxy / sxx;
        }
        const double predicted = p == Exponent::One ? 0.5 : 0.25;
        out.note("t0_slope_p=" + to_string(p), slope);
        out.require(slope >= 0.5 * predicted && slope <= 2.0 * predicted,
                    "t0 slope within [0.5,2] x 1/(2p) for p=" + to_string(p));
    }
}

// Criterion 13: projection audit on random matrices.
void projection_audit(Outcome& out) {
    std::mt19937_64 rng(2718);
    int disagree = 0;
    int not_strong = 0;
    int mixed_strong = 0;
    for (int k = 0; k < 300; ++k) {
        const int n = 3 + k % 6;
        const ComplexMatrix a = random_dominant_matrix(n, RandomShape::PositiveRankOne, rng).cast<Complex>();
        const double s = spectrum_report(a).spectral_bound;
        const ProjectionVerdict v = check_projection(a, s, LatticeContext::ones(n, Exponent::Two));
        disagree += !v.faces_agree;
        not_strong += !v.strongly_positive_wrt_u;
    }
    for (int k = 0; k < 300; ++k) {
        const int n = 3 + k % 6;
        const ComplexMatrix a = random_dominant_matrix(n, RandomShape::MixedLeft, rng).cast<Complex>();
        const double s = spectrum_report(a).spectral_bound;
        const ProjectionVerdict v = check_projection(a, s, LatticeContext::ones(n, Exponent::Two));
        disagree += !v.faces_agree;
        mixed_strong += v.strongly_positive_wrt_u;
    }
    out.note("faces_disagree", disagree);
    out.note("positive_rank_one_not_strong", not_strong);
    out.note("mixed_left_strong", mixed_strong);
    out.require(disagree == 0, "eigen conditions consistent");
    out.require(not_strong == 0, "positive rank-one projections strongly positive");
    out.require(mixed_strong == 0, "mixed left eigenvectors never strongly positive");
}

struct Criterion {
    const char* name;
    double budget;
    void (*run)(Outcome&);
};

const Criterion kCriteria[] = {
    {"spiral3 asymptotically positive, not eventually positive", 1.0, spiral},
    {"2x2 asymptotic positivity implies positivity", 5.0, two_by_two},
    {"finite-dimensional semigroup/power equivalence", 30.0, equivalence},
    {"thermostat verdicts at N=400", 20.0, thermostat},
    {"non-local Robin ones-matrix", 0.0, robin_ones},
    {"delay equation roots, conservation, sign change", 30.0, delay},
    {"network flow roots, conservation, sign change", 60.0, network},
    {"clamped beam eigenvector and non-positivity", 60.0, beam},
    {"squared Dirichlet Laplacian", 0.0, dirichlet_squared},
    {"Dirichlet-to-Neumann on the disk", 0.0, dtn},
    {"Bose condensation values and root", 0.0, bose},
    {"projection oracles and reflection example", 0.0, oracles},
    {"projection audit on random matrices", 0.0, projection_audit},
};

ComplexMatrix neville_at_zero(const std::vector<double>& x, std::vector<ComplexMatrix> y) {
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
    return y[0];
}

}  // namespace

ProjectionRoutes projection_routes(const ComplexMatrix& a, std::optional<double> tol_cluster) {
    const SpectrumReport rep = spectrum_report(a, tol_cluster);
    const auto lead = rep.leading_real_cluster();
    if (!lead) throw NumericalFailure("projection_routes", "no isolated real leading cluster");
    const double s = rep.clusters[*lead].center.real();
    double gap = INFINITY;
    for (std::size_t c = 0; c < rep.clusters.size(); ++c)
        if (c != *lead) gap = std::min(gap, std::abs(rep.clusters[c].center - rep.clusters[*lead].center));
    if (!std::isfinite(gap)) gap = std::max(1.0, rep.norm);

    ProjectionRoutes out;
    out.spectral = spectral_projection(a, rep, *lead).P;
    out.contour = projection_by_contour(a, s, 0.5 * gap, 64);

    std::vector<double> deltas;
    std::vector<ComplexMatrix> values;
    for (int j = 0; j < 6; ++j) {
        const double delta = 0.25 * gap * std::pow(0.5, j);
        deltas.push_back(delta);
        values.push_back(delta * resolvent(a, s + delta));
    }
    out.abel = neville_at_zero(deltas, values);

    const Eigen::Index n = a.rows();
    const ComplexMatrix shifted = a - s * ComplexMatrix::Identity(n, n);
    const double margin = std::isfinite(rep.dominance_margin) && rep.dominance_margin > 0.0 ? rep.dominance_margin : 1.0;
    ComplexMatrix power = projection_by_power(shifted, margin, 1);
    double previous_change = INFINITY;
    for (int k = 0; k < 60; ++k) {
        const ComplexMatrix next = power * power;
        const double change = max_abs(next - power);
        if (change >= previous_change) break;
        power = next;
        previous_change = change;
        if (change <= 1e-15 * std::max(1.0, max_abs(power))) break;
    }
    out.power = power;

    const double scale = std::max(1.0, max_abs(out.spectral));
    const ComplexMatrix* routes[] = {&out.spectral, &out.contour, &out.abel, &out.power};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) out.discrepancy = std::max(out.discrepancy, max_abs(*routes[i] - *routes[j]) / scale);
    return out;
}

std::vector<int> quick_criteria() { return {1, 2, 5, 9, 10, 11, 13}; }

int criterion_count() { return static_cast<int>(std::size(kCriteria)); }

CriterionResult run_criterion(int id) {
    if (id < 1 || id > criterion_count()) throw UsageError("run_criterion: no criterion " + std::to_string(id));
    const Criterion& c = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = c.name;
    r.budget_seconds = c.budget;
    Outcome out;
    const auto start = Clock::now();
    try {
        c.run(out);
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail << "exception: " << e.what() << "; ";
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget > 0.0 && r.seconds >= c.budget) {
        out.passed = false;
        out.detail << "FAILED runtime budget " << c.budget << " s; ";
    }
    r.passed = out.passed;
    r.detail = out.detail.str();
    if (!r.detail.empty() && r.detail.back() == ' ') r.detail.resize(r.detail.size() - 2);
    return r;
}

std::vector<CriterionResult> run_certification(bool quick) {
    std::vector<CriterionResult> out;
    if (quick) {
        for (int id : quick_criteria()) out.push_back(run_criterion(id));
    } else {
        for (int id = 1; id <= criterion_count(); ++id) out.push_back(run_criterion(id));
    }
    return out;
}

}  // namespace apos
