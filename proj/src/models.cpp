#include "apos/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "apos/numkernel.hpp"

namespace apos {

namespace {

ComplexMatrix real_matrix(const RealMatrix& m) { return m.cast<Complex>(); }

double norm1(const ComplexMatrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Standard second difference (1, −2, 1)/h² on n interior nodes.
RealMatrix second_difference(int n, double h) {
    RealMatrix d = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d(i, i) = -2.0;
        if (i > 0) d(i, i - 1) = 1.0;
        if (i + 1 < n) d(i, i + 1) = 1.0;
    }
    return d / (h * h);
}

RealVector distance_to_ends(int n, double h) {
    RealVector u(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * h;
        u(i) = std::min(x, 1.0 - x);
    }
    return u;
}

// (1/M)·Σ_{|k|≤K} s_k cos(k(θ_i − θ_j)) on M = 2K+1 equispaced nodes.
RealMatrix circulant_from_symbol(const std::vector<double>& symbol) {
    const int k_max = static_cast<int>(symbol.size()) - 1;
    const int m = 2 * k_max + 1;
    RealMatrix c(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * std::numbers::pi * (i - j) / m;
            double s = symbol[0];
            for (int k = 1; k <= k_max; ++k) s += 2.0 * symbol[static_cast<std::size_t>(k)] * std::cos(k * phi);
            c(i, j) = s / m;
        }
    }
    return c;
}

LatticeContext circle_context(int k_max) {
    const int m = 2 * k_max + 1;
    LatticeContext ctx = LatticeContext::ones(m, Exponent::Two);
    ctx.weights.setConstant(2.0 * std::numbers::pi / m);
    return ctx;
}

ModelOracles circulant_oracles(const std::vector<double>& generator_symbol) {
    ModelOracles o;
    o.semigroup = [generator_symbol](double t) {
        std::vector<double> s(generator_symbol.size());
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::exp(t * generator_symbol[k]);
        return real_matrix(circulant_from_symbol(s));
    };
    o.resolvent = [generator_symbol](Complex lambda) {
        const int k_max = static_cast<int>(generator_symbol.size()) - 1;
        const int m = 2 * k_max + 1;
        ComplexMatrix c(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double phi = 2.0 * std::numbers::pi * (i - j) / m;
                Complex s = 1.0 / (lambda - generator_symbol[0]);
                for (int k = 1; k <= k_max; ++k)
                    s += 2.0 * std::cos(k * phi) / (lambda - generator_symbol[static_cast<std::size_t>(k)]);
                c(i, j) = s / static_cast<double>(m);
            }
        }
        return c;
    };
    return o;
}

}  // namespace

ModelBundle spiral3() {
    RealMatrix a(3, 3);
    a << 0, 0, 0, 0, -1, -1, 0, 1, -1;
    ModelBundle m;
    m.name = "spiral3";
    m.A = real_matrix(a);
    m.ctx = LatticeContext::ones(3, Exponent::Inf);
    m.oracles.semigroup = [](double t) {
        ComplexMatrix e = ComplexMatrix::Zero(3, 3);
        const double d = std::exp(-t);
        e(0, 0) = 1.0;
        e(1, 1) = d * std::cos(t);
        e(1, 2) = -d * std::sin(t);
        e(2, 1) = d * std::sin(t);
        e(2, 2) = d * std::cos(t);
        return e;
    };
    m.oracles.resolvent = [](Complex lambda) {
        ComplexMatrix r = ComplexMatrix::Zero(3, 3);
        const Complex s = lambda + 1.0;
        const Complex den = s * s + 1.0;
        r(0, 0) = 1.0 / lambda;
        r(1, 1) = s / den;
        r(1, 2) = -1.0 / den;
        r(2, 1) = 1.0 / den;
        r(2, 2) = s / den;
        return r;
    };
    m.oracles.conserved_functionals.push_back(RealVector::Unit(3, 0));
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = false;
    m.predicted.asymptotically_positive = true;
    m.predicted.projection_strongly_positive = false;
    m.predicted.note = "orbits spiral towards the first axis";
    return m;
}

ComplexMatrix stock_eventually_positive_inner() {
    RealMatrix k(3, 3);
    k << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    k /= std::sqrt(3.0);
    const RealMatrix p = RealMatrix::Constant(3, 3, 1.0 / 3.0);
    return real_matrix(p - RealMatrix::Identity(3, 3) + 3.0 * k);
}

ModelBundle shifted_direct_sum(const ComplexMatrix& inner, double lambda0) {
    if (inner.rows() != inner.cols() || inner.rows() == 0)
        throw UsageError("shifted_direct_sum: inner matrix must be square and non-empty");
    if (!(lambda0 > 0.0)) throw UsageError("shifted_direct_sum: lambda0 must be positive");
    const ComplexMatrix r = resolvent(inner, lambda0);
    const double min_entry = r.real().minCoeff();
    if (!(min_entry < -1e-12 * r.cwiseAbs().maxCoeff()))
        throw NumericalFailure("shifted_direct_sum", "R(lambda0, A) is positive; lambda0 outside the required set",
                               min_entry);
    const Eigen::Index n = inner.rows();
    ModelBundle m;
    m.name = "shifted_direct_sum";
    m.A = ComplexMatrix::Zero(n + 1, n + 1);
    m.A.topLeftCorner(n, n) = inner - lambda0 * ComplexMatrix::Identity(n, n);
    m.ctx = LatticeContext::ones(n + 1, Exponent::Inf);
    m.params = {{"lambda0", lambda0}};
    const ComplexMatrix inner_copy = inner;
    m.oracles.resolvent = [inner_copy, lambda0](Complex lambda) {
        const Eigen::Index k = inner_copy.rows();
        ComplexMatrix out = ComplexMatrix::Zero(k + 1, k + 1);
        out.topLeftCorner(k, k) = resolvent(inner_copy, lambda0 + lambda);
        out(k, k) = 1.0 / lambda;
        return out;
    };
    m.oracles.conserved_functionals.push_back(RealVector::Unit(n + 1, n));
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = false;
    m.predicted.asymptotically_positive = true;
    m.predicted.resolvent_eventually_positive = false;
    m.predicted.note = "semigroup eventually positive; resolvent not eventually positive at 0";
    return m;
}

ModelBundle reflection_lp(int n, Exponent p) {
    if (n < 4 || n % 2) throw UsageError("reflection_lp: N must be even and at least 4");
    if (p == Exponent::Inf) throw UsageError("reflection_lp: p must be finite");
    const double w = 2.0 / n;
    RealMatrix s = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) s(i, n - 1 - i) = 1.0;
    const RealMatrix pi = RealMatrix::Constant(n, n, 0.5 * w);
    const RealMatrix id = RealMatrix::Identity(n, n);

    ModelBundle m;
    m.name = "reflection_lp";
    m.A = real_matrix((-2.0 * id - s) * (id - pi));
    m.ctx = LatticeContext::ones(n, p);
    m.ctx.weights.setConstant(w);
    m.params = {{"N", n}, {"p", p == Exponent::One ? 1.0 : 2.0}};

    const double pexp = p == Exponent::One ? 1.0 : 2.0;
    RealVector f(n);
    for (int i = 0; i < n; ++i) {
        const double omega = -1.0 + (i + 0.5) * w;
        f(i) = std::pow(1.0 - omega, -1.0 / (2.0 * pexp));
    }
    m.profile = f;

    m.oracles.semigroup = [s, pi, id](double t) {
        // e^{−2t}cosh t and e^{−2t}sinh t without overflow.
        const double c = 0.5 * (std::exp(-t) + std::exp(-3.0 * t));
        const double sn = 0.5 * (std::exp(-t) - std::exp(-3.0 * t));
        return real_matrix(pi + (c * id - sn * s) * (id - pi));
    };
    m.oracles.resolvent = [s, pi, id](Complex lambda) {
        const Complex a = lambda + 2.0;
        const ComplexMatrix idc = real_matrix(id);
        return ComplexMatrix(real_matrix(pi) / lambda +
                             (a * idc - real_matrix(s)) * real_matrix(id - pi) / (a * a - 1.0));
    };
    m.oracles.conserved_functionals.push_back(RealVector::Constant(n, w));
    m.predicted.positive = false;
    m.predicted.projection_strongly_positive = true;
    m.predicted.eventually_strongly_positive = true;
    m.predicted.asymptotically_positive = true;
    m.predicted.note = "eventual positivity onset for the singular profile grows like ln N / (2p)";
    return m;
}

ModelBundle dirichlet_laplacian_sq_1d(int n) {
    if (n < 8) throw UsageError("dirichlet_laplacian_sq: N must be at least 8");
    const double h = 1.0 / (n + 1);
    const RealMatrix d = second_difference(n, h);
    ModelBundle m;
    m.name = "dirichlet_laplacian_sq";
    m.A = real_matrix(-(d * d));
    m.ctx = LatticeContext::sequence(n, Exponent::Inf).with_u(distance_to_ends(n, h));
    m.params = {{"N", n}};
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = true;
    m.predicted.asymptotically_positive = true;
    m.predicted.projection_strongly_positive = true;
    m.predicted.note = "R(0,A) = R(0,Δ_D)² is strongly positive with respect to dist";
    return m;
}

ModelBundle bilaplacian_clamped_1d(int n) {
    if (n < 10) throw UsageError("bilaplacian_clamped: N must be at least 10");
    const double h = 1.0 / (n + 1);
    RealMatrix d4 = RealMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        d4(i, i) = 6.0;
        if (i >= 1) d4(i, i - 1) = -4.0;
        if (i >= 2) d4(i, i - 2) = 1.0;
        if (i + 1 < n) d4(i, i + 1) = -4.0;
        if (i + 2 < n) d4(i, i + 2) = 1.0;
    }
    // Ghost values u_{−1} = u_1 and u_{n+2} = u_n from the vanishing slope.
    d4(0, 0) = 7.0;
    d4(n - 1, n - 1) = 7.0;
    d4 /= std::pow(h, 4);

    ModelBundle m;
    m.name = "bilaplacian_clamped";
    m.A = real_matrix(-d4);
    m.ctx = LatticeContext::sequence(n, Exponent::Two);
    m.ctx.weights.setConstant(h);
    m.ctx = m.ctx.with_u(distance_to_ends(n, h).array().square().matrix());
    m.tol_cluster = 1e-9 * norm1(m.A);
    m.params = {{"N", n}};
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = true;
    m.predicted.asymptotically_positive = true;
    m.predicted.projection_strongly_positive = true;
    m.predicted.note = "leading eigenfunction strongly positive with respect to dist²";
    return m;
}

ModelBundle nonlocal_robin_1d(int n, double length, const RealMatrix& b) {
    if (n < 16) throw UsageError("nonlocal_robin: N must be at least 16");
    if (!(length > 0.0)) throw UsageError("nonlocal_robin: length must be positive");
    if (b.rows() != 2 || b.cols() != 2) throw UsageError("nonlocal_robin: B must be 2x2");
    const double h = length / (n - 1);
    RealMatrix g = RealMatrix::Zero(n, n);
    for (int i = 1; i + 1 < n; ++i) {
        g(i, i - 1) = 1.0 / (h * h);
        g(i, i) = -2.0 / (h * h);
        g(i, i + 1) = 1.0 / (h * h);
    }
    // Ghost nodes from central differences of the boundary conditions.
    g(0, 0) = -2.0 / (h * h) - 2.0 * b(0, 0) / h;
    g(0, 1) = 2.0 / (h * h);
    g(0, n - 1) += -2.0 * b(0, 1) / h;
    g(n - 1, n - 1) = -2.0 / (h * h) - 2.0 * b(1, 1) / h;
    g(n - 1, n - 2) = 2.0 / (h * h);
    g(n - 1, 0) += -2.0 * b(1, 0) / h;

    ModelBundle m;
    m.name = "nonlocal_robin";
    m.A = real_matrix(g);
    m.ctx = LatticeContext::ones(n, Exponent::Two);
    m.ctx.weights = trapezoid_weights(n, h);
    m.params = {{"N", n}, {"L", length}, {"b11", b(0, 0)}, {"b12", b(0, 1)}, {"b21", b(1, 0)}, {"b22", b(1, 1)}};
    const bool metzler = b(0, 1) <= 0.0 && b(1, 0) <= 0.0;
    m.predicted.positive = metzler;
    return m;
}

ModelBundle nonlocal_robin_thermostat(int n, double beta) {
    RealMatrix b(2, 2);
    b << 0.0, beta, 0.0, 0.0;
    ModelBundle m = nonlocal_robin_1d(n, std::numbers::pi, b);
    m.name = "nonlocal_robin_thermostat";
    m.params = {{"N", n}, {"beta", beta}};
    m.predicted.positive = beta <= 0.0;
    m.predicted.eventually_strongly_positive = beta < 0.5;
    m.predicted.note = "eventually strongly positive but not positive iff 0 < beta < 1/2";
    return m;
}

ModelBundle nonlocal_robin_ones(int n) {
    ModelBundle m = nonlocal_robin_1d(n, 1.0, RealMatrix::Ones(2, 2));
    m.name = "nonlocal_robin_ones";
    m.params = {{"N", n}};
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = true;
    m.predicted.asymptotically_positive = true;
    m.predicted.projection_strongly_positive = true;
    m.predicted.note = "R(0,-A) strongly positive; Beurling-Deny fails";
    return m;
}

double dtn_symbol(int k, double lambda) {
    k = std::abs(k);
    if (lambda == 0.0) return static_cast<double>(k);
    const double s = std::sqrt(std::abs(lambda));
    if (lambda > 0.0) {
        const double j = bessel_j(k, s);
        if (std::abs(j) <= 1e-10 * std::abs(s * bessel_j_prime(k, s)))
            throw NumericalFailure("dtn_disk", "symbol pole: J_k(sqrt(lambda)) vanishes for k = " + std::to_string(k),
                                   k);
        return s * bessel_j_prime(k, s) / j;
    }
    return s * bessel_i_prime(k, s) / bessel_i(k, s);
}

bool dtn_condition(double lambda, int k_max) {
    const double d0 = dtn_symbol(0, lambda);
    for (int k = 1; k <= k_max; ++k)
        if (!(d0 < dtn_symbol(k, lambda))) return false;
    return true;
}

ModelBundle dtn_disk(double lambda, int k_max) {
    if (k_max < 8) throw UsageError("dtn_disk: K must be at least 8");
    std::vector<double> gen(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) gen[static_cast<std::size_t>(k)] = -dtn_symbol(k, lambda);
    ModelBundle m;
    m.name = "dtn_disk";
    m.A = real_matrix(circulant_from_symbol(gen));
    m.ctx = circle_context(k_max);
    m.params = {{"lambda", lambda}, {"K", k_max}};
    m.oracles = circulant_oracles(gen);
    if (std::abs(gen[0]) < 1e-14) m.oracles.conserved_functionals.push_back(m.ctx.weights);
    const bool cond = dtn_condition(lambda, k_max);
    m.predicted.eventually_strongly_positive = cond;
    m.predicted.projection_strongly_positive = cond;
    m.predicted.asymptotically_positive = cond;
    m.predicted.note = "largest eigenvalue of -D simple with constant eigenvector";
    return m;
}

double beurling_deny_value(const std::vector<double>& q, int m) {
    if (m < 1) throw UsageError("beurling_deny_value: m must be at least 1");
    auto coeff = [&q](long j) { return j < static_cast<long>(q.size()) ? q[static_cast<std::size_t>(j)] : 0.0; };
    double v = 2.0 / std::numbers::pi * coeff(0) - std::numbers::pi / 4.0 * coeff(m);
    for (long k = 1; 2 * k * m < static_cast<long>(q.size()); ++k) {
        const double d = 4.0 * k * k - 1.0;
        v += 4.0 / std::numbers::pi * coeff(2 * k * m) / (d * d);
    }
    return v;
}

double beurling_deny_quadrature(const std::vector<double>& q, int m, int nodes_per_panel) {
    if (m < 1) throw UsageError("beurling_deny_quadrature: m must be at least 1");
    if (nodes_per_panel < 2) throw UsageError("beurling_deny_quadrature: need at least 2 intervals per panel");
    if (nodes_per_panel % 2) ++nodes_per_panel;
    auto kernel = [&q](double x) {
        double v = q.empty() ? 0.0 : q[0];
        for (std::size_t k = 1; k < q.size(); ++k) v += 2.0 * q[k] * std::cos(static_cast<double>(k) * x);
        return v / (2.0 * std::numbers::pi);
    };
    // Panels of length π/m between consecutive zeros of sin(m·) on (−π, π].
    const int panels = 2 * m;
    const double width = std::numbers::pi / m;
    std::vector<double> nodes, weights;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = -std::numbers::pi + pnl * width;
        const double step = width / nodes_per_panel;
        for (int i = 0; i <= nodes_per_panel; ++i) {
            const double wt = (i == 0 || i == nodes_per_panel) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            nodes.push_back(a + i * step);
            weights.push_back(wt * step / 3.0);
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double minus = std::max(-std::sin(m * nodes[i]), 0.0);
        if (minus == 0.0) continue;
        double inner = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double plus = std::max(std::sin(m * nodes[j]), 0.0);
            if (plus == 0.0) continue;
            inner += weights[j] * kernel(nodes[i] - nodes[j]) * plus;
        }
        total += weights[i] * minus * inner;
    }
    return total;
}

BoseAnalysis bose_analysis(const std::vector<double>& q, int k_max) {
    if (q.empty() || !(q[0] > 0.0)) throw UsageError("bose: q_0 must be positive");
    for (double v : q)
        if (v < 0.0) throw UsageError("bose: coefficients must be nonnegative");
    if (k_max < 1) throw UsageError("bose: K must be at least 1");
    BoseAnalysis out;
    out.q = q;
    for (int k = 0; k <= k_max; ++k) {
        const double qk = k < static_cast<int>(q.size()) ? q[static_cast<std::size_t>(k)] : 0.0;
        const double root = bose_first_root(k, qk);
        out.lambda_k1.push_back(root);
        out.residuals.push_back(std::abs(bose_characteristic(k, qk).value(root)));
    }
    out.lambda1 = out.lambda_k1[0];
    out.dominant = std::all_of(out.lambda_k1.begin() + 1, out.lambda_k1.end(),
                               [&](double v) { return out.lambda1 < v; });
    const double qmax = *std::max_element(q.begin(), q.end());
    const int m_max = std::max(1, static_cast<int>(q.size()) - 1);
    for (int m = 1; m <= m_max; ++m) {
        const double v = beurling_deny_value(q, m);
        out.beurling_deny.push_back(v);
        // Coefficients past the supplied range, bounded by max q.
        const long first = static_cast<long>(q.size() - 1) / (2L * m) + 1;
        double tail = 0.0;
        for (long k = first; k < first + 100000; ++k) {
            const double d = 4.0 * k * k - 1.0;
            tail += 1.0 / (d * d);
        }
        out.tail_bounds.push_back(4.0 / std::numbers::pi * qmax * tail);
        if (!out.violating_m && v > 0.0) out.violating_m = m;
    }
    return out;
}

ModelBundle bose_disk(const std::vector<double>& q, int k_max) {
    if (k_max < 8) throw UsageError("bose_disk: K must be at least 8");
    const BoseAnalysis analysis = bose_analysis(q, k_max);
    std::vector<double> gen(analysis.lambda_k1.size());
    for (std::size_t k = 0; k < gen.size(); ++k) gen[k] = -analysis.lambda_k1[k];
    ModelBundle m;
    m.name = "bose_disk";
    m.A = real_matrix(circulant_from_symbol(gen));
    m.ctx = circle_context(k_max);
    m.oracles = circulant_oracles(gen);
    m.params = {{"K", k_max}};
    for (std::size_t k = 0; k < q.size(); ++k) m.params["q" + std::to_string(k)] = q[k];
    m.predicted.eventually_strongly_positive = analysis.dominant;
    m.predicted.projection_strongly_positive = analysis.dominant;
    if (analysis.violating_m) m.predicted.positive = false;
    m.predicted.note = analysis.violating_m ? "Beurling-Deny violated at m = " + std::to_string(*analysis.violating_m)
                                            : "no Beurling-Deny violation found up to M";
    return m;
}

ModelBundle truncated_tower(int n_blocks, TowerVariant variant) {
    if (n_blocks < 1) throw UsageError("truncated_tower: need at least one block");
    RealMatrix b2(2, 2);
    b2 << 0, -1, 1, 0;
    RealMatrix k3(3, 3);
    k3 << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    k3 /= std::sqrt(3.0);
    const RealMatrix q3 = RealMatrix::Identity(3, 3) - RealMatrix::Constant(3, 3, 1.0 / 3.0);

    const int d = variant == TowerVariant::A ? 2 : 3;
    const int n = d * n_blocks;
    RealMatrix a = RealMatrix::Zero(n, n);
    for (int blk = 1; blk <= n_blocks; ++blk) {
        const int o = d * (blk - 1);
        switch (variant) {
            case TowerVariant::A:
                a.block(o, o, 2, 2) = blk * b2 - RealMatrix::Identity(2, 2) / blk;
                break;
            case TowerVariant::B:
                a.block(o, o, 3, 3) = blk * k3 - q3 / blk;
                break;
            case TowerVariant::C:
                a.block(o, o, 3, 3) = k3 - q3 / blk;
                break;
        }
    }
    ModelBundle m;
    const char* tag = variant == TowerVariant::A ? "a" : variant == TowerVariant::B ? "b" : "c";
    m.name = std::string("tower_") + tag;
    m.A = real_matrix(a);
    m.ctx = LatticeContext::ones(n, Exponent::Two);
    m.params = {{"blocks", n_blocks}};
    m.predicted.positive = false;
    m.predicted.eventually_strongly_positive = false;
    if (variant == TowerVariant::A) {
        m.predicted.asymptotically_positive = false;
        m.predicted.note = "peripheral spectrum is a complex pair at every truncation";
    } else {
        for (int blk = 0; blk < n_blocks; ++blk) {
            RealVector w = RealVector::Zero(n);
            w.segment(3 * blk, 3).setOnes();
            m.oracles.conserved_functionals.push_back(w);
        }
        m.predicted.asymptotically_positive = true;
        m.predicted.note = "dominance margin 1/n_blocks shrinks to 0";
    }
    return m;
}

ModelBundle network_flow(double l, int n) {
    if (!(l > 0.0)) throw UsageError("network_flow: l must be positive");
    if (n < 32) throw UsageError("network_flow: N must be at least 32");
    const int m3 = std::max(1, static_cast<int>(std::floor(l * n)));
    const int total = 2 * n + m3;
    ModelBundle m;
    m.name = "network_flow";
    m.ctx = LatticeContext::ones(total, Exponent::One);
    m.ctx.weights.head(2 * n).setConstant(1.0 / n);
    m.ctx.weights.tail(m3).setConstant(l / m3);
    RealVector psi = m.ctx.weights;
    psi.head(n) /= 3.0;
    m.oracles.conserved_functionals.push_back(psi);
    m.characteristic = network_characteristic(l);
    m.params = {{"l", l}, {"N", n}};
    m.predicted.positive = false;
    m.predicted.asymptotically_positive = true;
    m.predicted.eventually_strongly_positive = false;
    m.predicted.note = "0 is a dominant spectral value for irrational l";
    return m;
}

ModelBundle delay_model(int cells_per_unit) {
    if (cells_per_unit < 2) throw UsageError("delay: need at least 2 cells per unit");
    const int nodes = 2 * cells_per_unit + 1;
    const double h = 1.0 / cells_per_unit;
    ModelBundle m;
    m.name = "delay";
    m.ctx = LatticeContext::ones(nodes, Exponent::Inf);
    // φ(f) = f(0) + ∫_{−2}^{−1} f, composite trapezoid weights on the grid.
    RealVector phi = RealVector::Zero(nodes);
    for (int i = 0; i <= cells_per_unit; ++i) phi(i) = (i == 0 || i == cells_per_unit) ? 0.5 * h : h;
    phi(nodes - 1) += 1.0;
    m.oracles.conserved_functionals.push_back(phi);
    m.characteristic = delay_characteristic();
    m.params = {{"cells", cells_per_unit}};
    m.predicted.positive = false;
    m.predicted.asymptotically_positive = true;
    m.predicted.eventually_strongly_positive = false;
    m.predicted.note = "uniformly asymptotically positive, not positive";
    return m;
}

namespace {

struct ParamReader {
    const std::string& model;
    const ModelParams& given;
    std::set<std::string> used;

    double get(const std::string& key, double fallback) {
        used.insert(key);
        auto it = given.find(key);
        return it == given.end() ? fallback : it->second;
    }
    int get_int(const std::string& key, int fallback) {
        const double v = get(key, fallback);
        if (v != std::floor(v) || std::abs(v) > 1e7)
            throw UsageError(model + ": parameter " + key + " must be an integer");
        return static_cast<int>(v);
    }
    void finish() const {
        for (const auto& [k, v] : given)
            if (!used.count(k)) throw UsageError(model + ": unknown parameter " + k);
    }
};

Exponent exponent_param(double v) {
    if (v == 1.0) return Exponent::One;
    if (v == 2.0) return Exponent::Two;
    throw UsageError("reflection_lp: p must be 1 or 2");
}

}  // namespace

std::vector<std::string> model_names() {
    return {"spiral3",           "shifted_direct_sum", "reflection_lp", "dirichlet_laplacian_sq",
            "bilaplacian_clamped", "nonlocal_robin",   "nonlocal_robin_thermostat", "nonlocal_robin_ones",
            "dtn_disk",          "bose_disk",          "tower_a",       "tower_b",
            "tower_c",           "network_flow",       "delay"};
}

ModelBundle make_model(const std::string& name, const ModelParams& params) {
    ParamReader r{name, params, {}};
    ModelBundle m;
    if (name == "spiral3") {
        m = spiral3();
    } else if (name == "shifted_direct_sum") {
        m = shifted_direct_sum(stock_eventually_positive_inner(), r.get("lambda0", 5.0));
    } else if (name == "reflection_lp") {
        m = reflection_lp(r.get_int("N", 64), exponent_param(r.get("p", 2.0)));
    } else if (name == "dirichlet_laplacian_sq") {
        m = dirichlet_laplacian_sq_1d(r.get_int("N", 64));
    } else if (name == "bilaplacian_clamped") {
        m = bilaplacian_clamped_1d(r.get_int("N", 100));
    } else if (name == "nonlocal_robin") {
        RealMatrix b(2, 2);
        b << r.get("b11", 1.0), r.get("b12", 1.0), r.get("b21", 1.0), r.get("b22", 1.0);
        m = nonlocal_robin_1d(r.get_int("N", 200), r.get("L", 1.0), b);
    } else if (name == "nonlocal_robin_thermostat") {
        m = nonlocal_robin_thermostat(r.get_int("N", 400), r.get("beta", 0.2));
    } else if (name == "nonlocal_robin_ones") {
        m = nonlocal_robin_ones(r.get_int("N", 200));
    } else if (name == "dtn_disk") {
        m = dtn_disk(r.get("lambda", 0.0), r.get_int("K", 32));
    } else if (name == "bose_disk") {
        std::vector<double> q;
        int highest = 0;
        for (const auto& [k, v] : params) {
            if (k.size() > 1 && k[0] == 'q' && std::all_of(k.begin() + 1, k.end(), ::isdigit))
                highest = std::max(highest, std::stoi(k.substr(1)));
        }
        for (int j = 0; j <= highest; ++j) q.push_back(r.get("q" + std::to_string(j), j == 0 ? 1.0 : 0.0));
        m = bose_disk(q, r.get_int("K", 16));
    } else if (name == "tower_a" || name == "tower_b" || name == "tower_c") {
        const TowerVariant v = name == "tower_a" ? TowerVariant::A : name == "tower_b" ? TowerVariant::B : TowerVariant::C;
        m = truncated_tower(r.get_int("blocks", 8), v);
    } else if (name == "network_flow") {
        m = network_flow(r.get("l", std::numbers::sqrt2), r.get_int("N", 256));
    } else if (name == "delay") {
        m = delay_model(r.get_int("cells", 1000));
    } else {
        throw UsageError("unknown model: " + name);
    }
    r.finish();
    return m;
}

std::vector<ModelBundle> matrix_models() {
    std::vector<ModelBundle> out;
    for (const auto& name : model_names()) {
        ModelBundle m = make_model(name);
        if (!m.simulator_backed()) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace apos
