#include "apos/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace apos {

namespace {

int steps_per_unit(double h) {
    if (!(h > 0.0) || h > 0.5) throw UsageError("delay: step h must lie in (0, 1/2]");
    const double m = std::round(1.0 / h);
    if (std::abs(m * h - 1.0) > 1e-12) throw UsageError("delay: step h must divide 1");
    return static_cast<int>(m);
}

long step_count(double t_end, double dt, const char* where) {
    if (!(t_end >= 0.0)) throw UsageError(std::string(where) + ": final time must be non-negative");
    const double k = std::round(t_end / dt);
    if (std::abs(k * dt - t_end) > 1e-9 * std::max(1.0, t_end))
        throw UsageError(std::string(where) + ": final time must be a multiple of the step");
    return static_cast<long>(k);
}

// Second-order difference slopes on a uniform grid.
RealVector grid_slopes(const RealVector& y, double h) {
    const Eigen::Index n = y.size();
    RealVector s(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) s(i) = (y(i + 1) - y(i - 1)) / (2.0 * h);
    s(0) = (-3.0 * y(0) + 4.0 * y(1) - y(2)) / (2.0 * h);
    s(n - 1) = (3.0 * y(n - 1) - 4.0 * y(n - 2) + y(n - 3)) / (2.0 * h);
    return s;
}

double hermite_mid(double ya, double yb, double sa, double sb, double h) {
    return 0.5 * (ya + yb) + h / 8.0 * (sa - sb);
}

// Exact integral of the cubic Hermite interpolant over one interval.
double hermite_integral(double ya, double yb, double sa, double sb, double h) {
    return 0.5 * h * (ya + yb) + h * h / 12.0 * (sa - sb);
}

double hat_cdf(double x, double c, double r) {
    if (x <= c - r) return 0.0;
    if (x <= c) return 0.5 * (x - c + r) * (x - c + r) / (r * r);
    if (x < c + r) return 1.0 - 0.5 * (c + r - x) * (c + r - x) / (r * r);
    return 1.0;
}

struct Recorder {
    const SimulationOptions& opts;
    SimulationTrace trace;

    void record(double t, double d_plus, double min_value, std::initializer_list<std::pair<const char*, double>> fns) {
        trace.times.push_back(t);
        trace.d_plus.push_back(d_plus);
        trace.min_value.push_back(min_value);
        for (const auto& [name, value] : fns) trace.functionals[name].push_back(value);
    }
};

}  // namespace

double delay_functional(const RealVector& history, double h) {
    const int m = steps_per_unit(h);
    if (history.size() != 2 * m + 1) throw UsageError("delay_functional: history must have 2/h + 1 samples");
    const RealVector s = grid_slopes(history, h);
    double integral = 0.0;
    for (int i = 0; i < m; ++i) integral += hermite_integral(history(i), history(i + 1), s(i), s(i + 1), h);
    return history(2 * m) + integral;
}

RealVector sample_history(const std::function<double(double)>& history, double h) {
    const int m = steps_per_unit(h);
    RealVector y(2 * m + 1);
    for (int i = 0; i <= 2 * m; ++i) y(i) = history(-2.0 + i * h);
    return y;
}

std::function<double(double)> hat_function(double c, double r) {
    if (!(r > 0.0)) throw UsageError("hat_function: half-width must be positive");
    return [c, r](double x) { return std::max(0.0, 1.0 - std::abs(x - c) / r); };
}

SimulationTrace simulate_delay(const RealVector& history, double t_end, double h, const SimulationOptions& opts) {
    const int m = steps_per_unit(h);
    if (history.size() != 2 * m + 1) throw UsageError("simulate_delay: history must have 2/h + 1 samples");
    if (!history.allFinite()) throw UsageError("simulate_delay: history must be finite");
    if (opts.record_every < 1 || opts.snapshot_every < 0) throw UsageError("simulate_delay: invalid recording stride");
    const long steps = step_count(t_end, h, "simulate_delay");
    const long origin = 2L * m;

    // y(i) belongs to time (i − 2m)·h. History intervals use difference
    // slopes, solution intervals the slopes given by the equation.
    std::vector<double> y(static_cast<std::size_t>(origin + steps + 1));
    std::vector<double> s_sol(y.size(), 0.0);
    for (long i = 0; i <= origin; ++i) y[static_cast<std::size_t>(i)] = history(i);
    const RealVector s_hist = grid_slopes(history, h);
    s_sol[static_cast<std::size_t>(origin)] = y[0] - y[static_cast<std::size_t>(m)];

    auto slope = [&](long node, long interval) {
        return interval >= origin ? s_sol[static_cast<std::size_t>(node)] : s_hist(node);
    };
    auto mid = [&](long i) {
        return hermite_mid(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i + 1)], slope(i, i), slope(i + 1, i), h);
    };
    auto integral = [&](long i) {
        return hermite_integral(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i + 1)], slope(i, i),
                                slope(i + 1, i), h);
    };

    Recorder rec{opts, {}};
    auto record = [&](long j) {
        const auto first = y.begin() + (j - origin);
        const double lo = *std::min_element(first, first + origin + 1);
        double phi = y[static_cast<std::size_t>(j)];
        for (long i = j - origin; i < j - m; ++i) phi += integral(i);
        rec.record(static_cast<double>(j - origin) * h, std::max(0.0, -lo), lo, {{"phi", phi}});
    };
    auto snapshot = [&](long j) {
        RealVector window(origin + 1);
        for (long i = 0; i <= origin; ++i) window(i) = y[static_cast<std::size_t>(j - origin + i)];
        rec.trace.snapshots.emplace_back(static_cast<double>(j - origin) * h, window);
    };

    record(origin);
    if (opts.snapshot_every > 0) snapshot(origin);
    for (long n = 0; n < steps; ++n) {
        const long j = origin + n;
        const double k1 = y[static_cast<std::size_t>(j - origin)] - y[static_cast<std::size_t>(j - m)];
        const double kmid = mid(j - origin) - mid(j - m);
        const double k4 = y[static_cast<std::size_t>(j + 1 - origin)] - y[static_cast<std::size_t>(j + 1 - m)];
        y[static_cast<std::size_t>(j + 1)] = y[static_cast<std::size_t>(j)] + h / 6.0 * (k1 + 4.0 * kmid + k4);
        s_sol[static_cast<std::size_t>(j + 1)] = k4;
        if ((n + 1) % opts.record_every == 0 || n + 1 == steps) record(j + 1);
        if (opts.snapshot_every > 0 && (n + 1) % opts.snapshot_every == 0) snapshot(j + 1);
    }
    const long last = origin + steps;
    rec.trace.final_state.resize(origin + 1);
    for (long i = 0; i <= origin; ++i) rec.trace.final_state(i) = y[static_cast<std::size_t>(last - origin + i)];
    return rec.trace;
}

SimulationTrace simulate_delay(const std::function<double(double)>& history, double t_end, double h,
                               const SimulationOptions& opts) {
    return simulate_delay(sample_history(history, h), t_end, h, opts);
}

GraphState graph_state(double l, int n) {
    if (!(l > 0.0)) throw UsageError("graph_state: l must be positive");
    if (n < 2) throw UsageError("graph_state: need at least 2 cells per unit length");
    // floor keeps the edge-3 cells at least as wide as the time step 1/N.
    const int m3 = std::max(1, static_cast<int>(std::floor(l * n)));
    GraphState s;
    s.f = {RealVector::Zero(n), RealVector::Zero(n), RealVector::Zero(m3)};
    s.width = {1.0 / n, 1.0 / n, l / m3};
    return s;
}

GraphState graph_fixed_state(double l, int n) {
    GraphState s = graph_state(l, n);
    s.f[1].setOnes();
    s.f[2].setOnes();
    return s;
}

GraphState graph_bump_state(double l, int n, double c, double r) {
    if (!(r > 0.0) || c - r < 0.0 || c + r > 1.0) throw UsageError("graph_bump_state: bump must lie inside edge 1");
    GraphState s = graph_state(l, n);
    const double w = s.width[0];
    for (int i = 0; i < n; ++i) s.f[0](i) = (hat_cdf((i + 1) * w, c, r) - hat_cdf(i * w, c, r)) / w;
    return s;
}

double graph_functional(const GraphState& s) {
    return s.width[0] * s.f[0].sum() / 3.0 + s.width[1] * s.f[1].sum() + s.width[2] * s.f[2].sum();
}

SimulationTrace simulate_graph_flow(const GraphState& init, double t_end, double dt, const SimulationOptions& opts,
                                    bool positive_diversion) {
    if (!(dt > 0.0)) throw UsageError("simulate_graph_flow: time step must be positive");
    if (opts.record_every < 1 || opts.snapshot_every < 0)
        throw UsageError("simulate_graph_flow: invalid recording stride");
    std::array<double, 3> alpha{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (init.f[k].size() == 0) throw UsageError("simulate_graph_flow: empty edge");
        alpha[k] = dt / init.width[k];
        if (alpha[k] > 1.0 + 1e-12) throw UsageError("simulate_graph_flow: CFL violated, dt exceeds a cell width");
        alpha[k] = std::min(alpha[k], 1.0);
    }
    const long steps = step_count(t_end, dt, "simulate_graph_flow");
    const double w1 = positive_diversion ? 1.0 / 3.0 : -1.0 / 3.0;

    GraphState s = init;
    Recorder rec{opts, {}};
    auto record = [&](double t) {
        double d = 0.0, lo = std::numeric_limits<double>::infinity(), mass = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            d += s.width[k] * s.f[k].cwiseMin(0.0).cwiseAbs().sum();
            lo = std::min(lo, s.f[k].minCoeff());
            mass += s.width[k] * s.f[k].sum();
        }
        rec.record(t, d, lo, {{"psi", graph_functional(s)}, {"mass", mass}});
    };
    auto flat = [&] {
        RealVector v(s.f[0].size() + s.f[1].size() + s.f[2].size());
        v << s.f[0], s.f[1], s.f[2];
        return v;
    };

    record(0.0);
    if (opts.snapshot_every > 0) rec.trace.snapshots.emplace_back(0.0, flat());
    for (long n = 0; n < steps; ++n) {
        const double o1 = s.f[0](s.f[0].size() - 1);
        const double o2 = s.f[1](s.f[1].size() - 1);
        const double o3 = s.f[2](s.f[2].size() - 1);
        const std::array<double, 3> inflow{0.0, 0.5 * o2 + 0.5 * o3 + w1 * o1, 0.5 * o2 + 0.5 * o3 + (2.0 / 3.0) * o1};
        for (std::size_t k = 0; k < 3; ++k) {
            RealVector& f = s.f[k];
            const double a = alpha[k];
            for (Eigen::Index j = f.size() - 1; j >= 1; --j) f(j) = (1.0 - a) * f(j) + a * f(j - 1);
            f(0) = (1.0 - a) * f(0) + a * inflow[k];
        }
        const double t = static_cast<double>(n + 1) * dt;
        if ((n + 1) % opts.record_every == 0 || n + 1 == steps) record(t);
        if (opts.snapshot_every > 0 && (n + 1) % opts.snapshot_every == 0) rec.trace.snapshots.emplace_back(t, flat());
    }
    rec.trace.final_state = flat();
    return rec.trace;
}

RealVector extract_state_vector(const DelayState& s, const LatticeContext& ctx) {
    if (s.grid.size() != ctx.n) throw UsageError("extract_state_vector: delay grid does not match the context");
    return s.grid;
}

RealVector extract_state_vector(const GraphState& s, const LatticeContext& ctx) {
    const Eigen::Index n = s.f[0].size() + s.f[1].size() + s.f[2].size();
    if (n != ctx.n) throw UsageError("extract_state_vector: graph state does not match the context");
    RealVector v(n);
    v << s.f[0], s.f[1], s.f[2];
    return v;
}

GraphState graph_state_from_vector(const RealVector& v, const GraphState& shape) {
    const Eigen::Index n0 = shape.f[0].size(), n1 = shape.f[1].size(), n2 = shape.f[2].size();
    if (v.size() != n0 + n1 + n2) throw UsageError("graph_state_from_vector: length mismatch");
    GraphState s = shape;
    s.f[0] = v.segment(0, n0);
    s.f[1] = v.segment(n0, n1);
    s.f[2] = v.segment(n0 + n1, n2);
    return s;
}

}  // namespace apos
