#pragma once

// Time-domain simulators for the delay equation y′(t) = y(t−2) − y(t−1)
// and for the transport flow on the three-edge graph.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "apos/lattice.hpp"

namespace apos {

/// Samples of y on [t−2, t] at spacing h; grid(0) belongs to t − 2.
struct DelayState {
    RealVector grid;
    double h = 0.0;
    double t_now = 0.0;
};

/// Cell averages on the edges of lengths 1, 1 and l.
struct GraphState {
    std::array<RealVector, 3> f;
    std::array<double, 3> width{};

    double length(int edge) const { return width[static_cast<std::size_t>(edge)] * static_cast<double>(f[static_cast<std::size_t>(edge)].size()); }
};

struct SimulationTrace {
    std::vector<double> times;
    std::vector<double> d_plus;
    std::map<std::string, std::vector<double>> functionals;
    std::vector<double> min_value;
    std::vector<std::pair<double, RealVector>> snapshots;
    RealVector final_state;
};

struct SimulationOptions {
    /// Record every k-th step (the first and last steps are always recorded).
    int record_every = 1;
    /// Store the state every k-th step; 0 disables snapshots.
    int snapshot_every = 0;
};

/// φ(f) = f(0) + ∫_{−2}^{−1} f for a history grid of spacing h = 1/m,
/// integrating the piecewise cubic Hermite interpolant used by the stepper.
double delay_functional(const RealVector& history, double h);

/// Method of steps with RK4; delayed values at half steps come from cubic
/// Hermite interpolation. Records φ ("phi"), d₊ in the sup norm and the
/// smallest value on the current segment.
SimulationTrace simulate_delay(const RealVector& history, double t_end, double h,
                               const SimulationOptions& opts = {});
SimulationTrace simulate_delay(const std::function<double(double)>& history, double t_end, double h,
                               const SimulationOptions& opts = {});

/// History samples of a function on [−2, 0] with spacing h.
RealVector sample_history(const std::function<double(double)>& history, double h);
/// Hat function of unit height centred at c with half-width r.
std::function<double(double)> hat_function(double c, double r);

/// Zero state with N cells on edges 1 and 2 and floor(l·N) cells on edge 3.
GraphState graph_state(double l, int n);
/// (0, 𝟙, 𝟙), spanning the kernel of the generator.
GraphState graph_fixed_state(double l, int n);
/// Hat-shaped bump of unit mass on edge 1 centred at c with half-width r,
/// stored as exact cell averages.
GraphState graph_bump_state(double l, int n, double c, double r);

/// ψ(f) = ⅓∫f₁ + ∫f₂ + ∫f₃.
double graph_functional(const GraphState& s);

/// Semi-Lagrangian upwind remap with time step dt on every edge (an exact
/// shift where dt equals the cell width). `positive_diversion` replaces the
/// −⅓ weight by +⅓. Records ψ ("psi"), total mass ("mass"), d₊ in the
/// weighted 1-norm and the smallest cell value. Throws UsageError when dt
/// exceeds a cell width.
SimulationTrace simulate_graph_flow(const GraphState& init, double t_end, double dt,
                                    const SimulationOptions& opts = {}, bool positive_diversion = false);

/// Flattens a state into the lattice vector of the matching ModelBundle.
RealVector extract_state_vector(const DelayState& s, const LatticeContext& ctx);
RealVector extract_state_vector(const GraphState& s, const LatticeContext& ctx);
GraphState graph_state_from_vector(const RealVector& v, const GraphState& shape);

}  // namespace apos
