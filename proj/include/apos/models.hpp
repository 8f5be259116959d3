#pragma once

// The worked examples as ready-to-analyze bundles: generator, lattice
// context, closed-form oracles where they exist, and the expected
// classification.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apos/lattice.hpp"
#include "apos/special.hpp"

namespace apos {

struct ModelOracles {
    std::function<ComplexMatrix(double)> semigroup;   // e^{tA}
    std::function<ComplexMatrix(Complex)> resolvent;  // R(λ, A)
    std::vector<RealVector> conserved_functionals;    // wᵀA = 0
};

/// Expected behaviour. Unset fields are not claimed for this model.
struct Prediction {
    std::optional<bool> positive;
    std::optional<bool> eventually_strongly_positive;
    std::optional<bool> asymptotically_positive;
    std::optional<bool> projection_strongly_positive;
    std::optional<bool> resolvent_eventually_positive;
    std::string note;
};

struct ModelBundle {
    std::string name;
    ComplexMatrix A;  // empty for simulator-backed models
    LatticeContext ctx;
    ModelOracles oracles;
    Prediction predicted;
    std::map<std::string, double> params;
    /// Cluster radius for spectrum_report when the default is too coarse
    /// for the model's eigenvalue gaps.
    std::optional<double> tol_cluster;
    /// Model-specific test vector (the singular profile of reflection_lp).
    std::optional<RealVector> profile;
    std::optional<CharFunction> characteristic;

    bool simulator_backed() const { return A.size() == 0; }
};

ModelBundle spiral3();

/// 3×3 generator with s = 0, eventually positive but not positive
/// semigroup: 𝟙𝟙ᵀ/3 − I + 3K, K the rotation generator about (1,1,1).
ComplexMatrix stock_eventually_positive_inner();

/// (A_inner − λ0 I) ⊕ 0. Throws NumericalFailure unless R(λ0, A_inner) has
/// a negative entry.
ModelBundle shifted_direct_sum(const ComplexMatrix& inner, double lambda0);

ModelBundle reflection_lp(int n, Exponent p);
ModelBundle dirichlet_laplacian_sq_1d(int n);
ModelBundle bilaplacian_clamped_1d(int n);

/// Generator of the Laplacian on (0, L) with boundary conditions
/// −u′(0) + (Bγu)₁ = 0 and u′(L) + (Bγu)₂ = 0, γu = (u(0), u(L)).
ModelBundle nonlocal_robin_1d(int n, double length, const RealMatrix& b);
ModelBundle nonlocal_robin_thermostat(int n, double beta);
ModelBundle nonlocal_robin_ones(int n);

/// Symbol d_k(λ) of the Dirichlet-to-Neumann operator on the unit disk.
double dtn_symbol(int k, double lambda);
ModelBundle dtn_disk(double lambda, int k_max);
/// Largest eigenvalue of −D_λ simple with constant eigenvector, i.e.
/// d_0 < d_k for 1 ≤ k ≤ K.
bool dtn_condition(double lambda, int k_max);

struct BoseAnalysis {
    std::vector<double> q;               // q_0..q_M
    std::vector<double> lambda_k1;       // smallest root per angular order
    std::vector<double> residuals;       // |condition| at each root
    double lambda1 = 0.0;                // λ_{0,1}
    bool dominant = false;               // λ_{0,1} < λ_{k,1} for all k ≥ 1
    std::vector<double> beurling_deny;   // index m − 1 holds the value for m
    std::vector<double> tail_bounds;
    std::optional<int> violating_m;      // first m with a positive value
};

/// (2/π)q_0 − (π/4)q_m + (4/π)Σ_{k≥1} q_{2km}/((2k)²−1)², coefficients
/// beyond the supplied range taken as zero.
double beurling_deny_value(const std::vector<double>& q, int m);
/// ∬ q(θ−φ)(sin mφ)⁺(sin mθ)⁻ dφ dθ by composite Simpson on panels
/// between the zeros of sin(m·).
double beurling_deny_quadrature(const std::vector<double>& q, int m, int nodes_per_panel = 200);

BoseAnalysis bose_analysis(const std::vector<double>& q, int k_max);
/// Circulant on 2K+1 boundary nodes with symbol −λ_{|k|,1}.
ModelBundle bose_disk(const std::vector<double>& q, int k_max);

enum class TowerVariant { A, B, C };
/// Blocks n = 1..n_blocks of the multiplication operators
/// (a) nB − 1/n, (b) nK − Q/n, (c) K − Q/n.
ModelBundle truncated_tower(int n_blocks, TowerVariant variant);

/// Simulator-backed transport on the three-edge graph.
ModelBundle network_flow(double l, int n);
/// Simulator-backed delay equation y′(t) = y(t−2) − y(t−1).
ModelBundle delay_model(int cells_per_unit = 1000);

using ModelParams = std::map<std::string, double>;

/// Names accepted by make_model.
std::vector<std::string> model_names();
/// Constructs a model by name with defaults for missing parameters.
/// Throws UsageError on unknown names or parameters.
ModelBundle make_model(const std::string& name, const ModelParams& params = {});
/// The matrix models at their default parameters.
std::vector<ModelBundle> matrix_models();

}  // namespace apos
