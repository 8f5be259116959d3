#pragma once

// Acceptance suite: thirteen reproducibility criteria, each reported as a
// pass/fail line with the measured quantities.

#include <optional>
#include <string>
#include <vector>

#include "apos/types.hpp"

namespace apos {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0 when the criterion has no time limit
    std::string detail;
};

/// Criteria that run on matrices only and fit the quick budget.
std::vector<int> quick_criteria();
int criterion_count();

/// Runs one criterion. Exceptions inside a criterion are reported as a
/// failure with the message in `detail`.
CriterionResult run_criterion(int id);

std::vector<CriterionResult> run_certification(bool quick);

/// Projection onto the leading real cluster along the four routes
/// (spectral, contour, Abel with Richardson extrapolation, powers of
/// λR(λ,A) by repeated squaring) and the largest pairwise discrepancy,
/// relative to max(1, max|P|).
struct ProjectionRoutes {
    ComplexMatrix spectral;
    ComplexMatrix contour;
    ComplexMatrix abel;
    ComplexMatrix power;
    double discrepancy = 0.0;
};
ProjectionRoutes projection_routes(const ComplexMatrix& a, std::optional<double> tol_cluster = std::nullopt);

}  // namespace apos
