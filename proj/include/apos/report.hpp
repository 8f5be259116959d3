#pragma once

// Request handling behind the command-line front end: analysis reports as
// deterministic JSON, simulation traces as CSV, root sets and the
// acceptance table.

#include <string>

#include <json.hpp>

#include "apos/certify.hpp"
#include "apos/dynamics.hpp"
#include "apos/numkernel.hpp"

namespace apos {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "apos";
inline constexpr const char* kToolVersion = "1.0.0";

/// Two-space indented JSON with keys in insertion order and every floating
/// point number printed with 17 significant digits. Non-finite values
/// become the strings "inf", "-inf" and "nan".
std::string format_json(const Json& j);

/// {"n": int, "re": [...], "im": [...]}, row-major; "im" may be omitted.
ComplexMatrix parse_matrix_json(const Json& j);
ComplexMatrix read_matrix_file(const std::string& path);
Json read_json_file(const std::string& path);

/// Request keys: model, params, matrix (file path), u, p, tol_cluster,
/// seed. Throws UsageError on malformed requests and NumericalFailure when
/// the pipeline fails.
Json analyze(const Json& request);

/// Request keys: model (delay | network_flow), params, T, step, init,
/// record_every.
SimulationTrace simulate(const Json& request);
/// Header t,d_plus,min_value,<functionals>; one row per recorded time.
std::string trace_to_csv(const SimulationTrace& trace);

/// Request keys: function (delay_char | network_char | bose_k0), rect
/// [reL, reR, imB, imT], params.
Json roots(const Json& request);

Json certify_report(const std::vector<CriterionResult>& results);

/// {"tool", "error": {"kind", "message", "where", "value"}}.
Json error_report(const std::string& kind, const std::string& message, const std::string& where = "",
                  double value = 0.0);

}  // namespace apos
