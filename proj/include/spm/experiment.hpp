#pragma once

// JSON-configured runs and their trace output. The config schema is
// documented in README.md; CSV traces get a sidecar <out>.summary.json.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spm/algorithm.hpp"
#include "spm/checks.hpp"

namespace spm {

struct ExperimentConfig {
  AlgorithmConfig algorithm;
  std::optional<Point> known_solution;
  bool log_y_n = false;
  /// Non-fatal adjustments made while reading, e.g. weight renormalization.
  std::vector<std::string> notices;
};

/// Throws StructuralError with the offending field path in the message.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

/// One trace row as written to CSV and JSON.
struct TraceRecord {
  int n = 0;
  double step_norm = 0.0;
  double phi_to_x0 = 0.0;
  double phi_next_to_u = 0.0;
  std::vector<double> fix_residuals;
  double ep_res = 0.0;
  int inner_iters = 0;
  std::size_t cut_count = 0;
  std::vector<double> y;  ///< empty unless y_n logging is on

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

TraceRecord record_of(const StepDiagnostics& step, bool log_y_n);

std::string trace_csv(const std::vector<StepDiagnostics>& trace, std::size_t maps, bool log_y_n);

nlohmann::json summary_json(const RunResult& result, const Report& checks);
/// {"trace": [...], "summary": {...}}.
nlohmann::json run_json(const RunResult& result, const Report& checks, bool log_y_n);
std::vector<TraceRecord> parse_trace(const nlohmann::json& doc);

enum class Format { csv, json };

/// Exit code 0 when converged, 2 when max_outer was reached, 1 on error.
/// Diagnostics and notices go to err.
int cmd_run(const std::string& config_path, const std::string& out_path, Format format, std::ostream& err);

/// Prints one PASS/FAIL line per check; exit 0 iff all pass, 1 on bad input.
int cmd_check(const std::string& suite, const CheckOptions& options, std::ostream& out, std::ostream& err);

}  // namespace spm
