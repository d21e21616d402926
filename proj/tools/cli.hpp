#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <mehybrid/estimator.hpp>
#include <mehybrid/io.hpp>
#include <mehybrid/problems.hpp>
#include <mehybrid/refine.hpp>

namespace mehybrid::cli {

/// Bad command line or configuration; maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// One estimation run. Unset optional fields take problem-specific
/// defaults when the config is resolved.
struct RunConfig {
  std::string problem;
  ProblemParams params;
  std::string method;     // mc, surrogate, direct-hybrid, global-hybrid, me-gha, me-lha
  std::string surrogate;  // adaptive, global, closed-form, two-element, cache
  int order = 3;
  int quadrature = 0;  // collocation nodes per dimension; 0 picks order+2 (21 for burgers)

  std::optional<double> theta1;
  double theta2 = 0.1;
  std::optional<double> alpha;
  int reduced_order = -1;  // -1 picks (order-1)/2
  std::size_t max_elements = 256;
  double check_interval = 0.0;  // 0 picks 10 dt
  std::string restart = "project";

  std::uint64_t m = 0;
  std::size_t delta_m = 1000;  // unset: min(1000, m)
  double eta_stop = 0.0;
  std::optional<std::uint64_t> max_exact;
  std::uint64_t seed = 0;
  std::optional<double> gamma;
  unsigned threads = 1;

  std::string cache;  // surrogate cache read when surrogate == "cache"
  std::string report_path;
  std::string trace_path;
  std::string surrogate_path;
  std::string events_path;
};

/// Applies `key.path=value` overrides; values are parsed as JSON when
/// possible and kept as strings otherwise.
json apply_overrides(json doc, const std::vector<std::string>& sets);

/// Parses and resolves a config document. Throws UsageError naming the
/// offending field.
RunConfig parse_config(const json& doc);

/// Resolved config with every field spelled out; parse_config of the
/// result reproduces the same run.
json config_to_json(const RunConfig& cfg);

/// A surrogate together with what it cost to build.
struct SurrogateBuild {
  MultiElementSurrogate surrogate;
  std::uint64_t model_calls = 0;
  bool truncated = false;
  std::vector<RefinementEvent> events;
};

SurrogateBuild build_surrogate(const RunConfig& cfg, const ProblemSpec& spec, LimitStateModel& model);

struct RunReport {
  Estimate estimate;
  std::uint64_t n_construction = 0;  // exact calls spent building the surrogate
  std::size_t elements = 0;
  bool truncated = false;
  std::optional<double> relative_error;
  std::optional<ReferenceValue> reference;
  double wall_time = 0.0;
  HybridTrace trace;
  std::vector<RefinementEvent> events;
  std::optional<MultiElementSurrogate> surrogate;
  json config;

  std::uint64_t n_exact_total() const { return estimate.n_exact + n_construction; }
  json to_json() const;
};

RunReport run(const RunConfig& cfg);

/// Writes whichever of report/trace/surrogate/events paths are set.
void write_outputs(const RunConfig& cfg, const RunReport& report);

struct TableOptions {
  std::uint64_t m = 1000000;
  std::uint64_t seed = 2024;
  unsigned threads = 1;
};

struct TableCell {
  std::string row;
  std::string column;
  double computed = 0.0;
  std::optional<double> published;
};

/// Recomputes one of the five benchmark tables (1..5).
std::vector<TableCell> table(int n, const TableOptions& opts);

/// Columns row,column,computed,published,abs_diff.
std::string table_csv(const std::vector<TableCell>& cells);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast invariant checks. With a cache path the stored surrogate's mesh is
/// checked as well.
std::vector<CheckResult> validate(const std::optional<std::string>& cache_path = std::nullopt);

}  // namespace mehybrid::cli
