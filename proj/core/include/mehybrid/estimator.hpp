#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mehybrid/randomspace.hpp"
#include "mehybrid/surrogate.hpp"

namespace mehybrid {

struct HybridConfig {
  std::size_t delta_m = 1000;              // samples replaced per iteration
  double eta_stop = 0.0;                   // stop when one iteration moves the estimate by <= eta_stop
  std::optional<std::uint64_t> max_exact;  // cap on exact evaluations

  void validate(std::size_t m) const;
};

struct Estimate {
  double p_f = 0.0;
  std::uint64_t failures = 0;  // samples classified as failing; p_f = failures / m
  std::uint64_t m = 0;
  std::uint64_t n_exact = 0;
  std::uint64_t n_surrogate = 0;
  double stddev = 0.0;
};

/// One iteration of a hybrid run. element is -1 for the global algorithm.
struct TraceRecord {
  std::size_t iteration = 0;
  double estimate = 0.0;
  std::uint64_t n_exact = 0;
  long element = -1;
};

struct HybridTrace {
  std::vector<TraceRecord> records;
};

/// How each sample ended up classified.
enum class Verdict : std::uint8_t {
  surrogate_safe = 0,
  surrogate_fail = 1,
  exact_safe = 2,
  exact_fail = 3,
};

struct HybridResult {
  Estimate estimate;
  HybridTrace trace;
  std::vector<Verdict> verdicts;  // one per sample

  /// Recounts failures from the verdicts alone.
  std::uint64_t recount() const;
};

/// Options for fanning exact evaluations out over threads. Results do not
/// depend on the thread count.
struct Parallelism {
  unsigned threads = 1;
};

/// Fraction of samples with g < 0.
Estimate mc_estimate(LimitStateModel& model, const SampleSet& samples, Parallelism par = {});

/// sqrt(p (1-p) / m).
double mc_stddev(double p, std::uint64_t m);

/// (1/M) sum [1{s < -gamma} + 1{|s| <= gamma} 1{g < 0}]; the exact model is
/// called only inside the band |s| <= gamma.
Estimate direct_hybrid(LimitStateModel& model, const PointFunction& surrogate, const SampleSet& samples,
                       double gamma);

/// Iterative hybrid: start from the surrogate count, then replace the
/// samples with the smallest |s| by exact evaluations, delta_m at a time,
/// until an iteration changes the estimate by at most eta_stop, the samples
/// run out, or max_exact is reached. Ties in |s| are broken by sample index.
HybridResult iterative_hybrid(LimitStateModel& model, const PointFunction& surrogate, const SampleSet& samples,
                              const HybridConfig& cfg, Parallelism par = {});

/// Global hybrid on a multi-element surrogate.
HybridResult me_gha(LimitStateModel& model, const MultiElementSurrogate& surrogate, const SampleSet& samples,
                    const HybridConfig& cfg, Parallelism par = {});

/// Local hybrid: the iterative algorithm runs separately on the samples of
/// each element (normalized by the global m) and the contributions are
/// summed. Every nonempty element performs at least one iteration.
/// `element_order` permutes the processing order (identity when empty).
HybridResult me_lha(LimitStateModel& model, const MultiElementSurrogate& surrogate, const SampleSet& samples,
                    const HybridConfig& cfg, Parallelism par = {},
                    const std::vector<std::size_t>& element_order = {});

/// |p_hat - p_ref| / p_ref.
double relative_error(double p_hat, double p_ref);

/// CSV with columns iteration,estimate,n_exact,element.
std::string trace_csv(const HybridTrace& trace);

}  // namespace mehybrid
