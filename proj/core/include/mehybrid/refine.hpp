#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mehybrid/galerkin.hpp"
#include "mehybrid/randomspace.hpp"
#include "mehybrid/surrogate.hpp"

namespace mehybrid {

/// How children are initialized after a dynamic split.
enum class RestartPolicy {
  project,  // re-expand the parent's current state on each child and continue
  resolve,  // re-project the initial data and integrate the child from t = 0
};

struct RefinementConfig {
  double theta1 = 1e-3;  // split threshold (the user tolerance TOL_1)
  double theta2 = 0.1;   // relative sensitivity needed for a dimension to be split
  double alpha = 0.5;    // exponent on the static decay rate
  int order = 3;         // N
  int reduced_order = 1; // N0 < N, dynamic criterion only
  std::size_t max_elements = 256;
  double dt = 0.01;
  double check_interval = 0.1;
  int field_quadrature = 0;  // nodes/dim for projecting random data; 0 picks 2(N+1)
  RestartPolicy restart = RestartPolicy::project;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
  int field_nodes() const { return field_quadrature > 0 ? field_quadrature : 2 * (order + 1); }
};

/// Local decay rate eta = (top-degree energy) / (local variance) and the
/// per-dimension share r_j of the top-degree energy held by N e^j.
struct StaticIndicator {
  double eta = 0.0;
  std::vector<double> r;
};

StaticIndicator static_indicator(const GpcExpansion& exp);

struct SplitDecision {
  bool split = false;
  std::vector<std::size_t> dims;
};

/// Split when eta^alpha * prob >= theta1; dims are those with
/// r_i >= theta2 * max r_j (always {0} in one dimension).
SplitDecision static_should_split(double eta, std::span<const double> r, double prob,
                                  const RefinementConfig& cfg);

/// One refinement event: the element split at `time` with indicator value
/// `indicator` (eta or Q). element_id is the position of the parent in the
/// mesh at the moment of the split.
struct RefinementEvent {
  double time = 0.0;
  std::size_t element_id = 0;
  double indicator = 0.0;
  std::vector<std::size_t> dims;
};

struct StaticRefinement {
  MultiElementSurrogate surrogate;
  bool truncated = false;
  std::uint64_t model_calls = 0;  // collocation evaluations, including discarded parents
  std::vector<RefinementEvent> events;
};

/// Breadth-first static refinement: collocate on every element, split where
/// the decay-rate criterion fires, re-collocate the children, repeat.
StaticRefinement adapt_static(LimitStateModel& model, const RefinementConfig& cfg, int N, int q);

struct DynamicRefinement {
  Decomposition decomposition;
  std::vector<GalerkinState> states;  // one per element, at the final time
  bool truncated = false;
  std::vector<RefinementEvent> events;
  int order = 0;
};

/// Integrates the order-N Galerkin system on each element with RK4, checks
/// the energy-transfer indicator every cfg.check_interval, and splits an
/// element when Q * prob >= theta1.
DynamicRefinement adapt_dynamic(const PolynomialOdeSystem& system, const RefinementConfig& cfg,
                                double final_time);

/// Re-expands a parent expansion on each child element. Exact for children
/// inside the parent when q >= order + 1.
std::vector<GpcExpansion> restrict_expansion(const GpcExpansion& parent, const std::vector<Element>& children,
                                             int q);

/// Surrogate for g = u_var(T) + shift built from the final Galerkin states.
MultiElementSurrogate surrogate_from_states(const DynamicRefinement& result, std::size_t var, double shift = 0.0);

/// CSV with columns time,element,indicator,dims.
std::string events_csv(const std::vector<RefinementEvent>& events);

}  // namespace mehybrid
