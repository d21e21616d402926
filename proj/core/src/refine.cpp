#include "mehybrid/refine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "mehybrid/errors.hpp"
#include "mehybrid/ode.hpp"

namespace mehybrid {

namespace {

constexpr double kDegenerateEnergy = 1e-14;

std::vector<std::size_t> dims_above(std::span<const double> score, double theta2) {
  std::vector<std::size_t> dims;
  if (score.size() == 1) return {0};
  const double top = *std::max_element(score.begin(), score.end());
  for (std::size_t i = 0; i < score.size(); ++i)
    if (score[i] >= theta2 * top) dims.push_back(i);
  return dims;
}

}  // namespace

void RefinementConfig::validate() const {
  if (!(theta1 > 0.0)) throw std::invalid_argument("refinement: theta1 must be > 0");
  if (!(theta2 > 0.0 && theta2 < 1.0)) throw std::invalid_argument("refinement: theta2 must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("refinement: alpha must lie in (0,1)");
  if (order < 0) throw std::invalid_argument("refinement: order must be >= 0");
  if (reduced_order < 0 || reduced_order >= std::max(order, 1))
    throw std::invalid_argument("refinement: reduced_order must satisfy 0 <= N0 < N");
  if (max_elements < 1) throw std::invalid_argument("refinement: max_elements must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("refinement: dt must be > 0");
  if (!(check_interval > 0.0)) throw std::invalid_argument("refinement: check_interval must be > 0");
}

StaticIndicator static_indicator(const GpcExpansion& exp) {
  StaticIndicator out;
  const std::size_t d = exp.dimension();
  out.r.assign(d, 0.0);
  const int N = exp.order();
  if (N < 1) return out;
  const auto c = exp.coeffs();
  const auto& idx = exp.indices();
  double top = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (idx[i].degree() == N) top += c[i] * c[i];
  const double variance = local_variance(exp);
  out.eta = variance < kDegenerateEnergy ? 0.0 : top / variance;
  if (top >= kDegenerateEnergy)
    for (std::size_t j = 0; j < d; ++j) {
      const double a = exp.coeff(MultiIndex::axis(d, j, N));
      out.r[j] = a * a / top;
    }
  return out;
}

SplitDecision static_should_split(double eta, std::span<const double> r, double prob,
                                  const RefinementConfig& cfg) {
  SplitDecision out;
  out.split = eta > 0.0 && std::pow(eta, cfg.alpha) * prob >= cfg.theta1;
  if (out.split) out.dims = dims_above(r, cfg.theta2);
  return out;
}

StaticRefinement adapt_static(LimitStateModel& model, const RefinementConfig& cfg, int N, int q) {
  cfg.validate();
  const std::uint64_t calls_before = model.call_count();
  struct Node {
    GpcExpansion exp;
    bool settled = false;
  };

  StaticRefinement out;
  std::vector<Node> mesh;
  mesh.push_back({build_collocation(model, unit_element(model.dimension()), N, q)});
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Node> next;
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      Node& node = mesh[k];
      if (node.settled) {
        next.push_back(std::move(node));
        continue;
      }
      const auto ind = static_indicator(node.exp);
      const auto decision = static_should_split(ind.eta, ind.r, node.exp.element().prob, cfg);
      if (!decision.split) {
        node.settled = true;
        next.push_back(std::move(node));
        continue;
      }
      auto children = split_element(node.exp.element(), decision.dims);
      const std::size_t count_now = next.size() + (mesh.size() - k);
      if (count_now - 1 + children.size() > cfg.max_elements) {
        out.truncated = true;
        node.settled = true;
        next.push_back(std::move(node));
        continue;
      }
      out.events.push_back({0.0, next.size(), ind.eta, decision.dims});
      for (auto& c : children) next.push_back({build_collocation(model, c, N, q)});
      changed = true;
    }
    mesh = std::move(next);
  }

  std::vector<Element> elements;
  std::vector<GpcExpansion> expansions;
  for (auto& node : mesh) {
    elements.push_back(node.exp.element());
    expansions.push_back(std::move(node.exp));
  }
  out.surrogate = MultiElementSurrogate(Decomposition(std::move(elements)), std::move(expansions));
  out.model_calls = model.call_count() - calls_before;
  return out;
}

std::vector<GpcExpansion> restrict_expansion(const GpcExpansion& parent, const std::vector<Element>& children,
                                             int q) {
  std::vector<GpcExpansion> out;
  out.reserve(children.size());
  const PointFunction f = [&parent](std::span<const double> z) { return parent.evaluate_unchecked(z); };
  for (const auto& c : children) out.push_back(project(f, c, parent.order(), q));
  return out;
}

DynamicRefinement adapt_dynamic(const PolynomialOdeSystem& system, const RefinementConfig& cfg,
                                double final_time) {
  system.validate();
  cfg.validate();
  if (!(final_time > 0.0)) throw std::invalid_argument("adapt_dynamic: final time must be > 0");

  const int N = cfg.order;
  const std::size_t d = system.dim;
  const std::size_t nv = system.num_vars;
  const auto indices = multi_index_set(d, N);
  const std::size_t P = indices.size();
  const std::size_t n0 = multi_index_count(d, cfg.reduced_order);
  const TripleProductTensor tp(d, N);
  const long n_steps = std::lround(final_time / cfg.dt);
  const long check_every = std::max(1L, std::lround(cfg.check_interval / cfg.dt));

  DynamicRefinement out;
  out.order = N;
  std::vector<Element> elements;
  std::size_t leaves = 1;

  struct Work {
    Element element;
    GalerkinState state;
    FieldModes fields;
    long step = 0;
  };

  std::function<void(Work)> process = [&](Work w) {
    Rk4Stepper rk;
    std::vector<double> full(nv * P);
    std::vector<double> reduced(nv * P);
    auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy) {
      galerkin_rhs(system, w.fields, y, P, tp, P, dy);
    };
    while (w.step < n_steps) {
      rk.step(rhs, w.state.modes, cfg.dt);
      ++w.step;
      w.state.time = static_cast<double>(w.step) * cfg.dt;
      for (double v : w.state.modes)
        if (!std::isfinite(v))
          throw IntegrationFailure("adapt_dynamic: non-finite Galerkin state", w.state.time);
      if (w.step % check_every != 0 || w.step >= n_steps) continue;

      galerkin_rhs(system, w.fields, w.state.modes, P, tp, P, full);
      galerkin_rhs(system, w.fields, w.state.modes, P, tp, n0, reduced);
      const auto ind = dynamic_indicator(full, reduced, w.state, indices, nv, cfg.reduced_order);
      if (ind.q * w.element.prob < cfg.theta1) continue;

      const auto dims = dims_above(ind.s, cfg.theta2);
      auto children = split_element(w.element, dims);
      if (leaves - 1 + children.size() > cfg.max_elements) {
        out.truncated = true;
        continue;
      }
      leaves += children.size() - 1;
      out.events.push_back({w.state.time, elements.size(), ind.q, dims});

      std::vector<Work> next;
      next.reserve(children.size());
      if (cfg.restart == RestartPolicy::project) {
        std::vector<std::vector<GpcExpansion>> per_var;
        for (std::size_t v = 0; v < nv; ++v) {
          const auto m = w.state.var(v);
          per_var.push_back(restrict_expansion(GpcExpansion(w.element, N, {m.begin(), m.end()}), children, N + 1));
        }
        for (std::size_t c = 0; c < children.size(); ++c) {
          Work child{children[c], {}, project_fields(system, children[c], N, cfg.field_nodes()), w.step};
          child.state.time = w.state.time;
          child.state.basis_size = P;
          for (std::size_t v = 0; v < nv; ++v) {
            const auto cc = per_var[v][c].coeffs();
            child.state.modes.insert(child.state.modes.end(), cc.begin(), cc.end());
          }
          next.push_back(std::move(child));
        }
      } else {
        for (const auto& c : children)
          next.push_back({c, project_initial_state(system, c, N, cfg.field_nodes()),
                          project_fields(system, c, N, cfg.field_nodes()), 0});
      }
      for (auto& child : next) process(std::move(child));
      return;
    }
    elements.push_back(w.element);
    out.states.push_back(std::move(w.state));
  };

  const Element root = unit_element(d);
  process({root, project_initial_state(system, root, N, cfg.field_nodes()),
           project_fields(system, root, N, cfg.field_nodes()), 0});
  out.decomposition = Decomposition(std::move(elements));
  return out;
}

MultiElementSurrogate surrogate_from_states(const DynamicRefinement& result, std::size_t var, double shift) {
  std::vector<GpcExpansion> expansions;
  for (std::size_t k = 0; k < result.decomposition.size(); ++k) {
    const auto m = result.states[k].var(var);
    std::vector<double> c(m.begin(), m.end());
    c[0] += shift;
    expansions.emplace_back(result.decomposition[k], result.order, std::move(c));
  }
  return MultiElementSurrogate(result.decomposition, std::move(expansions));
}

std::string events_csv(const std::vector<RefinementEvent>& events) {
  std::ostringstream os;
  os.precision(17);
  os << "time,element,indicator,dims\n";
  for (const auto& e : events) {
    os << e.time << ',' << e.element_id << ',' << e.indicator << ',';
    for (std::size_t i = 0; i < e.dims.size(); ++i) os << (i ? ";" : "") << e.dims[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace mehybrid
