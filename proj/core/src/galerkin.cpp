#include "mehybrid/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mehybrid/errors.hpp"

namespace mehybrid {

void PolynomialOdeSystem::validate() const {
  if (dim < 1) throw std::invalid_argument("PolynomialOdeSystem: dimension must be >= 1");
  if (equations.size() != num_vars || initial.size() != num_vars)
    throw std::invalid_argument("PolynomialOdeSystem: need one equation and one initial condition per variable");
  for (std::size_t v = 0; v < num_vars; ++v)
    for (const auto& t : equations[v]) {
      if (t.factors() > 2)
        throw UnsupportedModel("PolynomialOdeSystem: equation " + std::to_string(v) +
                               " has a term with more than two factors");
      if (t.field >= static_cast<int>(fields.size()))
        throw std::invalid_argument("PolynomialOdeSystem: unknown random field");
      for (auto u : t.vars)
        if (u >= num_vars) throw std::invalid_argument("PolynomialOdeSystem: unknown state variable");
    }
}

void PolynomialOdeSystem::pointwise_rhs(std::span<const double> u, std::span<const double> field_values,
                                        std::span<double> dudt) const {
  for (std::size_t v = 0; v < num_vars; ++v) {
    double sum = 0.0;
    for (const auto& t : equations[v]) {
      double term = t.scale;
      if (t.field >= 0) term *= field_values[static_cast<std::size_t>(t.field)];
      for (auto w : t.vars) term *= u[w];
      sum += term;
    }
    dudt[v] = sum;
  }
}

void galerkin_rhs(const PolynomialOdeSystem& system, const FieldModes& fields, std::span<const double> modes,
                  std::size_t basis_size, const TripleProductTensor& tp, std::size_t count,
                  std::span<double> dmodes) {
  if (count > basis_size || tp.basis_size() != basis_size)
    throw std::invalid_argument("galerkin_rhs: basis size mismatch");
  if (modes.size() != system.num_vars * basis_size || dmodes.size() != modes.size())
    throw std::invalid_argument("galerkin_rhs: state size mismatch");
  std::fill(dmodes.begin(), dmodes.end(), 0.0);
  std::vector<double> product(count);

  auto factor = [&](const PolynomialTerm& t, std::size_t which) -> std::span<const double> {
    // Factor order: random field first (if any), then state variables.
    if (t.field >= 0) {
      if (which == 0) return fields.field(static_cast<std::size_t>(t.field));
      return modes.subspan(t.vars[which - 1] * basis_size, basis_size);
    }
    return modes.subspan(t.vars[which] * basis_size, basis_size);
  };

  for (std::size_t v = 0; v < system.num_vars; ++v) {
    auto out = dmodes.subspan(v * basis_size, count);
    for (const auto& t : system.equations[v]) {
      switch (t.factors()) {
        case 0:
          if (count > 0) out[0] += t.scale;
          break;
        case 1: {
          const auto a = factor(t, 0);
          for (std::size_t i = 0; i < count; ++i) out[i] += t.scale * a[i];
          break;
        }
        case 2: {
          // Random fields belong to the operator and keep all their modes;
          // only the state is truncated.
          const std::size_t limit_a = t.field >= 0 ? basis_size : count;
          tp.contract(factor(t, 0), factor(t, 1), product, count, limit_a, count);
          for (std::size_t i = 0; i < count; ++i) out[i] += t.scale * product[i];
          break;
        }
        default:
          throw UnsupportedModel("galerkin_rhs: term with more than two factors");
      }
    }
  }
}

std::vector<double> galerkin_rhs(const PolynomialOdeSystem& system, const FieldModes& fields,
                                 const GalerkinState& state, const TripleProductTensor& tp) {
  system.validate();
  std::vector<double> d(state.modes.size());
  galerkin_rhs(system, fields, state.modes, state.basis_size, tp, state.basis_size, d);
  return d;
}

GalerkinState project_initial_state(const PolynomialOdeSystem& system, const Element& e, int N, int q) {
  GalerkinState s;
  s.basis_size = multi_index_count(e.dimension(), N);
  s.modes.reserve(system.num_vars * s.basis_size);
  for (std::size_t v = 0; v < system.num_vars; ++v) {
    const auto exp = project(system.initial[v], e, N, q);
    s.modes.insert(s.modes.end(), exp.coeffs().begin(), exp.coeffs().end());
  }
  return s;
}

FieldModes project_fields(const PolynomialOdeSystem& system, const Element& e, int N, int q) {
  FieldModes f;
  f.basis_size = multi_index_count(e.dimension(), N);
  for (const auto& field : system.fields) {
    const auto exp = project(field, e, N, q);
    f.modes.insert(f.modes.end(), exp.coeffs().begin(), exp.coeffs().end());
  }
  return f;
}

DynamicIndicator dynamic_indicator(std::span<const double> full_rhs, std::span<const double> reduced_rhs,
                                   const GalerkinState& state, const std::vector<MultiIndex>& indices,
                                   std::size_t num_vars, int reduced_order) {
  const std::size_t P = state.basis_size;
  if (indices.size() != P || full_rhs.size() != num_vars * P || reduced_rhs.size() != num_vars * P)
    throw std::invalid_argument("dynamic_indicator: size mismatch");
  const std::size_t d = indices.front().dimension();
  const std::size_t n0 = multi_index_count(d, reduced_order);
  if (n0 > P) throw std::invalid_argument("dynamic_indicator: reduced order exceeds full order");

  DynamicIndicator out;
  double q = 0.0;
  for (std::size_t v = 0; v < num_vars; ++v)
    for (std::size_t j = 0; j < n0; ++j) {
      const double u = state.modes[v * P + j];
      q += 2.0 * (full_rhs[v * P + j] - reduced_rhs[v * P + j]) * u;
    }
  out.q = std::abs(q);
  out.s.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t m = multi_index_position(indices, MultiIndex::axis(d, i, reduced_order));
    double s = 0.0;
    for (std::size_t v = 0; v < num_vars; ++v) {
      const double u = state.modes[v * P + m];
      s += 2.0 * (full_rhs[v * P + m] - reduced_rhs[v * P + m]) * u;
    }
    out.s[i] = std::abs(s);
  }
  return out;
}

}  // namespace mehybrid
