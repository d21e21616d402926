#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mehybrid/polybasis.hpp"
#include "mehybrid/randomspace.hpp"
#include "mehybrid/surrogate.hpp"

namespace mehybrid {

/// One monomial term `scale * a_field(z) * u_{vars[0]} * u_{vars[1]}` of an
/// ODE right-hand side. field < 0 means no random coefficient. At most two
/// factors (fields plus state variables) are supported.
struct PolynomialTerm {
  double scale = 1.0;
  int field = -1;
  std::vector<std::size_t> vars;

  std::size_t factors() const noexcept { return vars.size() + (field >= 0 ? 1 : 0); }
};

/// du_v/dt = sum of terms, with random initial data u_v(0; z) and random
/// coefficient fields a_f(z), all given as functions on [-1,1]^dim.
struct PolynomialOdeSystem {
  std::size_t dim = 1;
  std::size_t num_vars = 0;
  std::vector<std::vector<PolynomialTerm>> equations;
  std::vector<PointFunction> fields;
  std::vector<PointFunction> initial;

  /// Throws UnsupportedModel for terms with more than two factors and
  /// std::invalid_argument for inconsistent sizes.
  void validate() const;

  /// Deterministic right-hand side at a single point, used by the exact
  /// models and by tests. `field_values` holds a_f(z).
  void pointwise_rhs(std::span<const double> u, std::span<const double> field_values,
                     std::span<double> dudt) const;
};

/// gPC modes of all state variables on one element; variable v occupies
/// modes[v*basis_size, (v+1)*basis_size).
struct GalerkinState {
  double time = 0.0;
  std::size_t basis_size = 0;
  std::vector<double> modes;

  std::span<double> var(std::size_t v) { return std::span(modes).subspan(v * basis_size, basis_size); }
  std::span<const double> var(std::size_t v) const {
    return std::span(modes).subspan(v * basis_size, basis_size);
  }
};

/// Element-local coefficients of the random fields, laid out like the state.
struct FieldModes {
  std::size_t basis_size = 0;
  std::vector<double> modes;

  std::span<const double> field(std::size_t f) const {
    return std::span(modes).subspan(f * basis_size, basis_size);
  }
};

/// Galerkin right-hand side dU_i/dt = R_i(U). Only modes i < count are
/// produced, and only state modes < count are read (random fields always
/// enter with all their modes); with count smaller than the basis size this
/// is the Galerkin system of the truncated expansion, i.e. the reduced model. Output layout matches the state
/// with stride basis_size.
void galerkin_rhs(const PolynomialOdeSystem& system, const FieldModes& fields,
                  std::span<const double> modes, std::size_t basis_size,
                  const TripleProductTensor& tp, std::size_t count, std::span<double> dmodes);

std::vector<double> galerkin_rhs(const PolynomialOdeSystem& system, const FieldModes& fields,
                                 const GalerkinState& state, const TripleProductTensor& tp);

/// Projects the random initial data and fields onto the element basis.
GalerkinState project_initial_state(const PolynomialOdeSystem& system, const Element& e, int N, int q);
FieldModes project_fields(const PolynomialOdeSystem& system, const Element& e, int N, int q);

/// Energy-transfer indicator between the full (order N) and truncated
/// (order N0) Galerkin systems:
///   Q   = | sum_v sum_{|j|<=N0} 2 (Rfull_j u_j - Rred_j u_j) |
///   s_i = | sum_v 2 (Rfull_m u_m - Rred_m u_m) |,  m = N0 e^i.
struct DynamicIndicator {
  double q = 0.0;
  std::vector<double> s;
};

DynamicIndicator dynamic_indicator(std::span<const double> full_rhs, std::span<const double> reduced_rhs,
                                   const GalerkinState& state, const std::vector<MultiIndex>& indices,
                                   std::size_t num_vars, int reduced_order);

}  // namespace mehybrid
