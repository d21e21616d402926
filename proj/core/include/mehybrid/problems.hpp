#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mehybrid/galerkin.hpp"
#include "mehybrid/surrogate.hpp"

namespace mehybrid {

// ---- step function -------------------------------------------------------

/// -1 on [-1,0), -1/2 at 0, 0 on (0,1].
double step_g(double z);

/// Closed-form global Legendre approximation of the step function with odd
/// terms up to degree 2p+1, as an order-(2p+1) expansion on [-1,1].
GpcExpansion step_global_gpc(int p);

/// Two constant pieces (-1 on [-1,0), 0 on [0,1]); exact away from z = 0.
MultiElementSurrogate step_two_element_surrogate();

// ---- Gaussian inputs -----------------------------------------------------

/// Inverse error function on (-1,1); throws std::domain_error otherwise.
double erfinv(double x);

/// mu + sqrt(2) sigma erfinv(x): maps U(-1,1) to N(mu, sigma^2).
double gaussian_from_uniform(double x, double mu, double sigma);

/// P(X > t) for a standard normal X.
double normal_tail(double t);

/// Orthonormal Legendre coefficients of gaussian_from_uniform(., mu, sigma)
/// up to degree p, computed with `nodes` Gauss points.
std::vector<double> z_legendre_coeffs(int p, double mu, double sigma, int nodes = 128);

// ---- linear ODE du/dt = -Z u ---------------------------------------------

struct LinearOdeParams {
  double u0 = 1.0;
  double T = 1.0;
  double u_d = 0.5;
  double mu = -2.0;
  double sigma = 1.0;
  int z_order = 0;  // Galerkin field: 0 uses the exact transform, p > 0 its degree-p Legendre series
};

/// u0 exp(-Z T) - u_d with Z = gaussian_from_uniform(x).
double ode_limit_state(double x, const LinearOdeParams& p = {});

/// 1 - Phi((ln(u0/u_d)/T - mu)/sigma).
double ode_failure_probability(const LinearOdeParams& p = {});

PolynomialOdeSystem linear_ode_system(const LinearOdeParams& p = {});

// ---- Kraichnan-Orszag three-mode system ----------------------------------

struct KoParams {
  double T = 15.0;
  double u_d = 0.03;
  double dt = 0.01;
  double amplitude = 0.1;  // y2(0) = amplitude * xi
};

/// y1' = y1 y3, y2' = -y2 y3, y3' = -y1^2 + y2^2.
void ko_rhs(const std::array<double, 3>& y, std::array<double, 3>& dy);

/// RK4 trajectory from (1, amplitude xi, 0) to time T. Throws
/// IntegrationFailure on a non-finite state.
std::array<double, 3> ko_final_state(double xi, const KoParams& p = {});

/// y1(T) - u_d.
double ko_limit_state(double xi, const KoParams& p = {});

PolynomialOdeSystem ko_system(const KoParams& p = {});

// ---- Burgers transition layer --------------------------------------------

struct BurgersParams {
  double nu = 0.05;
  double e = 0.1;   // delta ~ U(0, e)
  double z0 = 0.75;
  double orientation = 1.0;  // +1: g = z0 - z; -1: g = z - z0 (failure below z0)
};

/// Solution (A, z) of A tanh(A(1+z)/(2 nu)) = 1 + delta,
/// A tanh(A(1-z)/(2 nu)) = 1.
struct TransitionLayer {
  double amplitude = 0.0;
  double z = 0.0;
  double residual = 0.0;  // max-norm of the two equations
  int iterations = 0;
};

/// Throws RootFailure when the iteration does not converge.
TransitionLayer burgers_transition(double delta, double nu);
double burgers_transition_z(double delta, double nu);

/// orientation * (z0 - z(delta)) with delta = e (x+1)/2.
double burgers_limit_state(double x, const BurgersParams& p = {});

// ---- registry ------------------------------------------------------------

/// A reference failure probability and where it comes from: "published" for a
/// published value, "derived" for a value computed here.
struct ReferenceValue {
  double value = 0.0;
  std::string provenance;
  std::string note;
};

/// Numeric problem parameters by name (e.g. "nu", "T").
using ProblemParams = std::map<std::string, double, std::less<>>;

/// What an ODE problem hands to the Galerkin refinement: the system, its
/// final time and the surrogate g = u_var(T) + shift.
struct GalerkinSetup {
  PolynomialOdeSystem system;
  double final_time = 0.0;
  std::size_t var = 0;
  double shift = 0.0;
  double dt = 0.01;
};

struct ProblemSpec {
  std::string name;
  std::size_t dim = 1;
  ProblemParams parameters;  // defaults merged with overrides
  std::vector<ReferenceValue> references;
  std::function<std::unique_ptr<LimitStateModel>()> make_model;
  std::optional<GalerkinSetup> galerkin;

  /// The first reference, used for relative errors; null when there is
  /// none (published values are dropped once parameters are overridden).
  const ReferenceValue* reference() const { return references.empty() ? nullptr : &references.front(); }
};

/// Registered names: step, linear-ode, ko3, burgers.
std::vector<std::string> problem_names();

/// Builds a problem with defaults overridden by `overrides`. Throws
/// std::invalid_argument for an unknown name, an unknown parameter or a value
/// out of range.
ProblemSpec make_problem(std::string_view name, const ProblemParams& overrides = {});

}  // namespace mehybrid
