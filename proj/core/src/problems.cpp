#include "mehybrid/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mehybrid/errors.hpp"
#include "mehybrid/polybasis.hpp"

namespace mehybrid {

double step_g(double z) {
  if (z < 0.0) return -1.0;
  if (z == 0.0) return -0.5;
  return 0.0;
}

GpcExpansion step_global_gpc(int p) {
  if (p < 0) throw std::invalid_argument("step_global_gpc: p must be >= 0");
  const int order = 2 * p + 1;
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = -0.5;
  // binom(2n, n) / 4^n, updated incrementally.
  double central = 1.0;
  for (int n = 0; n <= p; ++n) {
    if (n > 0) central *= (2.0 * n - 1.0) / (2.0 * n);
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    // (4n+3)(2n)! / (2^{2n+2} (n+1)! n!) in front of P_{2n+1}; phi = sqrt(4n+3) P.
    const double unnormalized = sign * (4.0 * n + 3.0) * central / (4.0 * (n + 1.0));
    c[static_cast<std::size_t>(2 * n + 1)] = unnormalized / std::sqrt(4.0 * n + 3.0);
  }
  return GpcExpansion(unit_element(1), order, std::move(c));
}

MultiElementSurrogate step_two_element_surrogate() {
  Decomposition mesh({make_element({-1.0}, {0.0}), make_element({0.0}, {1.0})});
  std::vector<GpcExpansion> pieces{GpcExpansion(mesh[0], 0, {-1.0}), GpcExpansion(mesh[1], 0, {0.0})};
  return MultiElementSurrogate(std::move(mesh), std::move(pieces));
}

namespace {

// Single-precision-accurate starting point (polynomial in log(1-x^2)).
double erfinv_guess(double x) {
  double w = -std::log((1.0 - x) * (1.0 + x));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * x;
}

}  // namespace

double erfinv(double x) {
  if (!(std::abs(x) < 1.0)) throw std::domain_error("erfinv: argument must lie in (-1,1)");
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -erfinv(-x);
  const double tail = 1.0 - x;  // exact for x >= 0.5
  double y = erfinv_guess(x);
  const double scale = 2.0 / std::sqrt(std::numbers::pi);
  double residual = 0.0;
  for (int it = 0; it < 30; ++it) {
    // erf(y) - x, computed through erfc in the upper half for accuracy.
    residual = x >= 0.5 ? tail - std::erfc(y) : std::erf(y) - x;
    const double dy = residual / (scale * std::exp(-y * y));
    y -= dy;
    if (std::abs(dy) <= 1e-16 * std::abs(y)) break;
  }
  residual = x >= 0.5 ? tail - std::erfc(y) : std::erf(y) - x;
  if (!(std::abs(residual) < 1e-13)) throw NumericalFailure("erfinv: Newton refinement did not converge");
  return y;
}

double gaussian_from_uniform(double x, double mu, double sigma) {
  return mu + std::numbers::sqrt2 * sigma * erfinv(x);
}

double normal_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

std::vector<double> z_legendre_coeffs(int p, double mu, double sigma, int nodes) {
  if (p < 0) throw std::invalid_argument("z_legendre_coeffs: p must be >= 0");
  if (nodes < 64) throw std::invalid_argument("z_legendre_coeffs: need at least 64 nodes");
  const auto rule = gauss_legendre(nodes);
  std::vector<double> k(static_cast<std::size_t>(p) + 1, 0.0);
  std::vector<double> phi(k.size());
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const double z = gaussian_from_uniform(rule.nodes[n], mu, sigma);
    orthonormal_legendre_all(p, rule.nodes[n], phi);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] += rule.weights[n] * z * phi[i];
  }
  return k;
}

// ---- linear ODE ------------------------------------------------------------

double ode_limit_state(double x, const LinearOdeParams& p) {
  const double z = gaussian_from_uniform(x, p.mu, p.sigma);
  return p.u0 * std::exp(-z * p.T) - p.u_d;
}

double ode_failure_probability(const LinearOdeParams& p) {
  // u0 exp(-Z T) < u_d  <=>  Z > ln(u0/u_d) / T.
  return normal_tail((std::log(p.u0 / p.u_d) / p.T - p.mu) / p.sigma);
}

PolynomialOdeSystem linear_ode_system(const LinearOdeParams& p) {
  PolynomialOdeSystem sys;
  sys.dim = 1;
  sys.num_vars = 1;
  sys.equations = {{PolynomialTerm{-1.0, 0, {0}}}};
  if (p.z_order > 0) {
    const auto k = z_legendre_coeffs(p.z_order, p.mu, p.sigma);
    const int order = p.z_order;
    sys.fields.push_back([k, order](std::span<const double> x) {
      double acc = 0.0;
      for (int i = 0; i <= order; ++i) acc += k[static_cast<std::size_t>(i)] * orthonormal_legendre(i, x[0]);
      return acc;
    });
  } else {
    const double mu = p.mu;
    const double sigma = p.sigma;
    sys.fields.push_back([mu, sigma](std::span<const double> x) { return gaussian_from_uniform(x[0], mu, sigma); });
  }
  const double u0 = p.u0;
  sys.initial.push_back([u0](std::span<const double>) { return u0; });
  return sys;
}

// ---- Kraichnan-Orszag ---------------------------------------------------------

void ko_rhs(const std::array<double, 3>& y, std::array<double, 3>& dy) {
  dy[0] = y[0] * y[2];
  dy[1] = -y[1] * y[2];
  dy[2] = -y[0] * y[0] + y[1] * y[1];
}

std::array<double, 3> ko_final_state(double xi, const KoParams& p) {
  if (!(p.dt > 0.0) || !(p.T > 0.0)) throw std::invalid_argument("ko_final_state: need dt > 0 and T > 0");
  const auto steps = static_cast<long>(std::ceil(p.T / p.dt - 1e-9));
  const double h = p.T / static_cast<double>(steps);
  std::array<double, 3> y{1.0, p.amplitude * xi, 0.0};
  std::array<double, 3> k1, k2, k3, k4, t;
  for (long n = 0; n < steps; ++n) {
    ko_rhs(y, k1);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    ko_rhs(t, k2);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    ko_rhs(t, k3);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * k3[i];
    ko_rhs(t, k4);
    for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2])) {
      const double time = static_cast<double>(n + 1) * h;
      std::ostringstream os;
      os << "ko: non-finite state at t = " << time << " for xi = " << xi;
      throw IntegrationFailure(os.str(), time);
    }
  }
  return y;
}

double ko_limit_state(double xi, const KoParams& p) { return ko_final_state(xi, p)[0] - p.u_d; }

PolynomialOdeSystem ko_system(const KoParams& p) {
  PolynomialOdeSystem sys;
  sys.dim = 1;
  sys.num_vars = 3;
  sys.equations = {
      {PolynomialTerm{1.0, -1, {0, 2}}},
      {PolynomialTerm{-1.0, -1, {1, 2}}},
      {PolynomialTerm{-1.0, -1, {0, 0}}, PolynomialTerm{1.0, -1, {1, 1}}},
  };
  const double amp = p.amplitude;
  sys.initial = {
      [](std::span<const double>) { return 1.0; },
      [amp](std::span<const double> x) { return amp * x[0]; },
      [](std::span<const double>) { return 0.0; },
  };
  return sys;
}

// ---- Burgers transition layer ---------------------------------------------------

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

struct Bracketed {
  double x;
  int iterations;
};

// Newton with bisection fallback for an increasing f on [lo, hi] with
// f(lo) < 0 < f(hi). fdf(x) returns {f, f'}.
template <class F>
Bracketed safeguarded_newton(F&& fdf, double lo, double hi, double x, double ftol, int max_it, bool& ok) {
  ok = false;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 1; it <= max_it; ++it) {
    const auto [f, df] = fdf(x);
    if (std::abs(f) <= ftol) {
      ok = true;
      return {x, it};
    }
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    double next = df > 0.0 ? x - f / df : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      ok = true;
      return {next, it};
    }
    x = next;
  }
  return {x, max_it};
}

constexpr int kLayerMaxIterations = 100;

// A(z) solving A tanh(A (1-z)/(2 nu)) = 1, and dA/dz.
std::pair<double, double> layer_amplitude(double z, double nu, double a_guess) {
  const double c = (1.0 - z) / (2.0 * nu);
  auto fdf = [c](double a) {
    const double t = std::tanh(c * a);
    return std::pair{a * t - 1.0, t + c * a * sech2(c * a)};
  };
  bool ok = false;
  const auto r = safeguarded_newton(fdf, 1.0 - 1e-15, std::max(2.0, 2.0 / c), a_guess, 1e-15, kLayerMaxIterations, ok);
  if (!ok) throw RootFailure("burgers: amplitude iteration did not converge", r.x, z);
  const double a = r.x;
  const double t = std::tanh(c * a);
  const double phi_a = t + c * a * sech2(c * a);
  const double dadz = a * a * sech2(c * a) / (2.0 * nu * phi_a);
  return {a, dadz};
}

}  // namespace

TransitionLayer burgers_transition(double delta, double nu) {
  if (!(delta >= 0.0)) throw std::invalid_argument("burgers_transition: delta must be >= 0");
  if (!(nu > 0.0)) throw std::invalid_argument("burgers_transition: nu must be > 0");
  // Eliminating A through the second equation leaves a scalar equation
  // h(z) = 0 that is increasing in z, with h(-1) = -(1+delta) < 0.
  double a_last = 1.0;
  if (delta == 0.0) {
    // The equations are symmetric under z -> -z, so z = 0 exactly.
    TransitionLayer out;
    out.amplitude = layer_amplitude(0.0, nu, 1.0).first;
    out.residual = std::abs(out.amplitude * std::tanh(out.amplitude / (2.0 * nu)) - 1.0);
    out.iterations = 0;
    return out;
  }
  auto h = [&](double z) {
    const auto [a, dadz] = layer_amplitude(z, nu, a_last);
    a_last = a;
    const double d = (1.0 + z) / (2.0 * nu);
    const double t = std::tanh(d * a);
    const double s = sech2(d * a);
    const double value = a * t - (1.0 + delta);
    const double slope = dadz * (t + d * a * s) + a * a * s / (2.0 * nu);
    return std::pair{value, slope};
  };
  double lo = -1.0;
  double hi = 0.0;
  if (h(0.0).first < 0.0) {
    lo = 0.0;
    hi = 0.5;
    int expand = 0;
    while (h(hi).first <= 0.0) {
      lo = hi;
      hi = 0.5 * (1.0 + hi);
      if (++expand > 60) throw RootFailure("burgers: no sign change below z = 1", a_last, hi);
    }
  }
  bool ok = false;
  const auto r = safeguarded_newton(h, lo, hi, 0.0, 1e-15, kLayerMaxIterations, ok);
  if (!ok) throw RootFailure("burgers: position iteration did not converge", a_last, r.x);

  TransitionLayer out;
  out.z = r.x;
  out.amplitude = layer_amplitude(out.z, nu, a_last).first;
  out.iterations = r.iterations;
  const double f1 = out.amplitude * std::tanh(out.amplitude * (1.0 + out.z) / (2.0 * nu)) - (1.0 + delta);
  const double f2 = out.amplitude * std::tanh(out.amplitude * (1.0 - out.z) / (2.0 * nu)) - 1.0;
  out.residual = std::max(std::abs(f1), std::abs(f2));
  if (!(out.residual < 1e-12)) throw RootFailure("burgers: residual above 1e-12", out.amplitude, out.z);
  return out;
}

double burgers_transition_z(double delta, double nu) { return burgers_transition(delta, nu).z; }

double burgers_limit_state(double x, const BurgersParams& p) {
  const double delta = p.e * (x + 1.0) / 2.0;
  return p.orientation * (p.z0 - burgers_transition_z(delta, p.nu));
}

// ---- registry -----------------------------------------------------------------

namespace {

class PointModel final : public LimitStateModel {
 public:
  explicit PointModel(std::function<double(double)> g) : LimitStateModel(1), g_(std::move(g)) {}

 protected:
  double value(std::span<const double> z) const override { return g_(z[0]); }

 private:
  std::function<double(double)> g_;
};

struct ParamRule {
  double fallback;
  double lower;  // admissible open/closed interval, see `strict`
  double upper;
  bool strict;   // lower bound excluded
};

ProblemParams resolve(std::string_view problem, const std::map<std::string, ParamRule, std::less<>>& rules,
                      const ProblemParams& overrides, bool& defaults) {
  ProblemParams out;
  for (const auto& [k, r] : rules) out[k] = r.fallback;
  defaults = true;
  for (const auto& [k, v] : overrides) {
    const auto it = rules.find(k);
    if (it == rules.end())
      throw std::invalid_argument(std::string(problem) + ": unknown parameter '" + k + "'");
    const auto& r = it->second;
    const bool ok = std::isfinite(v) && (r.strict ? v > r.lower : v >= r.lower) && v <= r.upper;
    if (!ok) {
      std::ostringstream os;
      os << problem << ": parameter '" << k << "' = " << v << " out of range";
      throw std::invalid_argument(os.str());
    }
    if (v != r.fallback) defaults = false;
    out[k] = v;
  }
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<std::string> problem_names() { return {"step", "linear-ode", "ko3", "burgers"}; }

ProblemSpec make_problem(std::string_view name, const ProblemParams& overrides) {
  ProblemSpec spec;
  spec.name = std::string(name);
  bool defaults = true;
  if (name == "step") {
    spec.parameters = resolve(name, {}, overrides, defaults);
    spec.references.push_back({0.5, "derived", "measure of [-1,0) under U(-1,1)"});
    spec.make_model = [] { return std::make_unique<PointModel>(step_g); };
  } else if (name == "linear-ode") {
    spec.parameters = resolve(name,
                              {{"u0", {1.0, 0.0, kInf, true}},
                               {"T", {1.0, 0.0, kInf, true}},
                               {"u_d", {0.5, 0.0, kInf, true}},
                               {"mu", {-2.0, -kInf, kInf, false}},
                               {"sigma", {1.0, 0.0, kInf, true}},
                               {"z_order", {0.0, 0.0, 64.0, false}},
                               {"dt", {0.01, 0.0, kInf, true}}},
                              overrides, defaults);
    const auto& q = spec.parameters;
    LinearOdeParams p{q.at("u0"), q.at("T"), q.at("u_d"), q.at("mu"), q.at("sigma"),
                      static_cast<int>(q.at("z_order"))};
    if (defaults) spec.references.push_back({0.003541, "published", "published Monte Carlo reference"});
    spec.references.push_back({ode_failure_probability(p), "derived", "normal tail 1 - Phi((ln(u0/u_d)/T - mu)/sigma)"});
    spec.make_model = [p] { return std::make_unique<PointModel>([p](double x) { return ode_limit_state(x, p); }); };
    spec.galerkin = GalerkinSetup{linear_ode_system(p), p.T, 0, -p.u_d, q.at("dt")};
  } else if (name == "ko3") {
    spec.parameters = resolve(name,
                              {{"T", {15.0, 0.0, kInf, true}},
                               {"u_d", {0.03, -kInf, kInf, false}},
                               {"dt", {0.01, 0.0, kInf, true}},
                               {"amplitude", {0.1, -kInf, kInf, false}}},
                              overrides, defaults);
    const auto& q = spec.parameters;
    KoParams p{q.at("T"), q.at("u_d"), q.at("dt"), q.at("amplitude")};
    if (p.dt > p.T) throw std::invalid_argument("ko3: parameter 'dt' exceeds 'T'");
    if (defaults) spec.references.push_back({0.102651, "published", "published Monte Carlo reference"});
    spec.make_model = [p] { return std::make_unique<PointModel>([p](double x) { return ko_limit_state(x, p); }); };
    spec.galerkin = GalerkinSetup{ko_system(p), p.T, 0, -p.u_d, p.dt};
  } else if (name == "burgers") {
    spec.parameters = resolve(name,
                              {{"nu", {0.05, 0.0, kInf, true}},
                               {"e", {0.1, 0.0, kInf, false}},
                               {"z0", {0.75, -1.0, 1.0, false}},
                               {"orientation", {1.0, -1.0, 1.0, false}}},
                              overrides, defaults);
    const auto& q = spec.parameters;
    BurgersParams p{q.at("nu"), q.at("e"), q.at("z0"), q.at("orientation")};
    if (p.orientation != 1.0 && p.orientation != -1.0)
      throw std::invalid_argument("burgers: parameter 'orientation' must be 1 or -1");
    const bool published = q.at("nu") == 0.05 && q.at("e") == 0.1 && q.at("z0") == 0.75;
    if (published && p.orientation < 0.0)
      spec.references.push_back({0.127478, "published", "published Monte Carlo reference, P(z < z0)"});
    else if (published)
      spec.references.push_back({1.0 - 0.127478, "derived",
                                 "complement of the published P(z < z0) = 0.127478 at the same parameters"});
    spec.make_model = [p] {
      return std::make_unique<PointModel>([p](double x) { return burgers_limit_state(x, p); });
    };
  } else {
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
  }
  return spec;
}

}  // namespace mehybrid
