#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <mehybrid/errors.hpp>
#include <mehybrid/problems.hpp>

#include "../support/gen.hpp"

using namespace mehybrid;
using mehybrid::testing::for_all;
using mehybrid::testing::Gen;

namespace {

// Legendre coefficients of step_g on [-1,1] by exact quadrature on each half.
double step_coeff_oracle(int k) {
  const auto r = gauss_legendre(k + 2);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double left = 0.5 * (r.nodes[i] - 1.0);  // node mapped to [-1,0]
    s += 0.5 * r.weights[i] * (-1.0) * orthonormal_legendre(k, left);
  }
  return s;
}

double burgers_residual(double delta, double nu, double a, double z) {
  const double r1 = a * std::tanh(a * (1.0 + z) / (2.0 * nu)) - (1.0 + delta);
  const double r2 = a * std::tanh(a * (1.0 - z) / (2.0 * nu)) - 1.0;
  return std::max(std::abs(r1), std::abs(r2));
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("step function") {
  CHECK(step_g(-0.5) == -1.0);
  CHECK(step_g(0.0) == -0.5);
  CHECK(step_g(0.3) == 0.0);
  CHECK(step_g(-1.0) == -1.0);
  CHECK(step_g(1.0) == 0.0);
}

TEST_CASE("closed-form global step surrogate") {
  const auto p0 = step_global_gpc(0);
  CHECK(p0.order() == 1);
  CHECK(p0.coeffs()[0] == -0.5);
  CHECK(p0.coeffs()[1] * std::sqrt(3.0) == doctest::Approx(0.75).epsilon(1e-15));

  for (int p : {0, 1, 2, 7, 12}) {
    const auto e = step_global_gpc(p);
    REQUIRE(e.order() == 2 * p + 1);
    for (int k = 0; k <= 2 * p + 1; ++k) {
      INFO("p=" << p << " k=" << k);
      CHECK(std::abs(e.coeffs()[k] - step_coeff_oracle(k)) < 1e-14);
    }
  }
  CHECK_THROWS_AS(step_global_gpc(-1), std::invalid_argument);
}

TEST_CASE("two-element step surrogate is exact") {
  const auto s = step_two_element_surrogate();
  REQUIRE(s.size() == 2);
  for_all(61, 200, [&](Gen& g, int) {
    const std::vector<double> z{g.uniform(-1, 1)};
    if (z[0] != 0.0) CHECK(s.evaluate(z) == step_g(z[0]));
  });
}

TEST_CASE("erfinv against an independent implementation") {
  for_all(62, 2000, [](Gen& g, int c) {
    // cover the bulk and both tails down to 1e-12 from the endpoints
    double x = c % 3 == 0 ? g.uniform(-1, 1) : (1.0 - std::pow(10.0, -g.uniform(0.0, 12.0))) * (g.coin() ? 1 : -1);
    const double y = erfinv(x), ref = boost::math::erf_inv(x);
    CHECK(std::abs(y - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
  });
  CHECK(erfinv(0.0) == 0.0);
  CHECK(erfinv(-0.3) == -erfinv(0.3));
  CHECK_THROWS_AS(erfinv(1.0), std::domain_error);
  CHECK_THROWS_AS(erfinv(-1.0), std::domain_error);
  CHECK_THROWS_AS(erfinv(std::nan("")), std::domain_error);
}

TEST_CASE("gaussian transform") {
  CHECK(gaussian_from_uniform(0.0, -2.0, 1.0) == -2.0);
  CHECK(gaussian_from_uniform(std::erf(1.0 / std::numbers::sqrt2), 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_from_uniform(1.0, 0.0, 1.0), std::domain_error);

  const auto s = sample_uniform(1000000, 1, 2024);
  double mean = 0.0, sq = 0.0;
  for (double x : s.data) {
    const double z = gaussian_from_uniform(x, -2.0, 1.0);
    mean += z;
    sq += z * z;
  }
  mean /= s.size();
  sq /= s.size();
  CHECK(std::abs(mean + 2.0) < 0.003);
  CHECK(std::abs(sq - mean * mean - 1.0) < 0.005);
}

TEST_CASE("normal tail") {
  const boost::math::normal n;
  for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0, 2.6931471805599454, 5.0, 8.0})
    CHECK(normal_tail(t) == doctest::Approx(boost::math::cdf(boost::math::complement(n, t))).epsilon(1e-13));
}

TEST_CASE("legendre coefficients of the gaussian transform") {
  const auto k = z_legendre_coeffs(9, -2.0, 1.0);
  CHECK(k[0] == doctest::Approx(-2.0).epsilon(1e-13));
  const auto c = z_legendre_coeffs(9, 0.0, 1.0);
  for (int i = 0; i <= 9; i += 2) CHECK(std::abs(c[i]) < 1e-14);
  // Parseval: sum k_i^2 approaches E[Z^2] = 1 from below as p grows
  double prev = 1e300;
  for (int p = 1; p <= 15; p += 2) {
    const auto kk = z_legendre_coeffs(p, 0.0, 1.0);
    double captured = 0.0;
    for (double v : kk) captured += v * v;
    const double err = 1.0 - captured;  // squared L2 reconstruction error
    CHECK(err >= -1e-12);
    CHECK(err < prev);
    prev = err;
  }
  CHECK_THROWS_AS(z_legendre_coeffs(3, 0.0, 1.0, 32), std::invalid_argument);
}

TEST_CASE("linear ODE limit state") {
  CHECK(ode_limit_state(0.0) == doctest::Approx(std::exp(2.0) - 0.5).epsilon(1e-14));
  const boost::math::normal n;
  const double oracle = boost::math::cdf(boost::math::complement(n, std::log(2.0) + 2.0));
  CHECK(ode_failure_probability() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(ode_failure_probability() - 3.54e-3) < 1e-5);
  // failure iff Z > ln 2
  for_all(63, 200, [](Gen& g, int) {
    const double x = g.uniform(-0.999, 0.999);
    const double z = gaussian_from_uniform(x, -2.0, 1.0);
    CHECK((ode_limit_state(x) < 0.0) == (z > std::log(2.0)));
  });
  CHECK_THROWS_AS(ode_limit_state(1.0), std::domain_error);
}

TEST_CASE("linear ODE galerkin system matches the exact solution pointwise") {
  const auto sys = linear_ode_system();
  sys.validate();
  const std::vector<double> x{0.3}, u{2.0}, f{gaussian_from_uniform(0.3, -2.0, 1.0)};
  std::vector<double> du(1);
  sys.pointwise_rhs(u, f, du);
  CHECK(du[0] == doctest::Approx(-f[0] * 2.0).epsilon(1e-15));
  CHECK(sys.fields[0](x) == f[0]);
  LinearOdeParams p;
  p.z_order = 7;
  const auto approx = linear_ode_system(p);
  CHECK(std::abs(approx.fields[0](x) - f[0]) < 0.05);
}

TEST_CASE("KO invariants") {
  for_all(64, 50, [](Gen& g, int) {
    const double xi = g.uniform(-1, 1);
    const auto y = ko_final_state(xi);
    const auto m = ko_final_state(-xi);
    CHECK(std::abs(y[0] * y[1] - 0.1 * xi) < 1e-8);
    CHECK(std::abs(y[0] - m[0]) < 1e-10);
    CHECK(std::abs(y[1] + m[1]) < 1e-10);
    CHECK(ko_limit_state(xi) == doctest::Approx(y[0] - 0.03).epsilon(1e-15));
  });
  // the invariant holds along the whole trajectory, not just at T
  for (double T : {1.0, 4.0, 9.5, 15.0}) {
    KoParams p;
    p.T = T;
    const auto y = ko_final_state(0.7, p);
    CHECK(std::abs(y[0] * y[1] - 0.07) < 1e-8);
  }
  std::array<double, 3> d{};
  ko_rhs({1.0, 0.5, 0.25}, d);
  CHECK(d[0] == 0.25);
  CHECK(d[1] == -0.125);
  CHECK(d[2] == -0.75);
  KoParams bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(ko_final_state(0.1, bad), std::invalid_argument);
}

TEST_CASE("KO integration failure is reported") {
  KoParams p;
  p.amplitude = 1e6;
  p.dt = 0.5;
  CHECK_THROWS_AS(ko_final_state(1.0, p), IntegrationFailure);
}

TEST_CASE("burgers transition layer") {
  const auto t0 = burgers_transition(0.0, 0.05);
  CHECK(t0.z == 0.0);
  CHECK(burgers_transition_z(0.0, 0.05) == 0.0);

  for_all(65, 1000, [](Gen& g, int) {
    const double delta = g.uniform(0.0, 0.1), nu = g.uniform(0.02, 0.1);
    const auto t = burgers_transition(delta, nu);
    INFO("delta=" << delta << " nu=" << nu);
    CHECK(burgers_residual(delta, nu, t.amplitude, t.z) < 1e-12);
    CHECK(t.residual < 1e-12);
    CHECK(t.z > -1.0);
    CHECK(t.z < 1.0);
  });
  CHECK_THROWS_AS(burgers_transition(-0.1, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(burgers_transition(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("burgers layer is monotone at nu = 0.05") {
  double prev = burgers_transition_z(0.0, 0.05);
  for (int k = 1; k <= 1000; ++k) {
    const double z = burgers_transition_z(k * 1e-4, 0.05);
    CHECK(z > prev);
    prev = z;
  }
}

TEST_CASE("burgers layer is continuous at nu = 0.1") {
  double prev = burgers_transition_z(0.0, 0.1);
  double worst = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double z = burgers_transition_z(k * 1e-4, 0.1);
    worst = std::max(worst, std::abs(z - prev));
    prev = z;
  }
  CHECK(worst < 0.2);
}

TEST_CASE("burgers limit state") {
  CHECK(burgers_limit_state(-1.0) == 0.75);
  BurgersParams below;
  below.orientation = -1.0;
  CHECK(burgers_limit_state(-1.0, below) == -0.75);
  // the failure set is an upper interval of delta
  bool failed = false;
  for (int k = 0; k <= 400; ++k) {
    const double x = -1.0 + k * 0.005;
    const bool f = burgers_limit_state(x) < 0.0;
    if (failed) CHECK(f);
    failed = failed || f;
  }
  CHECK(failed);
}

TEST_CASE("problem registry") {
  CHECK(problem_names() == std::vector<std::string>{"step", "linear-ode", "ko3", "burgers"});
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name);
    CHECK(p.name == name);
    CHECK(p.dim == 1);
    REQUIRE(p.reference() != nullptr);
    CHECK(p.reference()->value > 0.0);
    CHECK(p.reference()->value < 1.0);
    auto m = p.make_model();
    const std::vector<double> z{0.25};
    CHECK(std::isfinite(m->evaluate(z)));
    CHECK(m->call_count() == 1);
  }
  CHECK(make_problem("ko3").reference()->value == 0.102651);
  CHECK(make_problem("ko3").reference()->provenance == "published");
  CHECK(make_problem("linear-ode").reference()->value == 0.003541);
  CHECK(make_problem("ko3", {{"T", 10.0}}).reference() == nullptr);
  const auto ode = make_problem("linear-ode", {{"u_d", 0.4}});
  REQUIRE(ode.reference() != nullptr);
  CHECK(ode.reference()->provenance == "derived");
  CHECK(make_problem("burgers", {{"orientation", -1.0}}).reference()->value == 0.127478);
  CHECK(make_problem("burgers").reference()->value == doctest::Approx(1.0 - 0.127478).epsilon(1e-15));
  CHECK(make_problem("burgers", {{"nu", 0.07}}).reference() == nullptr);

  CHECK(make_problem("linear-ode").galerkin.has_value());
  CHECK(make_problem("ko3").galerkin.has_value());
  CHECK_FALSE(make_problem("burgers").galerkin.has_value());

  CHECK_THROWS_AS(make_problem("nope"), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("ko3", {{"bogus", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("burgers", {{"nu", 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("burgers", {{"orientation", 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("ko3", {{"dt", 20.0}}), std::invalid_argument);
}

}  // TEST_SUITE
