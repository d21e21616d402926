#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include <mehybrid/errors.hpp>
#include <mehybrid/galerkin.hpp>
#include <mehybrid/ode.hpp>
#include <mehybrid/problems.hpp>
#include <mehybrid/refine.hpp>

#include "../support/gen.hpp"

using namespace mehybrid;
using mehybrid::testing::for_all;
using mehybrid::testing::Gen;

namespace {

// du1/dt = -u1 + 0.5 u2, du2/dt = -0.3 u2 with random initial data on [-1,1]^2.
PolynomialOdeSystem linear_pair() {
  PolynomialOdeSystem s;
  s.dim = 2;
  s.num_vars = 2;
  s.equations = {{{-1.0, -1, {0}}, {0.5, -1, {1}}}, {{-0.3, -1, {1}}}};
  s.initial = {[](std::span<const double> z) { return 1.0 + 0.4 * z[0] * z[1] + std::sin(2 * z[0]); },
               [](std::span<const double> z) { return std::exp(z[1]); }};
  return s;
}

RefinementConfig dyn_config(int N, int N0, double theta1) {
  RefinementConfig c;
  c.order = N;
  c.reduced_order = N0;
  c.theta1 = theta1;
  c.dt = 0.01;
  c.check_interval = 0.1;
  return c;
}

}  // namespace

TEST_SUITE("refine") {

TEST_CASE("config validation") {
  RefinementConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.theta1 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.theta2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.reduced_order = bad.order;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.max_elements = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("static indicator") {
  CHECK(static_indicator(GpcExpansion(unit_element(1), 2, {3.0, 0.0, 0.0})).eta == 0.0);
  const auto a = static_indicator(GpcExpansion(unit_element(1), 2, {0.0, 1.0, 1.0}));
  CHECK(a.eta == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(a.r.size() == 1);
  CHECK(a.r[0] == doctest::Approx(1.0).epsilon(1e-15));

  // only the mixed top-degree mode (1,1) is active
  std::vector<double> c(multi_index_count(2, 2), 0.0);
  c[1] = 1.0;
  c[4] = 2.0;
  const auto b = static_indicator(GpcExpansion(unit_element(2), 2, c));
  CHECK(b.eta == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(b.r[0] == 0.0);
  CHECK(b.r[1] == 0.0);
}

TEST_CASE("static indicator is scale invariant") {
  for_all(41, 100, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
    const int N = g.integer(1, 4);
    const auto c = g.vector(multi_index_count(d, N), -1, 1);
    double s = g.uniform(0.01, 100.0) * (g.coin() ? 1.0 : -1.0);
    auto scaled = c;
    for (auto& v : scaled) v *= s;
    const auto e = g.dyadic_box(d, 3);
    const auto a = static_indicator(GpcExpansion(e, N, c));
    const auto b = static_indicator(GpcExpansion(e, N, scaled));
    CHECK(a.eta == doctest::Approx(b.eta).epsilon(1e-12));
    for (std::size_t j = 0; j < d; ++j) CHECK(a.r[j] == doctest::Approx(b.r[j]).epsilon(1e-12));
  });
}

TEST_CASE("static split decision") {
  RefinementConfig c;
  c.alpha = 0.5;
  c.theta1 = 0.4;
  const std::vector<double> r1{1.0};
  CHECK_FALSE(static_should_split(0.0, r1, 1.0, c).split);
  const auto s = static_should_split(1.0, r1, 0.5, c);
  CHECK(s.split);
  CHECK(s.dims == std::vector<std::size_t>{0});
  CHECK_FALSE(static_should_split(1.0, r1, 0.39, c).split);

  c.theta2 = 0.1;
  const std::vector<double> r3{0.5, 0.04, 0.06};
  CHECK(static_should_split(1.0, r3, 1.0, c).dims == std::vector<std::size_t>{0, 2});
}

TEST_CASE("static refinement leaves polynomials alone") {
  for (int N = 2; N <= 5; ++N) {
    FunctionModel lin(1, [](std::span<const double> z) { return z[0]; });
    RefinementConfig c;
    c.theta1 = 1e-8;
    const auto r = adapt_static(lin, c, N, N + 2);
    CHECK(r.surrogate.size() == 1);
    CHECK(r.model_calls == static_cast<std::uint64_t>(N + 2));
  }
}

TEST_CASE("static refinement localizes a jump") {
  // a jump at a non-dyadic point cannot be captured by any finite number of bisections
  const double jump = 0.3;
  FunctionModel step(1, [&](std::span<const double> z) { return z[0] < jump ? -1.0 : 0.0; });
  RefinementConfig c;
  c.theta1 = 1e-3;
  const auto r = adapt_static(step, c, 3, 5);
  const auto& dec = r.surrogate.decomposition();
  CHECK(dec.size() > 2);
  CHECK(dec.check().empty());
  CHECK(std::abs(dec.total_probability() - 1.0) < 1e-12);
  const Element* smallest = &dec[0];
  for (const auto& e : dec.elements())
    if (e.prob < smallest->prob) smallest = &e;
  CHECK(smallest->lower[0] <= jump);
  CHECK(smallest->upper[0] >= jump);
  CHECK(r.model_calls == step.call_count());
  CHECK(r.events.size() == dec.size() - 1);

  RefinementConfig capped = c;
  capped.max_elements = 3;
  const auto t = adapt_static(step, capped, 3, 5);
  CHECK(t.truncated);
  CHECK(t.surrogate.size() <= 3);

  FunctionModel centred(1, [](std::span<const double> z) { return step_g(z[0]); });
  CHECK(adapt_static(centred, c, 3, 5).surrogate.size() == 2);
}

TEST_CASE("static refinement on random 2-d models keeps a legal mesh") {
  for_all(42, 8, [](Gen& g, int) {
    const double a = g.uniform(-0.8, 0.8), b = g.uniform(2.0, 12.0);
    FunctionModel m(2, [=](std::span<const double> z) { return std::tanh(b * (z[0] + 0.5 * z[1] - a)); });
    RefinementConfig c;
    c.theta1 = g.uniform(1e-3, 1e-2);
    c.max_elements = 64;
    const auto r = adapt_static(m, c, 2, 4);
    CHECK(r.surrogate.decomposition().check().empty());
    CHECK(std::abs(r.surrogate.decomposition().total_probability() - 1.0) < 1e-12);
  });
}

TEST_CASE("galerkin right-hand side examples") {
  PolynomialOdeSystem decay;
  decay.num_vars = 1;
  decay.equations = {{{-1.0, -1, {0}}}};
  decay.initial = {[](std::span<const double>) { return 1.0; }};
  const TripleProductTensor tp(1, 3);
  GalerkinState s{0.0, 4, {0.3, -1.2, 0.5, 2.0}};
  const auto r = galerkin_rhs(decay, FieldModes{4, {}}, s, tp);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(-s.modes[i]).epsilon(1e-15));

  PolynomialOdeSystem sq;
  sq.num_vars = 1;
  sq.equations = {{{1.0, -1, {0, 0}}}};
  sq.initial = {[](std::span<const double>) { return 1.0; }};
  const TripleProductTensor tp1(1, 1);
  const auto q = galerkin_rhs(sq, FieldModes{2, {}}, GalerkinState{0.0, 2, {1.0, 0.0}}, tp1);
  CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(q[1]) < 1e-15);

  PolynomialOdeSystem cubic = sq;
  cubic.fields = {[](std::span<const double> z) { return z[0]; }};
  cubic.equations = {{{1.0, 0, {0, 0}}}};
  CHECK_THROWS_AS(cubic.validate(), UnsupportedModel);
}

TEST_CASE("galerkin of a product equals projection of the product") {
  // For u = sum a_i phi_i, v = sum b_i phi_i of degree <= N/2 the order-N
  // Galerkin product is the exact projection of u v.
  for_all(43, 20, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 2));
    const int N = 4;
    const std::size_t P = multi_index_count(d, N), half = multi_index_count(d, N / 2);
    auto a = g.vector(P, -1, 1), b = g.vector(P, -1, 1);
    std::fill(a.begin() + half, a.end(), 0.0);
    std::fill(b.begin() + half, b.end(), 0.0);
    PolynomialOdeSystem s;
    s.dim = d;
    s.num_vars = 2;
    s.equations = {{{1.0, -1, {0, 1}}}, {}};
    s.initial = {[](std::span<const double>) { return 0.0; }, [](std::span<const double>) { return 0.0; }};
    std::vector<double> modes(a);
    modes.insert(modes.end(), b.begin(), b.end());
    const TripleProductTensor tp(d, N);
    const auto r = galerkin_rhs(s, FieldModes{P, {}}, GalerkinState{0.0, P, modes}, tp);
    const Element e = unit_element(d);
    const GpcExpansion ua(e, N, a), ub(e, N, b);
    const auto proj = project([&](std::span<const double> z) { return ua.evaluate_local(z) * ub.evaluate_local(z); },
                              e, N, N + 2);
    for (std::size_t i = 0; i < P; ++i) CHECK(r[i] == doctest::Approx(proj.coeffs()[i]).epsilon(1e-12));
  });
}

TEST_CASE("dynamic indicator vanishes for linear systems") {
  const auto sys = linear_pair();
  for_all(44, 30, [&](Gen& g, int) {
    const int N = g.integer(2, 5), N0 = g.integer(0, N - 1);
    const std::size_t P = multi_index_count(2, N);
    const TripleProductTensor tp(2, N);
    GalerkinState st{0.0, P, g.vector(2 * P, -2, 2)};
    std::vector<double> full(2 * P), red(2 * P);
    galerkin_rhs(sys, FieldModes{P, {}}, st.modes, P, tp, P, full);
    galerkin_rhs(sys, FieldModes{P, {}}, st.modes, P, tp, multi_index_count(2, N0), red);
    const auto ind = dynamic_indicator(full, red, st, multi_index_set(2, N), 2, N0);
    CHECK(ind.q < 1e-10);
    for (double s : ind.s) CHECK(s < 1e-10);
  });

  GalerkinState zero{0.0, 3, std::vector<double>(3, 0.0)};
  const std::vector<double> r(3, 0.0);
  const auto z = dynamic_indicator(r, r, zero, multi_index_set(1, 2), 1, 1);
  CHECK(z.q == 0.0);
  CHECK(z.s[0] == 0.0);
}

TEST_CASE("linear closure: a linear system never splits") {
  const auto r = adapt_dynamic(linear_pair(), dyn_config(4, 2, 1e-12), 2.0);
  CHECK(r.decomposition.size() == 1);
  CHECK(r.events.empty());
  CHECK_FALSE(r.truncated);
}

TEST_CASE("dynamic indicator is positive for the KO system") {
  const auto sys = ko_system();
  const int N = 5, N0 = 3;
  const std::size_t P = multi_index_count(1, N);
  const TripleProductTensor tp(1, N);
  const auto e = unit_element(1);
  auto st = project_initial_state(sys, e, N, 2 * (N + 1));
  const auto fields = project_fields(sys, e, N, 2 * (N + 1));
  Rk4Stepper rk;
  std::vector<double> full(3 * P), red(3 * P);
  double best = 0.0;
  for (int step = 1; step <= 1500; ++step) {
    rk.step([&](const std::vector<double>& y, std::vector<double>& dy) { galerkin_rhs(sys, fields, y, P, tp, P, dy); },
            st.modes, 0.01);
    if (step % 10) continue;
    galerkin_rhs(sys, fields, st.modes, P, tp, P, full);
    galerkin_rhs(sys, fields, st.modes, P, tp, multi_index_count(1, N0), red);
    best = std::max(best, dynamic_indicator(full, red, st, multi_index_set(1, N), 3, N0).q);
  }
  CHECK(best > 0.0);
}

TEST_CASE("deterministic KO data follows the deterministic trajectory") {
  auto sys = ko_system();
  sys.initial[1] = [](std::span<const double>) { return 0.05; };
  const auto r = adapt_dynamic(sys, dyn_config(3, 1, 1e-12), 3.0);
  REQUIRE(r.decomposition.size() == 1);
  std::vector<double> y{1.0, 0.05, 0.0};
  Rk4Stepper rk;
  for (int s = 0; s < 300; ++s)
    rk.step(
        [](const std::vector<double>& u, std::vector<double>& du) {
          std::array<double, 3> a{u[0], u[1], u[2]}, da{};
          ko_rhs(a, da);
          du.assign(da.begin(), da.end());
        },
        y, 0.01);
  const auto& st = r.states[0];
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(st.var(v)[0] == doctest::Approx(y[v]).epsilon(1e-12));
    for (std::size_t i = 1; i < st.basis_size; ++i) CHECK(std::abs(st.var(v)[i]) < 1e-12);
  }
}

TEST_CASE("projection restart reproduces the parent") {
  for_all(45, 40, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 2));
    const int N = g.integer(1, 6);
    const Element parent = g.dyadic_box(d, 3);
    const GpcExpansion exp(parent, N, g.vector(multi_index_count(d, N), -1, 1));
    const auto children = split_element(parent, g.dims(d));
    const auto parts = restrict_expansion(exp, children, N + 1);
    REQUIRE(parts.size() == children.size());
    for (int t = 0; t < 100; ++t) {
      const auto z = g.point_in(parent);
      std::size_t k = 0;
      while (!children[k].contains(z)) ++k;
      CHECK(std::abs(parts[k].evaluate(z) - exp.evaluate(z)) < 1e-9);
    }
  });
}

TEST_CASE("RK4 converges at fourth order") {
  auto error = [](double dt) {
    std::vector<double> y{1.0};
    Rk4Stepper rk;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i)
      rk.step([](const std::vector<double>& u, std::vector<double>& du) { du[0] = -u[0]; }, y, dt);
    return std::abs(y[0] - std::exp(-1.0));
  };
  for (double dt : {0.2, 0.1, 0.05}) {
    const double ratio = error(dt) / error(dt / 2);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("dynamic refinement of the linear ODE") {
  const auto p = make_problem("linear-ode");
  const auto& g = *p.galerkin;
  auto c = dyn_config(3, 1, 1.0);
  c.dt = g.dt;
  const auto r = adapt_dynamic(g.system, c, g.final_time);
  CHECK(r.decomposition.size() >= 3);
  CHECK(r.decomposition.size() <= 8);
  CHECK(r.decomposition.check().empty());
  for (const auto& s : r.states) CHECK(s.time == doctest::Approx(g.final_time).epsilon(1e-12));

  c.restart = RestartPolicy::resolve;
  const auto q = adapt_dynamic(g.system, c, g.final_time);
  CHECK(q.decomposition.check().empty());

  c.max_elements = 2;
  const auto t = adapt_dynamic(g.system, c, g.final_time);
  CHECK(t.truncated);
  CHECK(t.decomposition.size() <= 2);
}

TEST_CASE("dynamic refinement of KO at p=5") {
  const auto p = make_problem("ko3");
  const auto& g = *p.galerkin;
  auto c = dyn_config(5, 2, 1e-4);
  c.dt = g.dt;
  const auto r = adapt_dynamic(g.system, c, g.final_time);
  CHECK(r.decomposition.size() >= 12);
  CHECK(r.decomposition.size() <= 30);
  CHECK(r.decomposition.check().empty());
  CHECK(std::abs(r.decomposition.total_probability() - 1.0) < 1e-12);
  CHECK(r.events.size() == r.decomposition.size() - 1);
  const auto csv = events_csv(r.events);
  CHECK(csv.rfind("time,element,indicator,dims\n", 0) == 0);
}

}  // TEST_SUITE
