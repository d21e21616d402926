#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include <mehybrid/io.hpp>
#include <mehybrid/problems.hpp>

#include "../support/gen.hpp"

using namespace mehybrid;
using mehybrid::testing::for_all;
using mehybrid::testing::Gen;

namespace {

MultiElementSurrogate random_surrogate(Gen& g) {
  const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
  const auto dec = g.mesh(d, g.integer(0, 12));
  std::vector<GpcExpansion> exps;
  for (const auto& e : dec.elements()) {
    const int N = g.integer(0, 4);
    exps.emplace_back(e, N, g.vector(multi_index_count(d, N), -1e3, 1e3));
  }
  return MultiElementSurrogate(dec, exps);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mehybrid_io_test_" + name);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("surrogate json round trip is exact") {
  for_all(71, 40, [](Gen& g, int) {
    const auto s = random_surrogate(g);
    const json meta{{"problem", "step"}, {"order", 3}};
    // through text, so the double formatting is part of the round trip
    const auto back = surrogate_from_json(json::parse(surrogate_to_json(s, meta).dump()));
    CHECK(back.meta == meta);
    REQUIRE(back.surrogate.size() == s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& a = s.expansions()[k];
      const auto& b = back.surrogate.expansions()[k];
      CHECK(a.order() == b.order());
      CHECK(a.element().lower == b.element().lower);
      CHECK(a.element().upper == b.element().upper);
      CHECK(a.element().prob == b.element().prob);
      CHECK(std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin(), b.coeffs().end()));
    }
    for (int t = 0; t < 20; ++t) {
      const auto z = g.vector(s.dimension(), -1, 1);
      CHECK(back.surrogate.evaluate(z) == s.evaluate(z));
    }
  });
}

TEST_CASE("save and load through a file") {
  const auto path = temp_path("roundtrip/cache.json");
  std::filesystem::remove_all(path.parent_path());
  const auto s = step_two_element_surrogate();
  save_surrogate(path, s, json{{"kind", "two-element"}});
  const auto back = load_surrogate(path);
  CHECK(back.meta.at("kind") == "two-element");
  CHECK(back.surrogate.size() == 2);
  CHECK(back.surrogate.decomposition().check().empty());
  std::filesystem::remove_all(path.parent_path());
  CHECK_THROWS_AS(load_surrogate(path), std::runtime_error);
}

TEST_CASE("malformed caches are rejected") {
  const auto good = surrogate_to_json(step_two_element_surrogate());
  auto broken = [&](auto&& mutate) {
    json j = good;
    mutate(j);
    return j;
  };
  CHECK_NOTHROW(surrogate_from_json(good));
  CHECK_THROWS_AS(surrogate_from_json(json::array()), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["format"] = "other"; })), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["version"] = 99; })), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j.erase("elements"); })), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["elements"] = json::array(); })), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["dimension"] = 2; })), std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["elements"][0]["coeffs"].push_back(1.0); })),
                  std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["elements"][1].erase("upper"); })),
                  std::invalid_argument);
  CHECK_THROWS_AS(surrogate_from_json(broken([](json& j) { j["elements"][0]["lower"] = "x"; })),
                  std::invalid_argument);

  const auto path = temp_path("garbage.json");
  write_file(path, "{ not json");
  CHECK_THROWS_AS(load_surrogate(path), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("a corrupted mesh loads but fails the check") {
  json j = surrogate_to_json(step_two_element_surrogate());
  j["elements"][1]["lower"][0] = 0.25;  // leaves a hole [0, 0.25)
  const auto c = surrogate_from_json(j);
  CHECK_FALSE(c.surrogate.decomposition().check().empty());
}

TEST_CASE("decomposition and estimate serialisation") {
  const std::vector<std::size_t> d0{0};
  const Decomposition dec(split_element(unit_element(1), d0));
  const auto back = decomposition_from_json(decomposition_to_json(dec));
  REQUIRE(back.size() == 2);
  CHECK(back[1].lower[0] == 0.0);
  CHECK_THROWS_AS(decomposition_from_json(json::object()), std::invalid_argument);

  Estimate e;
  e.p_f = 0.25;
  e.failures = 1;
  e.m = 4;
  e.n_exact = 3;
  const auto j = estimate_to_json(e);
  CHECK(j.at("p_f") == 0.25);
  CHECK(j.at("n_exact") == 3);
}

TEST_CASE("file helpers") {
  const auto path = temp_path("nested/dir/file.txt");
  std::filesystem::remove_all(temp_path("nested"));
  write_file(path, "abc\n");
  CHECK(read_file(path) == "abc\n");
  std::filesystem::remove_all(temp_path("nested"));
  CHECK_THROWS_AS(read_file(path), std::runtime_error);
}

}  // TEST_SUITE
