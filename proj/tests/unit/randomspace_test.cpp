#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <mehybrid/randomspace.hpp>
#include <mehybrid/rng.hpp>

#include "../support/gen.hpp"

using namespace mehybrid;
using mehybrid::testing::for_all;
using mehybrid::testing::Gen;

TEST_SUITE("randomspace") {

TEST_CASE("element probability") {
  CHECK(element_probability(make_element({-1.0}, {1.0})) == 1.0);
  CHECK(element_probability(make_element({0.0}, {1.0})) == 0.5);
  CHECK(element_probability(make_element({-1.0, 0.0}, {0.0, 1.0})) == 0.25);
  CHECK(make_element({0.0}, {1.0}).prob == 0.5);
  CHECK_THROWS_AS(make_element({0.5}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(make_element({0.5}, {0.2}), std::invalid_argument);
  CHECK_THROWS_AS(make_element({-1.5}, {0.2}), std::invalid_argument);
}

TEST_CASE("affine maps") {
  const std::vector<double> half{0.5}, quarter{0.25}, eighth{0.125};
  CHECK(to_local(make_element({0.0}, {1.0}), half)[0] == 0.0);
  CHECK(to_local(unit_element(1), quarter)[0] == 0.25);
  CHECK(to_local(make_element({0.0}, {0.5}), eighth)[0] == doctest::Approx(-0.5).epsilon(1e-15));
  const std::vector<double> outside{0.75};
  CHECK_THROWS_AS(to_local(make_element({0.0}, {0.5}), outside), std::invalid_argument);
}

TEST_CASE("affine round trip") {
  for_all(21, 300, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 4));
    const Element e = g.dyadic_box(d, 8);
    const auto z = g.point_in(e);
    const auto back = to_global(e, to_local(e, z));
    for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(back[k] - z[k]) < 1e-14);
    const auto x = g.vector(d, -1, 1);
    const auto xx = to_local(e, to_global(e, x));
    // rounding in global coordinates is magnified by 1/halfwidth on the way back
    for (std::size_t k = 0; k < d; ++k) {
      const double halfwidth = 0.5 * (e.upper[k] - e.lower[k]);
      CHECK(std::abs(xx[k] - x[k]) < 8.0 * std::numeric_limits<double>::epsilon() / halfwidth);
    }
  });
}

TEST_CASE("split element") {
  const std::vector<std::size_t> d0{0}, both{0, 1};
  auto c = split_element(unit_element(1), d0);
  REQUIRE(c.size() == 2);
  CHECK(c[0].lower[0] == -1.0);
  CHECK(c[0].upper[0] == 0.0);
  CHECK(c[1].lower[0] == 0.0);
  CHECK(c[0].prob == 0.5);
  CHECK(c[1].prob == 0.5);

  c = split_element(unit_element(2), both);
  REQUIRE(c.size() == 4);
  for (const auto& e : c) CHECK(e.prob == 0.25);

  c = split_element(make_element({0.0}, {1.0}), d0);
  REQUIRE(c.size() == 2);
  CHECK(c[0].upper[0] == 0.5);
  CHECK(c[0].prob == 0.25);
  CHECK(c[1].prob == 0.25);

  CHECK_THROWS_AS(split_element(unit_element(2), std::vector<std::size_t>{}), std::invalid_argument);
  CHECK_THROWS_AS(split_element(unit_element(2), std::vector<std::size_t>{2}), std::invalid_argument);
}

TEST_CASE("locate with the half-open rule") {
  const std::vector<std::size_t> d0{0};
  const Decomposition dec(split_element(unit_element(1), d0));
  const std::vector<double> zero{0.0}, neg{-0.3}, one{1.0}, minus_one{-1.0}, beyond{1.0000001};
  CHECK(dec.locate(zero) == 1);
  CHECK(dec.locate(neg) == 0);
  CHECK(dec.locate(one) == 1);
  CHECK(dec.locate(minus_one) == 0);
  CHECK_THROWS_AS(dec.locate(beyond), std::domain_error);
  const std::vector<double> nan{std::nan("")};
  CHECK_THROWS_AS(dec.locate(nan), std::domain_error);
}

TEST_CASE("partition of unity under random splits") {
  for_all(22, 60, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
    const Decomposition dec = g.mesh(d, g.integer(0, 25));
    CHECK(std::abs(dec.total_probability() - 1.0) < 1e-12);
    CHECK(dec.check().empty());
    // every random point, including ones on element faces, lies in exactly one element
    for (int s = 0; s < 200; ++s) {
      std::vector<double> z = g.vector(d, -1, 1);
      if (s % 4 == 0) {
        const auto& e = dec[g.index(dec.size())];
        const std::size_t k = g.index(d);
        z[k] = g.coin() ? e.lower[k] : e.upper[k];
      }
      int hits = 0;
      for (const auto& e : dec.elements()) hits += e.contains(z) ? 1 : 0;
      CHECK(hits == 1);
      CHECK(dec[dec.locate(z)].contains(z));
    }
  });
}

TEST_CASE("split and locate agree") {
  for_all(23, 100, [](Gen& g, int) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
    const Element parent = g.dyadic_box(d, 4);
    const auto children = split_element(parent, g.dims(d));
    double total = 0.0;
    for (const auto& c : children) total += c.prob;
    CHECK(std::abs(total - parent.prob) < 1e-15);
    for (int s = 0; s < 20; ++s) {
      const auto z = g.point_in(parent);
      int owner = -1, hits = 0;
      for (std::size_t k = 0; k < children.size(); ++k)
        if (children[k].contains(z)) {
          owner = static_cast<int>(k);
          ++hits;
        }
      CHECK(hits == 1);
      // the child owning z has z within its closed bounds and below its open upper face
      const auto& c = children[owner];
      for (std::size_t k = 0; k < d; ++k) {
        CHECK(z[k] >= c.lower[k]);
        CHECK((z[k] < c.upper[k] || c.upper[k] == 1.0));
      }
    }
  });
}

TEST_CASE("check reports overlapping or missing elements") {
  Decomposition overlap({make_element({-1.0}, {0.5}), make_element({0.0}, {1.0})});
  CHECK_FALSE(overlap.check().empty());
  Decomposition hole({make_element({-1.0}, {0.0}), make_element({0.5}, {1.0})});
  CHECK_FALSE(hole.check().empty());
  CHECK(Decomposition::unit(3).check().empty());
}

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(0)(C{0, 0, 0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32(0xffffffffffffffffull)(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32(0x299f31d0a4093822ull)(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("symmetric conversion stays inside the open interval") {
  CHECK(Philox4x32::to_symmetric(0) > -1.0);
  CHECK(Philox4x32::to_symmetric(~0ull) < 1.0);
  CHECK(Philox4x32::to_symmetric(~0ull) == -Philox4x32::to_symmetric(0));
}

TEST_CASE("sampling determinism and prefix consistency") {
  const auto a = sample_uniform(3, 1, 42), b = sample_uniform(3, 1, 42);
  CHECK(a.data == b.data);
  CHECK(sample_uniform(3, 1, 43).data != a.data);

  const auto big = sample_uniform(kSampleChunk + 777, 2, 7);
  const auto small = sample_uniform(1000, 2, 7);
  CHECK(std::equal(small.data.begin(), small.data.end(), big.data.begin()));
  for (double v : big.data) {
    CHECK(v > -1.0);
    CHECK(v < 1.0);
  }
  CHECK(big.size() == kSampleChunk + 777);
  CHECK(big.seed == 7);
  CHECK_THROWS(sample_uniform(0, 1, 1));
}

TEST_CASE("sample moments") {
  const auto s = sample_uniform(1000000, 1, 2024);
  double mean = 0.0, sq = 0.0;
  for (double v : s.data) {
    mean += v;
    sq += v * v;
  }
  mean /= s.size();
  sq /= s.size();
  CHECK(std::abs(mean) < 0.004);
  CHECK(std::abs(sq - 1.0 / 3.0) < 0.003);

  // coordinates of a 2-d set are uncorrelated
  const auto t = sample_uniform(200000, 2, 99);
  double c = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) c += t.point(i)[0] * t.point(i)[1];
  CHECK(std::abs(c / t.size()) < 3.0 * (1.0 / 3.0) / std::sqrt(200000.0));
}

}  // TEST_SUITE
