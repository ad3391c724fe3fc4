#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bellrand/certify.hpp"

using namespace bellrand;
using namespace bellrand::certify;

TEST_SUITE("certify") {

TEST_CASE("min-entropy bound endpoints") {
  CHECK(min_entropy_bound_chsh(2.0) == 0.0);
  CHECK(min_entropy_bound_chsh(1.0) == 0.0);
  CHECK(min_entropy_bound_chsh(-3.0) == 0.0);
  CHECK(min_entropy_bound_chsh(kTsirelson) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_entropy_bound_chsh(2.5) == doctest::Approx(1.0 - std::log2(1.0 + std::sqrt(2.0 - 6.25 / 4))));
  CHECK(min_entropy_bound_chsh(3.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exceeds_tsirelson(3.0));
  CHECK_FALSE(exceeds_tsirelson(2.8));
  CHECK_THROWS_AS(min_entropy_bound_chsh(4.01), InvalidArgument);
  CHECK_THROWS_AS(min_entropy_bound_chsh(std::nan("")), InvalidArgument);
}

TEST_CASE("property: bound is monotone and convex on (2, 2 sqrt2]") {
  const int n = 10000;
  const double h = (kTsirelson - 2.0) / n;
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double s = 2.0 + i * h;
    const double f = min_entropy_bound_chsh(s);
    REQUIRE(f >= prev);
    REQUIRE(f >= 0.0);
    REQUIRE(f <= 1.0);
    prev = f;
    if (i > 1 && i < n) {
      const double second = min_entropy_bound_chsh(s - h) + min_entropy_bound_chsh(s + h) - 2 * f;
      REQUIRE(second >= -1e-12);
    }
  }
}

TEST_CASE("guessing probabilities") {
  const bell::Scenario s(2, 2, 2);
  const auto u = guessing_probability(bell::uniform_behavior(s), 0, 0);
  CHECK(u.max_probability == doctest::Approx(0.25));
  CHECK(u.min_entropy == doctest::Approx(2.0));

  const bell::LocalVertices vertices(s);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const auto v = vertices.vertex(k);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) REQUIRE(guessing_probability(v, x, y).max_probability == doctest::Approx(1.0));
  }

  const auto t = bell::tsirelson_behavior();
  const double c = (1.0 + 1.0 / std::sqrt(2.0)) / 4.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const auto g = guessing_probability(t, x, y);
      CHECK(g.max_probability == doctest::Approx(c).epsilon(1e-12));
      CHECK(g.min_entropy == doctest::Approx(-std::log2(c)).epsilon(1e-12));
      // The device-independent bound never exceeds the device-dependent value.
      CHECK(min_entropy_bound_chsh(kTsirelson) <= g.min_entropy);
    }
  CHECK_THROWS_AS(guessing_probability(t, 2, 0), InvalidArgument);
}

TEST_CASE("local vertices certify nothing") {
  const bell::LocalVertices vertices(bell::Scenario(2, 2, 2));
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const auto records = bell::simulate_rounds(vertices.vertex(k), bell::uniform_settings(vertices.scenario()),
                                               20000, 100 + k);
    const auto r = certify::certify(records, bell::chsh(), 0.99);
    REQUIRE(r.certified_bits == 0);
    REQUIRE(r.s_lo <= 2.0);
  }
}

TEST_CASE("exact Tsirelson behavior gives one bit per round") {
  const auto r = certify::certify(bell::tsirelson_behavior(), bell::chsh(), 0.99, 1000);
  CHECK(r.s_hat == doctest::Approx(kTsirelson).epsilon(1e-12));
  CHECK(r.deviation == 0.0);
  CHECK(r.bits_per_round == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.certified_bits >= 999);
  CHECK(r.certified_bits <= 1000);
}

TEST_CASE("honest device at 1e6 rounds certifies entropy") {
  const auto b = bell::tsirelson_behavior();
  const auto records = bell::simulate_rounds(b, bell::uniform_settings(b.scenario()), 1'000'000, 77);
  const auto r = certify::certify(records, bell::chsh(), 0.99);
  CHECK(r.s_lo > 2.0);
  CHECK(r.s_lo < r.s_hat);
  CHECK(r.deviation == doctest::Approx(8.0 * std::sqrt(std::log(100.0) / 2e6)).epsilon(1e-3));
  CHECK(r.certified_bits > 0);
  CHECK(r.certified_bits == static_cast<std::size_t>(std::floor(1e6 * r.bits_per_round)));
  CHECK(r.warnings.empty());
}

TEST_CASE("property: median S_lo increases with N") {
  const auto b = bell::tsirelson_behavior();
  double prev = -10.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<double> lows;
    for (std::uint64_t seed = 0; seed < 21; ++seed) {
      const auto records = bell::simulate_rounds(b, bell::uniform_settings(b.scenario()), n, 500 + seed);
      lows.push_back(certify::certify(records, bell::chsh(), 0.99).s_lo);
    }
    std::nth_element(lows.begin(), lows.begin() + 10, lows.end());
    CHECK(lows[10] > prev);
    prev = lows[10];
  }
}

TEST_CASE("PR box statistics are clamped with a warning") {
  const auto b = bell::pr_box();
  const auto records = bell::simulate_rounds(b, bell::uniform_settings(b.scenario()), 100000, 3);
  const auto r = certify::certify(records, bell::chsh(), 0.99);
  CHECK(r.s_hat == doctest::Approx(4.0));
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.bits_per_round == doctest::Approx(1.0).epsilon(1e-12));
  const auto doc = r.document();
  CHECK(doc.find("warning_0") != nullptr);
}

TEST_CASE("certification requires the CHSH scenario") {
  const bell::Scenario s(2, 3, 2);
  const bell::BellFunctional f(s, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.cells())));
  CHECK_THROWS_AS(certify::certify(bell::uniform_behavior(s), f, 0.99, 10), InvalidArgument);
}

}  // TEST_SUITE
