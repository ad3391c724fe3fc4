#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bellrand/sources.hpp"

using namespace bellrand;
using namespace bellrand::sources;

namespace {

Distribution random_distribution(std::mt19937_64& rng, int bits) {
  std::gamma_distribution<double> g(0.5);
  Eigen::VectorXd p(Eigen::Index{1} << bits);
  for (auto& v : p) v = g(rng);
  p /= p.sum();
  return Distribution(bits, p);
}

double five_sigma(double p, double n) { return 5.0 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST_SUITE("sources") {

TEST_CASE("min-entropy examples") {
  CHECK(min_entropy(Distribution::uniform(3)) == doctest::Approx(3.0));
  CHECK(min_entropy(Distribution::point_mass(3, 5)) == 0.0);
  Eigen::VectorXd p(4);
  p << 0.75, 0.25, 0.0, 0.0;
  CHECK(min_entropy(Distribution(2, p)) == doctest::Approx(0.415037).epsilon(1e-6));
}

TEST_CASE("statistical distance examples") {
  const auto u = Distribution::uniform(1);
  CHECK(statistical_distance(u, u) == 0.0);
  CHECK(statistical_distance(Distribution::point_mass(1, 0), Distribution::point_mass(1, 1)) == 1.0);
  Eigen::VectorXd p(2);
  p << 0.6, 0.4;
  CHECK(statistical_distance(Distribution(1, p), u) == doctest::Approx(0.1));
  CHECK_THROWS_AS(statistical_distance(u, Distribution::uniform(2)), DimensionError);
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(Distribution(2, Eigen::VectorXd::Constant(4, 0.3)), InvalidArgument);
  CHECK_THROWS_AS(Distribution(2, Eigen::VectorXd::Constant(3, 1.0 / 3)), DimensionError);
  CHECK_THROWS_AS(Distribution::uniform(25), SizeError);
  CHECK_THROWS_AS(Distribution::point_mass(2, 4), InvalidArgument);
}

TEST_CASE("SV model rejects strategies outside the band") {
  CHECK_THROWS_AS(SvSourceModel(0.6, [](const Prefix&) { return 0.5; }), InvalidArgument);
  const auto bad = presets::constant_bias(0.1, 0.2);
  CHECK_THROWS_AS(bad.probability_one(Prefix{}), ModelViolation);
  CHECK_THROWS_AS(sample_sv(bad, 10, 1), ModelViolation);
}

TEST_CASE("sample_sv: epsilon = 0 gives unbiased bits") {
  const std::size_t n = 1'000'000;
  const auto bits = sample_sv(presets::constant_bias(0.0, 0.0), n, 31);
  double ones = 0;
  for (auto b : bits) ones += b;
  CHECK(std::abs(ones / n - 0.5) < five_sigma(0.5, n));
}

TEST_CASE("sample_sv: constant bias 0.1") {
  const std::size_t n = 1'000'000;
  const auto bits = sample_sv(presets::constant_bias(0.1, 0.1), n, 32);
  double ones = 0;
  for (auto b : bits) ones += b;
  CHECK(std::abs(ones / n - 0.6) < five_sigma(0.6, n));
}

TEST_CASE("sample_sv: prefix-parity conditionals") {
  const double eps = 0.2;
  const std::size_t n = 1'000'000;
  const auto bits = sample_sv(presets::prefix_parity(eps), n, 33);
  double even_n = 0, even_ones = 0, odd_n = 0, odd_ones = 0;
  bool parity = false;
  for (auto b : bits) {
    (parity ? odd_n : even_n) += 1;
    (parity ? odd_ones : even_ones) += b;
    parity ^= b != 0;
  }
  CHECK(std::abs(even_ones / even_n - (0.5 + eps)) < five_sigma(0.5 + eps, even_n));
  CHECK(std::abs(odd_ones / odd_n - (0.5 - eps)) < five_sigma(0.5 - eps, odd_n));
}

TEST_CASE("sample_sv is reproducible") {
  const auto m = presets::periodic(0.1, 4);
  CHECK(sample_sv(m, 1000, 5) == sample_sv(m, 1000, 5));
  CHECK(sample_sv(m, 1000, 5) != sample_sv(m, 1000, 6));
  CHECK_THROWS_AS(sample_sv(m, 0, 5), InvalidArgument);
}

TEST_CASE("exact SV distribution examples") {
  const auto u = exact_sv_distribution(presets::constant_bias(0.0, 0.0), 3);
  CHECK(statistical_distance(u, Distribution::uniform(3)) < 1e-15);

  const auto d = exact_sv_distribution(presets::constant_bias(0.1, 0.1), 2);
  CHECK(d[0] == doctest::Approx(0.16));
  CHECK(d[1] == doctest::Approx(0.24));
  CHECK(d[2] == doctest::Approx(0.24));
  CHECK(d[3] == doctest::Approx(0.36));

  // First generated bit is the MSB: after a leading 1 the parity preset flips.
  const auto p = exact_sv_distribution(presets::prefix_parity(0.1), 2);
  CHECK(p[0b10] == doctest::Approx(0.6 * 0.6));
  CHECK(p[0b11] == doctest::Approx(0.6 * 0.4));
  CHECK_THROWS_AS(exact_sv_distribution(presets::prefix_parity(0.1), 21), SizeError);
}

TEST_CASE("verify_sv_bound examples") {
  CHECK(verify_sv_bound(Distribution::uniform(4), 0.0));
  CHECK_FALSE(verify_sv_bound(Distribution::point_mass(3, 2), 0.4));
  CHECK(verify_sv_bound(Distribution::point_mass(3, 2), 0.5));  // fully deterministic is allowed at eps = 1/2
  const auto m = presets::periodic(0.15, 3);
  CHECK(verify_sv_bound(exact_sv_distribution(m, 8), 0.15));
  CHECK_FALSE(verify_sv_bound(exact_sv_distribution(m, 8), 0.1));
}

TEST_CASE("epsilon = 1/2 admits a deterministic strategy") {
  const auto det = SvSourceModel(0.5, [](const Prefix& p) { return p.length % 2 ? 1.0 : 0.0; });
  const auto d = exact_sv_distribution(det, 4);
  CHECK(min_entropy(d) == 0.0);
  CHECK(verify_sv_bound(d, 0.5));
}

TEST_CASE("property: SV min-entropy bounds") {
  std::mt19937_64 rng(34);
  for (double eps : {0.0, 0.05, 0.1, 0.25, 0.4}) {
    for (int n = 1; n <= 10; ++n) {
      // A random extreme-point strategy over the prefix tree.
      std::vector<int> signs((std::size_t{1} << n) - 1);
      for (auto& s : signs) s = rng() & 1 ? 1 : -1;
      const auto d = exact_sv_distribution(presets::prefix_tree(eps, signs), n);
      const double h = min_entropy(d);
      REQUIRE(h >= n * -std::log2(0.5 + eps) - 1e-9);
      REQUIRE(h <= n + 1e-9);
      REQUIRE(verify_sv_bound(d, eps));
    }
  }
}

TEST_CASE("property: statistical distance triangle inequality") {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 10000; ++t) {
    const int bits = 1 + t % 4;
    const auto p = random_distribution(rng, bits), q = random_distribution(rng, bits), r = random_distribution(rng, bits);
    REQUIRE(statistical_distance(p, r) <= statistical_distance(p, q) + statistical_distance(q, r) + 1e-12);
  }
}

TEST_CASE("block source enforces its floor") {
  BlockSourceModel ok{4, 2.0, [](const std::vector<std::uint64_t>& prev) {
                        return flat_distribution(4, {prev.size() % 4, 4, 8, 12});
                      }};
  const auto blocks = sample_blocks(ok, 50, 36);
  CHECK(blocks.size() == 50);
  BlockSourceModel low = ok;
  low.min_entropy_floor = 2.5;
  CHECK_THROWS_AS(sample_blocks(low, 5, 36), ModelViolation);
}

TEST_CASE("min-entropy source and flat distributions") {
  const auto flat = flat_distribution(4, {1, 2, 3, 4});
  CHECK(min_entropy(flat) == doctest::Approx(2.0));
  CHECK_NOTHROW(MinEntropySourceModel(4, 2.0, flat));
  CHECK_THROWS_AS(MinEntropySourceModel(4, 3.0, flat), ModelViolation);
  CHECK_THROWS_AS(flat_distribution(4, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(flat_distribution(2, {4}), InvalidArgument);
}

TEST_CASE("distribution text round trip") {
  std::mt19937_64 rng(37);
  const auto d = random_distribution(rng, 5);
  std::stringstream ss;
  write_distribution(ss, d);
  const auto back = read_distribution(ss);
  CHECK(back.probabilities() == d.probabilities());
  CHECK(to_bitstring(0b0110, 4) == "0110");

  std::istringstream bad("01 0.5\n011 0.5\n");
  CHECK_THROWS_AS(read_distribution(bad), IoError);
  std::istringstream unnormalized("0 0.5\n1 0.6\n");
  CHECK_THROWS_AS(read_distribution(unnormalized), IoError);
}

}  // TEST_SUITE
