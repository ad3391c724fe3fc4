// Device-independent randomness certification from observed Bell values.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bellrand/behaviors.hpp"
#include "bellrand/kv_document.hpp"

namespace bellrand::certify {

struct GuessingProbability {
  double max_probability;  // c_x = max_a p(a|x)
  double min_entropy;      // -log2 c_x
};

GuessingProbability guessing_probability(const bell::Behavior& b, std::span<const int> settings);
GuessingProbability guessing_probability(const bell::Behavior& b, int x, int y);

inline constexpr double kTsirelson = 2.8284271247461900976;  // 2 sqrt 2

/// Lower bound on H_min(A,B|x,y) from a CHSH value S:
///   0 for S <= 2,  1 - log2(1 + sqrt(2 - S^2/4)) for 2 < S <= 2 sqrt2.
/// Values above 2 sqrt2 are evaluated at 2 sqrt2. Throws for |S| > 4.
double min_entropy_bound_chsh(double s);

/// True when `s` would be clamped by min_entropy_bound_chsh.
bool exceeds_tsirelson(double s) noexcept;

struct CertificationReport {
  double s_hat = 0.0;
  double s_lo = 0.0;
  double deviation = 0.0;
  double confidence = 0.0;
  double bits_per_round = 0.0;
  std::size_t rounds = 0;
  std::size_t certified_bits = 0;  // floor(rounds * bits_per_round)
  std::vector<std::string> warnings;

  KvDocument document() const;
};

/// Turns an estimate into a certificate for `rounds` output pairs.
CertificationReport certify_estimate(const bell::FunctionalEstimate& estimate, std::size_t rounds);

/// Hoeffding lower bound on the functional, then floor(N f(S_lo)).
CertificationReport certify(const bell::Records& records, const bell::BellFunctional& functional,
                            double confidence);

/// Infinite-sample mode: the exact behavior replaces the frequencies.
CertificationReport certify(const bell::Behavior& exact, const bell::BellFunctional& functional,
                            double confidence, std::size_t rounds);

}  // namespace bellrand::certify
