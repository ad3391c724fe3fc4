// Weak randomness sources (Santha-Vazirani, block, min-entropy) and the
// information measures used across the library.
//
// Bitstring convention: in a Distribution over n-bit strings the first
// generated bit is the most significant bit of the index.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellrand/common.hpp"

namespace bellrand::sources {

inline constexpr int kMaxExactBits = 24;
inline constexpr double kSourceTolerance = 1e-12;

class Distribution {
 public:
  Distribution(int bits, Eigen::VectorXd probabilities);

  static Distribution uniform(int bits);
  static Distribution point_mass(int bits, std::uint64_t value);

  int bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(p_.size()); }
  const Eigen::VectorXd& probabilities() const noexcept { return p_; }
  double operator[](std::size_t i) const { return p_(static_cast<Eigen::Index>(i)); }

 private:
  int bits_;
  Eigen::VectorXd p_;
};

/// -log2 max_x p(x).
double min_entropy(const Distribution& d);
double min_entropy(const Eigen::Ref<const Eigen::VectorXd>& p);

/// (1/2) sum_x |p(x) - q(x)|.
double statistical_distance(const Distribution& p, const Distribution& q);

// ---------------------------------------------------------------------------
// Santha-Vazirani sources

/// What an SV strategy sees when choosing the next bit: the prefix length,
/// its parity and the most recent (up to 64) bits, newest in the LSB.
struct Prefix {
  std::size_t length = 0;
  bool odd_parity = false;
  std::uint64_t recent = 0;

  void push(bool bit) noexcept {
    recent = (recent << 1) | static_cast<std::uint64_t>(bit);
    odd_parity ^= bit;
    ++length;
  }
};

/// p(next bit = 1 | prefix).
using SvStrategy = std::function<double(const Prefix&)>;

struct SvSourceModel {
  double epsilon;
  SvStrategy strategy;
  std::string name = "custom";

  SvSourceModel(double eps, SvStrategy s, std::string label = "custom");

  /// Strategy value, checked against [1/2 - eps, 1/2 + eps].
  double probability_one(const Prefix& prefix) const;
};

namespace presets {

/// p = 1/2 + bias for every prefix.
SvSourceModel constant_bias(double epsilon, double bias);
/// p = 1/2 + eps after an even-parity prefix, 1/2 - eps after an odd one.
SvSourceModel prefix_parity(double epsilon);
/// p = 1/2 + eps during the first half of each period, 1/2 - eps after.
SvSourceModel periodic(double epsilon, std::size_t period);
/// Extreme point of the SV set for short strings: signs[2^l - 1 + prefix]
/// selects 1/2 +- eps at every node of the prefix tree (l = prefix length).
SvSourceModel prefix_tree(double epsilon, std::vector<int> signs);

}  // namespace presets

/// n bits; bit i uses the counter RNG at (seed, i).
std::vector<std::uint8_t> sample_sv(const SvSourceModel& model, std::size_t n, std::uint64_t seed);

/// Exact chain-rule distribution over n <= 20 bits.
Distribution exact_sv_distribution(const SvSourceModel& model, int n);

/// Every nonvacuous conditional p(x_i = 1 | prefix) lies in the eps band.
bool verify_sv_bound(const Distribution& d, double epsilon);

// ---------------------------------------------------------------------------
// Block and min-entropy sources

/// Block (n, k) source: each n-bit block, conditioned on the previous blocks,
/// has min-entropy at least k.
struct BlockSourceModel {
  int block_bits;
  double min_entropy_floor;
  std::function<Distribution(const std::vector<std::uint64_t>& previous_blocks)> generator;

  /// Next-block distribution after validating the floor.
  Distribution next_block(const std::vector<std::uint64_t>& previous_blocks) const;
};

std::vector<std::uint64_t> sample_blocks(const BlockSourceModel& model, std::size_t blocks,
                                         std::uint64_t seed);

struct MinEntropySourceModel {
  int bits;
  double k;
  Distribution distribution;

  MinEntropySourceModel(int n, double floor, Distribution d);
};

/// A flat source: uniform over the given support.
Distribution flat_distribution(int bits, const std::vector<std::uint64_t>& support);

/// Draw an index from an exact distribution.
std::uint64_t sample(const Distribution& d, double u);

// ---------------------------------------------------------------------------
// Text format: one "bitstring probability" pair per line.

void write_distribution(std::ostream& os, const Distribution& d);
Distribution read_distribution(std::istream& is);

std::string to_bitstring(std::uint64_t value, int bits);

}  // namespace bellrand::sources
