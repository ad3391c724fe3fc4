#include "bellrand/sources.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "bellrand/rng.hpp"

namespace bellrand::sources {

Distribution::Distribution(int bits, Eigen::VectorXd probabilities)
    : bits_(bits), p_(std::move(probabilities)) {
  if (bits < 1 || bits > kMaxExactBits) throw SizeError("Distribution: need 1 <= n <= 24 bits");
  if (p_.size() != (Eigen::Index{1} << bits))
    throw DimensionError("Distribution: table size != 2^n");
  if (!p_.allFinite() || p_.minCoeff() < 0.0) throw InvalidArgument("Distribution: negative entry");
  if (std::abs(p_.sum() - 1.0) > kSourceTolerance)
    throw InvalidArgument("Distribution: probabilities do not sum to 1");
}

Distribution Distribution::uniform(int bits) {
  if (bits < 1 || bits > kMaxExactBits) throw SizeError("Distribution: need 1 <= n <= 24 bits");
  const Eigen::Index size = Eigen::Index{1} << bits;
  return Distribution(bits, Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size)));
}

Distribution Distribution::point_mass(int bits, std::uint64_t value) {
  if (bits < 1 || bits > kMaxExactBits) throw SizeError("Distribution: need 1 <= n <= 24 bits");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(Eigen::Index{1} << bits);
  if (value >= static_cast<std::uint64_t>(p.size())) throw InvalidArgument("point_mass: value out of range");
  p(static_cast<Eigen::Index>(value)) = 1.0;
  return Distribution(bits, std::move(p));
}

double min_entropy(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() == 0) throw InvalidArgument("min_entropy: empty distribution");
  const double top = p.maxCoeff();
  if (!(top > 0.0)) throw InvalidArgument("min_entropy: no probability mass");
  return std::max(0.0, -std::log2(top));
}

double min_entropy(const Distribution& d) { return min_entropy(d.probabilities()); }

double statistical_distance(const Distribution& p, const Distribution& q) {
  if (p.bits() != q.bits()) throw DimensionError("statistical_distance: domains differ");
  return std::clamp(0.5 * (p.probabilities() - q.probabilities()).cwiseAbs().sum(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------

SvSourceModel::SvSourceModel(double eps, SvStrategy s, std::string label)
    : epsilon(eps), strategy(std::move(s)), name(std::move(label)) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw InvalidArgument("SvSourceModel: epsilon must lie in [0, 1/2]");
  if (!strategy) throw InvalidArgument("SvSourceModel: empty strategy");
}

double SvSourceModel::probability_one(const Prefix& prefix) const {
  const double p = strategy(prefix);
  if (!(p >= 0.5 - epsilon - kSourceTolerance && p <= 0.5 + epsilon + kSourceTolerance))
    throw ModelViolation("SV strategy (" + name + ") left [1/2 - eps, 1/2 + eps] at prefix length " +
                         std::to_string(prefix.length));
  return std::clamp(p, 0.0, 1.0);
}

namespace presets {

SvSourceModel constant_bias(double epsilon, double bias) {
  return SvSourceModel(epsilon, [bias](const Prefix&) { return 0.5 + bias; }, "constant-bias");
}

SvSourceModel prefix_parity(double epsilon) {
  return SvSourceModel(
      epsilon, [epsilon](const Prefix& p) { return p.odd_parity ? 0.5 - epsilon : 0.5 + epsilon; },
      "prefix-parity");
}

SvSourceModel periodic(double epsilon, std::size_t period) {
  if (period < 2) throw InvalidArgument("periodic: period must be >= 2");
  return SvSourceModel(
      epsilon,
      [epsilon, period](const Prefix& p) {
        return (p.length % period) < period / 2 ? 0.5 + epsilon : 0.5 - epsilon;
      },
      "periodic");
}

SvSourceModel prefix_tree(double epsilon, std::vector<int> signs) {
  return SvSourceModel(
      epsilon,
      [epsilon, signs = std::move(signs)](const Prefix& p) {
        if (p.length >= 63) throw InvalidArgument("prefix_tree: prefix too long");
        const std::uint64_t mask = (std::uint64_t{1} << p.length) - 1;
        const std::size_t node = ((std::size_t{1} << p.length) - 1) + (p.recent & mask);
        if (node >= signs.size()) throw InvalidArgument("prefix_tree: strategy table too short");
        return 0.5 + epsilon * (signs[node] >= 0 ? 1.0 : -1.0);
      },
      "prefix-tree");
}

}  // namespace presets

std::vector<std::uint8_t> sample_sv(const SvSourceModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample_sv: need n >= 1");
  std::vector<std::uint8_t> bits(n);
  Prefix prefix;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = model.probability_one(prefix);
    CounterRng rng(seed, i, Stream::source);
    const bool bit = rng.uniform() < p;
    bits[i] = bit;
    prefix.push(bit);
  }
  return bits;
}

Distribution exact_sv_distribution(const SvSourceModel& model, int n) {
  if (n < 1 || n > 20) throw SizeError("exact_sv_distribution: need 1 <= n <= 20");
  // Breadth-first over the prefix tree; level l holds P(prefix) for all l-bit prefixes.
  std::vector<double> level{1.0};
  for (int l = 0; l < n; ++l) {
    std::vector<double> next(level.size() * 2);
    for (std::size_t v = 0; v < level.size(); ++v) {
      Prefix prefix;
      prefix.length = static_cast<std::size_t>(l);
      prefix.recent = v;
      prefix.odd_parity = (std::popcount(static_cast<std::uint64_t>(v)) & 1) != 0;
      const double p1 = model.probability_one(prefix);
      next[2 * v] = level[v] * (1.0 - p1);
      next[2 * v + 1] = level[v] * p1;
    }
    level = std::move(next);
  }
  return Distribution(n, Eigen::Map<const Eigen::VectorXd>(level.data(), static_cast<Eigen::Index>(level.size())));
}

bool verify_sv_bound(const Distribution& d, double epsilon) {
  // Marginals of prefixes, from full strings upward.
  std::vector<double> level(d.probabilities().data(), d.probabilities().data() + d.size());
  for (int l = d.bits(); l > 0; --l) {
    std::vector<double> parent(level.size() / 2);
    for (std::size_t v = 0; v < parent.size(); ++v) {
      parent[v] = level[2 * v] + level[2 * v + 1];
      if (parent[v] <= 0.0) continue;  // vacuous branch
      const double p1 = level[2 * v + 1] / parent[v];
      if (p1 < 0.5 - epsilon - kSourceTolerance || p1 > 0.5 + epsilon + kSourceTolerance) return false;
    }
    level = std::move(parent);
  }
  return true;
}

// ---------------------------------------------------------------------------

Distribution BlockSourceModel::next_block(const std::vector<std::uint64_t>& previous_blocks) const {
  Distribution d = generator(previous_blocks);
  if (d.bits() != block_bits) throw DimensionError("BlockSourceModel: generator returned wrong block size");
  if (min_entropy(d) < min_entropy_floor - kSourceTolerance)
    throw ModelViolation("BlockSourceModel: conditional block min-entropy below k");
  return d;
}

std::uint64_t sample(const Distribution& d, double u) {
  double acc = 0.0;
  const double target = u * d.probabilities().sum();
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d[i];
    if (target < acc) return i;
  }
  for (std::size_t i = d.size(); i-- > 0;)
    if (d[i] > 0.0) return i;
  return d.size() - 1;
}

std::vector<std::uint64_t> sample_blocks(const BlockSourceModel& model, std::size_t blocks,
                                         std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  out.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    const Distribution d = model.next_block(out);
    CounterRng rng(seed, i, Stream::source);
    out.push_back(sample(d, rng.uniform()));
  }
  return out;
}

MinEntropySourceModel::MinEntropySourceModel(int n, double floor, Distribution d)
    : bits(n), k(floor), distribution(std::move(d)) {
  if (distribution.bits() != n) throw DimensionError("MinEntropySourceModel: distribution has wrong size");
  if (min_entropy(distribution) < k - kSourceTolerance)
    throw ModelViolation("MinEntropySourceModel: H_min below k");
}

Distribution flat_distribution(int bits, const std::vector<std::uint64_t>& support) {
  if (support.empty()) throw InvalidArgument("flat_distribution: empty support");
  if (bits < 1 || bits > kMaxExactBits) throw SizeError("flat_distribution: need 1 <= n <= 24 bits");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(Eigen::Index{1} << bits);
  for (auto v : support) {
    if (v >= static_cast<std::uint64_t>(p.size())) throw InvalidArgument("flat_distribution: element out of range");
    if (p(static_cast<Eigen::Index>(v)) != 0.0) throw InvalidArgument("flat_distribution: duplicate element");
    p(static_cast<Eigen::Index>(v)) = 1.0 / static_cast<double>(support.size());
  }
  return Distribution(bits, std::move(p));
}

// ---------------------------------------------------------------------------

std::string to_bitstring(std::uint64_t value, int bits) {
  std::string s(static_cast<std::size_t>(bits), '0');
  for (int i = 0; i < bits; ++i)
    if ((value >> (bits - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

void write_distribution(std::ostream& os, const Distribution& d) {
  char buf[64];
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d[i]);
    if (ec != std::errc()) throw IoError("write_distribution: conversion failed");
    os << to_bitstring(i, d.bits()) << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << '\n';
  }
}

Distribution read_distribution(std::istream& is) {
  std::map<std::uint64_t, double> entries;
  int bits = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::string word, ptext;
    if (!(row >> word)) continue;
    if (word[0] == '#') continue;
    if (!(row >> ptext)) throw IoError("read_distribution: missing probability: " + line);
    if (bits == 0) bits = static_cast<int>(word.size());
    if (static_cast<int>(word.size()) != bits) throw IoError("read_distribution: inconsistent bitstring length");
    if (bits > kMaxExactBits) throw IoError("read_distribution: bitstrings longer than 24 bits");
    std::uint64_t v = 0;
    for (char c : word) {
      if (c != '0' && c != '1') throw IoError("read_distribution: bad bitstring: " + word);
      v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    double p = 0.0;
    const auto res = std::from_chars(ptext.data(), ptext.data() + ptext.size(), p);
    if (res.ec != std::errc() || res.ptr != ptext.data() + ptext.size())
      throw IoError("read_distribution: bad probability: " + ptext);
    if (!entries.emplace(v, p).second) throw IoError("read_distribution: duplicate bitstring " + word);
  }
  if (bits == 0) throw IoError("read_distribution: empty input");
  Eigen::VectorXd table = Eigen::VectorXd::Zero(Eigen::Index{1} << bits);
  for (auto [v, p] : entries) table(static_cast<Eigen::Index>(v)) = p;
  try {
    return Distribution(bits, std::move(table));
  } catch (const Error& e) {
    throw IoError(std::string("read_distribution: ") + e.what());
  }
}

}  // namespace bellrand::sources
