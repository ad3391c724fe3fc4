#include "bellrand/extractors.hpp"

#include <bit>
#include <cmath>

#include "bellrand/common.hpp"
#include "bellrand/parallel.hpp"

namespace bellrand::extract {

ToeplitzSeed::ToeplitzSeed(std::size_t input_bits, std::size_t output_bits, BitString bits)
    : n_(input_bits), m_(output_bits), bits_(std::move(bits)) {
  if (n_ == 0 || m_ == 0) throw InvalidArgument("ToeplitzSeed: need n, m >= 1");
  if (m_ > n_) throw InvalidArgument("ToeplitzSeed: output length exceeds input length");
  if (bits_.size() != length(n_, m_)) throw InvalidArgument("ToeplitzSeed: seed length must be n + m - 1");
}

ToeplitzSeed ToeplitzSeed::identity(std::size_t n) {
  BitString b(length(n, n));
  b.set(n - 1, true);
  return ToeplitzSeed(n, n, std::move(b));
}

bool inner_product_extract(const BitString& x, const BitString& y) {
  if (x.size() != y.size()) throw DimensionError("inner_product_extract: length mismatch");
  if (x.empty()) throw InvalidArgument("inner_product_extract: empty input");
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < x.words().size(); ++w) acc ^= x.words()[w] & y.words()[w];
  return (std::popcount(acc) & 1) != 0;
}

BitString inner_product_extract_blocks(const BitString& x, const BitString& y, std::size_t block_bits) {
  if (x.size() != y.size()) throw DimensionError("inner_product_extract_blocks: length mismatch");
  if (block_bits == 0) throw InvalidArgument("inner_product_extract_blocks: block length must be >= 1");
  const std::size_t blocks = x.size() / block_bits;
  BitString out(blocks);
  for (std::size_t k = 0; k < blocks; ++k)
    out.set(k, inner_product_extract(x.slice(k * block_bits, block_bits), y.slice(k * block_bits, block_bits)));
  return out;
}

BitString toeplitz_extract(const BitString& x, const ToeplitzSeed& seed, gf2::Kernel kernel) {
  const std::size_t n = seed.input_bits();
  if (x.size() != n) throw DimensionError("toeplitz_extract: input length != seed input length");
  // (T x)_j = sum_i seed[j - i + n - 1] x_i = coefficient j + n - 1 of seed(z) x(z).
  const auto product = gf2::multiply(seed.bits().words(), x.words(), kernel);
  const BitString full = BitString::from_words(product, product.size() * 64);
  return full.slice(n - 1, seed.output_bits());
}

BitString toeplitz_extract_reference(const BitString& x, const ToeplitzSeed& seed) {
  if (x.size() != seed.input_bits()) throw DimensionError("toeplitz_extract: input length != seed input length");
  BitString out(seed.output_bits());
  for (std::size_t j = 0; j < seed.output_bits(); ++j) {
    bool acc = false;
    for (std::size_t i = 0; i < seed.input_bits(); ++i) acc ^= seed.entry(j, i) && x[i];
    out.set(j, acc);
  }
  return out;
}

double required_seed_and_epsilon(double min_entropy_bits, std::size_t output_bits) {
  if (output_bits == 0) throw InvalidArgument("required_seed_and_epsilon: need m >= 1");
  if (!(min_entropy_bits > 0.0)) throw InvalidArgument("required_seed_and_epsilon: need k > 0");
  const double gap = static_cast<double>(output_bits) - min_entropy_bits;
  if (gap > 60.0) throw InvalidArgument("required_seed_and_epsilon: m > k + 60 gives a vacuous bound");
  return 0.5 * std::sqrt(std::exp2(gap));
}

std::size_t output_length(double min_entropy_bits, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("output_length: epsilon must lie in (0, 1)");
  if (!(min_entropy_bits >= 0.0)) throw InvalidArgument("output_length: negative min-entropy");
  const double margin = 2.0 * std::ceil(std::log2(1.0 / epsilon));
  const double k = std::floor(min_entropy_bits);
  return k > margin ? static_cast<std::size_t>(k - margin) : 0;
}

std::size_t block_seed_bits(std::size_t input_bits, std::size_t block_bits, std::size_t out_per_block,
                            SeedMode mode) noexcept {
  if (block_bits == 0 || out_per_block == 0) return 0;
  const std::size_t blocks = input_bits / block_bits;
  if (blocks == 0) return 0;
  const std::size_t per_seed = ToeplitzSeed::length(block_bits, out_per_block);
  return mode == SeedMode::expander ? per_seed : blocks * per_seed;
}

BlockExtraction toeplitz_extract_blocks(const BitString& input, std::size_t block_bits,
                                        std::size_t out_per_block, const BitString& seed_pool,
                                        SeedMode mode, unsigned threads) {
  if (block_bits == 0) throw InvalidArgument("toeplitz_extract_blocks: block length must be >= 1");
  if (out_per_block == 0 || out_per_block > block_bits)
    throw InvalidArgument("toeplitz_extract_blocks: need 1 <= output per block <= block length");
  BlockExtraction result;
  result.blocks = input.size() / block_bits;
  result.discarded_input_bits = input.size() - result.blocks * block_bits;
  result.seed_bits_used = block_seed_bits(input.size(), block_bits, out_per_block, mode);
  if (seed_pool.size() < result.seed_bits_used)
    throw SeedExhausted("toeplitz_extract_blocks: seed pool too short");
  if (mode == SeedMode::expander && result.blocks > 1)
    result.warnings.push_back(
        "expander mode: one Toeplitz seed is reused across blocks; outputs of different blocks are "
        "not independently hashed");

  const std::size_t per_seed = ToeplitzSeed::length(block_bits, out_per_block);
  std::vector<BitString> pieces(result.blocks);
  parallel_for(result.blocks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t seed_offset = mode == SeedMode::expander ? 0 : k * per_seed;
      const ToeplitzSeed seed(block_bits, out_per_block, seed_pool.slice(seed_offset, per_seed));
      pieces[k] = toeplitz_extract(input.slice(k * block_bits, block_bits), seed);
    }
  });
  for (const auto& p : pieces) result.output.append(p);
  return result;
}

}  // namespace bellrand::extract
