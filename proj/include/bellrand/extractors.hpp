// Randomness post-processing: two-source inner-product extraction, seeded
// Toeplitz hashing and leftover-hash parameter accounting.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bellrand/bitstring.hpp"
#include "bellrand/gf2_poly.hpp"

namespace bellrand::extract {

/// Seed of an m x n Toeplitz matrix over GF(2): T[j][i] = seed[j - i + n - 1].
class ToeplitzSeed {
 public:
  ToeplitzSeed(std::size_t input_bits, std::size_t output_bits, BitString bits);

  /// Seed whose matrix is the identity (m = n).
  static ToeplitzSeed identity(std::size_t n);

  std::size_t input_bits() const noexcept { return n_; }
  std::size_t output_bits() const noexcept { return m_; }
  const BitString& bits() const noexcept { return bits_; }
  bool entry(std::size_t row, std::size_t col) const { return bits_[row + n_ - 1 - col]; }

  static std::size_t length(std::size_t n, std::size_t m) noexcept { return n + m - 1; }

 private:
  std::size_t n_;
  std::size_t m_;
  BitString bits_;
};

/// (x_1 y_1) xor ... xor (x_n y_n).
bool inner_product_extract(const BitString& x, const BitString& y);

/// One output bit per block of `block_bits` from x and y (equal lengths);
/// a trailing partial block is dropped.
BitString inner_product_extract_blocks(const BitString& x, const BitString& y, std::size_t block_bits);

/// T x over GF(2), computed as the middle slice of a polynomial product.
BitString toeplitz_extract(const BitString& x, const ToeplitzSeed& seed,
                           gf2::Kernel kernel = gf2::Kernel::automatic);

/// Row-by-row bit loop; the correctness reference for the packed kernel.
BitString toeplitz_extract_reference(const BitString& x, const ToeplitzSeed& seed);

/// Leftover-hash distance bound  eps = sqrt(2^(m - k)) / 2.
double required_seed_and_epsilon(double min_entropy_bits, std::size_t output_bits);

/// Largest m with eps <= target in the form floor(k) - 2 ceil(log2(1/eps));
/// zero when no output is possible.
std::size_t output_length(double min_entropy_bits, double epsilon);

enum class SeedMode {
  fresh,     // a new seed per block
  expander,  // one seed reused by every block
};

struct BlockExtraction {
  BitString output;
  std::size_t blocks = 0;
  std::size_t seed_bits_used = 0;
  std::size_t discarded_input_bits = 0;
  std::vector<std::string> warnings;
};

std::size_t block_seed_bits(std::size_t input_bits, std::size_t block_bits, std::size_t out_per_block,
                            SeedMode mode) noexcept;

/// Toeplitz extraction over consecutive blocks, seeds taken in order from
/// `seed_pool`. Output order follows block order for any thread count.
BlockExtraction toeplitz_extract_blocks(const BitString& input, std::size_t block_bits,
                                        std::size_t out_per_block, const BitString& seed_pool,
                                        SeedMode mode, unsigned threads = 1);

}  // namespace bellrand::extract
