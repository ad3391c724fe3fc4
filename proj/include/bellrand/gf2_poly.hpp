#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bellrand::gf2 {

enum class Kernel { automatic, portable };

bool hardware_clmul_available() noexcept;

/// Product of two GF(2)[z] polynomials packed LSB-first (bit i of the word
/// array is the coefficient of z^i). Karatsuba above a schoolbook base case
/// built on 64x64 carry-less multiplies. Result has a.size() + b.size() words.
std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a,
                                    std::span<const std::uint64_t> b,
                                    Kernel kernel = Kernel::automatic);

}  // namespace bellrand::gf2
