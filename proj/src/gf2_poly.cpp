#include "bellrand/gf2_poly.hpp"

#include <algorithm>
#include <cstddef>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define BELLRAND_X86 1
#endif

namespace bellrand::gf2 {

namespace {

using Word = std::uint64_t;
using BaseCase = void (*)(const Word*, std::size_t, const Word*, std::size_t, Word*);

constexpr std::size_t kKaratsubaCutoff = 24;

void clmul_portable(Word a, Word b, Word& lo, Word& hi) noexcept {
  lo = 0;
  hi = 0;
  for (int i = 0; i < 64; ++i) {
    const Word mask = Word{0} - ((b >> i) & 1U);
    lo ^= (a << i) & mask;
    if (i != 0) hi ^= (a >> (64 - i)) & mask;
  }
}

void schoolbook_portable(const Word* a, std::size_t na, const Word* b, std::size_t nb, Word* out) {
  for (std::size_t i = 0; i < na; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < nb; ++j) {
      Word lo, hi;
      clmul_portable(a[i], b[j], lo, hi);
      out[i + j] ^= lo;
      out[i + j + 1] ^= hi;
    }
  }
}

#ifdef BELLRAND_X86
__attribute__((target("pclmul,sse4.1"))) void schoolbook_clmul(const Word* a, std::size_t na,
                                                                const Word* b, std::size_t nb,
                                                                Word* out) {
  for (std::size_t i = 0; i < na; ++i) {
    if (a[i] == 0) continue;
    const __m128i va = _mm_set_epi64x(0, static_cast<long long>(a[i]));
    for (std::size_t j = 0; j < nb; ++j) {
      const __m128i r = _mm_clmulepi64_si128(va, _mm_set_epi64x(0, static_cast<long long>(b[j])), 0x00);
      out[i + j] ^= static_cast<Word>(_mm_cvtsi128_si64(r));
      out[i + j + 1] ^= static_cast<Word>(_mm_extract_epi64(r, 1));
    }
  }
}
#endif

// out (2n words, zeroed by the caller) = a * b, both of length n.
void karatsuba(const Word* a, const Word* b, std::size_t n, Word* out, BaseCase base) {
  if (n <= kKaratsubaCutoff) {
    base(a, n, b, n, out);
    return;
  }
  const std::size_t lo = n / 2;
  const std::size_t hi = n - lo;
  karatsuba(a, b, lo, out, base);
  karatsuba(a + lo, b + lo, hi, out + 2 * lo, base);

  std::vector<Word> sa(a + lo, a + n), sb(b + lo, b + n);
  for (std::size_t i = 0; i < lo; ++i) {
    sa[i] ^= a[i];
    sb[i] ^= b[i];
  }
  std::vector<Word> mid(2 * hi, 0);
  karatsuba(sa.data(), sb.data(), hi, mid.data(), base);
  for (std::size_t i = 0; i < 2 * lo; ++i) mid[i] ^= out[i];
  for (std::size_t i = 0; i < 2 * hi; ++i) mid[i] ^= out[2 * lo + i];
  for (std::size_t i = 0; i < 2 * hi; ++i) out[lo + i] ^= mid[i];
}

}  // namespace

bool hardware_clmul_available() noexcept {
#ifdef BELLRAND_X86
  return __builtin_cpu_supports("pclmul");
#else
  return false;
#endif
}

std::vector<Word> multiply(std::span<const Word> a, std::span<const Word> b, Kernel kernel) {
  std::vector<Word> out(a.size() + b.size(), 0);
  if (a.empty() || b.empty()) return out;
  BaseCase base = schoolbook_portable;
#ifdef BELLRAND_X86
  if (kernel == Kernel::automatic && hardware_clmul_available()) base = schoolbook_clmul;
#endif
  std::span<const Word> shorter = a.size() <= b.size() ? a : b;
  std::span<const Word> longer = a.size() <= b.size() ? b : a;
  const std::size_t n = shorter.size();
  std::vector<Word> chunk(n), partial(2 * n);
  // Slice the longer operand into n-word pieces and accumulate shifted products.
  for (std::size_t off = 0; off < longer.size(); off += n) {
    const std::size_t len = std::min(n, longer.size() - off);
    std::fill(chunk.begin(), chunk.end(), 0);
    std::copy_n(longer.begin() + static_cast<std::ptrdiff_t>(off), len, chunk.begin());
    std::fill(partial.begin(), partial.end(), 0);
    karatsuba(chunk.data(), shorter.data(), n, partial.data(), base);
    const std::size_t keep = std::min(partial.size(), out.size() - off);
    for (std::size_t i = 0; i < keep; ++i) out[off + i] ^= partial[i];
  }
  return out;
}

}  // namespace bellrand::gf2
