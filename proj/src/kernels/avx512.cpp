#include <immintrin.h>

#include <bit>

#include "substrum/kernels.hpp"

namespace substrum::kernels::detail {

std::uint64_t and_popcount_avx512(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  __m512i acc0 = _mm512_setzero_si512();
  __m512i acc1 = _mm512_setzero_si512();
  std::size_t i = 0;
  for (; i + 16 <= words; i += 16) {
    const __m512i x0 = _mm512_and_si512(_mm512_loadu_si512(a + i), _mm512_loadu_si512(b + i));
    const __m512i x1 = _mm512_and_si512(_mm512_loadu_si512(a + i + 8), _mm512_loadu_si512(b + i + 8));
    acc0 = _mm512_add_epi64(acc0, _mm512_popcnt_epi64(x0));
    acc1 = _mm512_add_epi64(acc1, _mm512_popcnt_epi64(x1));
  }
  if (i < words) {
    const __mmask8 m0 = static_cast<__mmask8>(words - i >= 8 ? 0xff : (1u << (words - i)) - 1);
    const __m512i x0 = _mm512_and_si512(_mm512_maskz_loadu_epi64(m0, a + i), _mm512_maskz_loadu_epi64(m0, b + i));
    acc0 = _mm512_add_epi64(acc0, _mm512_popcnt_epi64(x0));
    i += 8;
    if (i < words) {
      const __mmask8 m1 = static_cast<__mmask8>((1u << (words - i)) - 1);
      const __m512i x1 = _mm512_and_si512(_mm512_maskz_loadu_epi64(m1, a + i), _mm512_maskz_loadu_epi64(m1, b + i));
      acc1 = _mm512_add_epi64(acc1, _mm512_popcnt_epi64(x1));
    }
  }
  return static_cast<std::uint64_t>(_mm512_reduce_add_epi64(_mm512_add_epi64(acc0, acc1)));
}

}  // namespace substrum::kernels::detail
