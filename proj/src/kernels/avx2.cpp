// Compiled with -mavx2 -mpopcnt. Keep this unit free of inline library
// templates so no AVX2-encoded copy of a shared inline function can leak
// into the rest of the program.
#include "depsel/kernels/kernels.hpp"

#include <immintrin.h>

namespace depsel::kernels {
namespace {

void maxmin_update(double* row, const double* src, double a, std::size_t n) {
    const __m256d cap = _mm256_set1_pd(a);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d s = _mm256_loadu_pd(src + j);
        const __m256d r = _mm256_loadu_pd(row + j);
        // min/max operand order matches the scalar reference for equal inputs
        const __m256d via = _mm256_min_pd(s, cap);
        _mm256_storeu_pd(row + j, _mm256_max_pd(via, r));
    }
    for (; j < n; ++j) {
        const double via = src[j] < a ? src[j] : a;
        if (via > row[j]) row[j] = via;
    }
}

// Nibble-table popcount (Mula et al.), accumulated with vpsadbw.
inline __m256i popcount_bytes(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

std::uint64_t horizontal_sum(__m256i acc) {
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

std::uint64_t and_count(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t w = 0;
    for (; w + 4 <= words; w += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w));
        const __m256i bytes = popcount_bytes(_mm256_and_si256(va, vb));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(bytes, _mm256_setzero_si256()));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; w < words; ++w) total += static_cast<std::uint64_t>(_mm_popcnt_u64(a[w] & b[w]));
    return total;
}

std::uint64_t count(const std::uint64_t* a, std::size_t words) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t w = 0;
    for (; w + 4 <= words; w += 4) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(va), _mm256_setzero_si256()));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; w < words; ++w) total += static_cast<std::uint64_t>(_mm_popcnt_u64(a[w]));
    return total;
}

double penalty_max(const double* influence_row, const double* selection, std::size_t n) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d half = _mm256_set1_pd(0.5);
    __m256d best = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d v = _mm256_loadu_pd(influence_row + j);
        const __m256d x = _mm256_loadu_pd(selection + j);
        const __m256d sign = _mm256_sub_pd(one, _mm256_mul_pd(two, x));
        const __m256d term = _mm256_mul_pd(_mm256_add_pd(_mm256_and_pd(v, abs_mask), _mm256_mul_pd(sign, v)), half);
        best = _mm256_max_pd(term, best);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double result = lanes[0];
    for (int l = 1; l < 4; ++l)
        if (lanes[l] > result) result = lanes[l];
    for (; j < n; ++j) {
        const double v = influence_row[j];
        const double sign = 1.0 - 2.0 * selection[j];
        const double magnitude = v < 0.0 ? -v : v;
        const double term = (magnitude + sign * v) * 0.5;
        if (term > result) result = term;
    }
    return result;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Isa::avx2, maxmin_update, and_count, count, penalty_max};
    return table;
}

} // namespace depsel::kernels
