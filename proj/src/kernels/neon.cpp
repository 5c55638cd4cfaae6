#include "depsel/kernels/kernels.hpp"

#include <arm_neon.h>

namespace depsel::kernels {
namespace {

void maxmin_update(double* row, const double* src, double a, std::size_t n) {
    const float64x2_t cap = vdupq_n_f64(a);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t via = vminq_f64(vld1q_f64(src + j), cap);
        vst1q_f64(row + j, vmaxq_f64(via, vld1q_f64(row + j)));
    }
    for (; j < n; ++j) {
        const double via = src[j] < a ? src[j] : a;
        if (via > row[j]) row[j] = via;
    }
}

std::uint64_t and_count(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t w = 0;
    for (; w + 2 <= words; w += 2) {
        const uint8x16_t bits = vreinterpretq_u8_u64(vandq_u64(vld1q_u64(a + w), vld1q_u64(b + w)));
        acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(bits)))));
    }
    std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    for (; w < words; ++w) total += static_cast<std::uint64_t>(__builtin_popcountll(a[w] & b[w]));
    return total;
}

std::uint64_t count(const std::uint64_t* a, std::size_t words) {
    uint64x2_t acc = vdupq_n_u64(0);
    std::size_t w = 0;
    for (; w + 2 <= words; w += 2) {
        const uint8x16_t bits = vreinterpretq_u8_u64(vld1q_u64(a + w));
        acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(bits)))));
    }
    std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
    for (; w < words; ++w) total += static_cast<std::uint64_t>(__builtin_popcountll(a[w]));
    return total;
}

double penalty_max(const double* influence_row, const double* selection, std::size_t n) {
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t two = vdupq_n_f64(2.0);
    const float64x2_t half = vdupq_n_f64(0.5);
    float64x2_t best = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        const float64x2_t v = vld1q_f64(influence_row + j);
        const float64x2_t sign = vsubq_f64(one, vmulq_f64(two, vld1q_f64(selection + j)));
        const float64x2_t term = vmulq_f64(vaddq_f64(vabsq_f64(v), vmulq_f64(sign, v)), half);
        best = vmaxq_f64(term, best);
    }
    double result = vmaxvq_f64(best);
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

const KernelTable& neon_table() {
    static const KernelTable table{Isa::neon, maxmin_update, and_count, count, penalty_max};
    return table;
}

} // namespace depsel::kernels
