#pragma once
// Data-parallel inner loops shared by the closure, the co-occurrence counter
// and the penalty evaluation. Every entry point has a scalar reference
// implementation and optional SIMD variants; the active table is chosen once
// at first use from the CPU features (override with DEPSEL_SIMD=scalar|avx2|neon).
//
// All kernels are exact: they only use min/max, popcount, negation and
// multiplication by 0.5 or +-1, so every variant returns bit-identical results.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace depsel::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    Isa isa;
    // row[j] = max(row[j], min(a, src[j])) for j < n
    void (*maxmin_update)(double* row, const double* src, double a, std::size_t n);
    // popcount(a[w] & b[w]) summed over w < words
    std::uint64_t (*and_count)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
    // popcount(a[w]) summed over w < words
    std::uint64_t (*count)(const std::uint64_t* a, std::size_t words);
    // max(0, max_j (|inf[j]| + (1 - 2 sel[j]) inf[j]) / 2), sel[j] in {0, 1}
    double (*penalty_max)(const double* influence_row, const double* selection, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(DEPSEL_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(DEPSEL_HAVE_NEON)
const KernelTable& neon_table();
#endif

// Table in use by the library.
const KernelTable& active();

// True when the running CPU and the build both support `isa`.
bool available(Isa isa);

// Forces a specific variant (tests and benchmarks). Returns false when the
// variant is unavailable; the active table is left unchanged in that case.
bool select(Isa isa);

std::string_view name(Isa isa);

} // namespace depsel::kernels
