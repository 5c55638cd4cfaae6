#include "depsel/kernels/kernels.hpp"

#include <bit>
#include <cmath>

namespace depsel::kernels {
namespace {

void maxmin_update(double* row, const double* src, double a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        const double via = src[j] < a ? src[j] : a;
        if (via > row[j]) row[j] = via;
    }
}

std::uint64_t and_count(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < words; ++w) total += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
    return total;
}

std::uint64_t count(const std::uint64_t* a, std::size_t words) {
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < words; ++w) total += static_cast<std::uint64_t>(std::popcount(a[w]));
    return total;
}

double penalty_max(const double* influence_row, const double* selection, std::size_t n) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = influence_row[j];
        const double sign = 1.0 - 2.0 * selection[j];
        const double term = (std::fabs(v) + sign * v) * 0.5;
        if (term > best) best = term;
    }
    return best;
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::scalar, maxmin_update, and_count, count, penalty_max};
    return table;
}

} // namespace depsel::kernels
