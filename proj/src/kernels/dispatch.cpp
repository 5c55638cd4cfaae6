#include "depsel/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace depsel::kernels {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(DEPSEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
        return false;
#endif
    case Isa::neon:
#if defined(DEPSEL_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return &scalar_table();
    case Isa::avx2:
#if defined(DEPSEL_HAVE_AVX2)
        return &avx2_table();
#else
        return nullptr;
#endif
    case Isa::neon:
#if defined(DEPSEL_HAVE_NEON)
        return &neon_table();
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* detect() {
    if (const char* forced = std::getenv("DEPSEL_SIMD")) {
        const std::string wanted(forced);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
            if (wanted == name(isa) && available(isa)) return table_for(isa);
    }
    for (Isa isa : {Isa::avx2, Isa::neon})
        if (available(isa)) return table_for(isa);
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{detect()};
    return current;
}

} // namespace

bool available(Isa isa) { return table_for(isa) != nullptr && cpu_supports(isa); }

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

bool select(Isa isa) {
    if (!available(isa)) return false;
    slot().store(table_for(isa), std::memory_order_release);
    return true;
}

std::string_view name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

} // namespace depsel::kernels
