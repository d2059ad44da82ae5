#include <atomic>
#include <string>

#include "domcx/error.hpp"
#include "domcx/kernels.hpp"

namespace domcx::kernels {

#if !defined(DOMCX_HAVE_AVX2)
const KernelTable* avx2_table() noexcept { return nullptr; }
#endif

namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(DOMCX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& table_for(Backend backend) noexcept {
    if (backend == Backend::avx2 && avx2_table() != nullptr) {
        return *avx2_table();
    }
    return scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{&table_for(best_available())};
    return slot;
}

}  // namespace

bool available(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return true;
        case Backend::avx2: return avx2_table() != nullptr && cpu_has_avx2_fma();
    }
    return false;
}

Backend best_available() noexcept {
    static const Backend best = available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
    return best;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

void select(Backend backend) {
    if (!available(backend)) {
        throw InvalidArgument("kernel backend '" + std::string(backend_name(backend)) +
                              "' is not available on this CPU/build");
    }
    active_slot().store(&table_for(backend), std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

Backend parse_backend(std::string_view name) {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "auto") return best_available();
    throw InvalidArgument("unknown kernel backend '" + std::string(name) + "'");
}

}  // namespace domcx::kernels
