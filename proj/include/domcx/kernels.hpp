#pragma once

// Dense inner-loop kernels used by the network engine.
//
// Every kernel has a portable scalar reference implementation. Wider variants
// (currently AVX2+FMA on x86-64) live in their own translation unit and are
// selected at runtime after a CPU feature check. `axpy` is bit-identical
// across backends; `dot` reassociates the sum and agrees to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace domcx::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
    Backend backend;
    double (*dot)(const double* a, const double* b, std::size_t n) noexcept;
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n) noexcept;
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled into this build.
const KernelTable* avx2_table() noexcept;

/// True if the variant is compiled in and the running CPU can execute it.
bool available(Backend backend) noexcept;

/// The widest available backend; chosen once at startup.
Backend best_available() noexcept;

/// Kernels used by the network engine. Defaults to best_available().
const KernelTable& active() noexcept;

/// Switches the active table process-wide. Throws InvalidArgument if the
/// backend is not available here. Not meant to be called while trainings run.
void select(Backend backend);

std::string_view backend_name(Backend backend) noexcept;

/// Parses "scalar" / "avx2" / "auto".
Backend parse_backend(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
    active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace domcx::kernels
