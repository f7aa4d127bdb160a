// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include <array>
#include <atomic>

#include "kernels_impl.hpp"
#include "subgrade/error.hpp"

namespace subgrade::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(SUBGRADE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Registry {
    std::array<const KernelTable*, 3> tables{};
    std::size_t count = 0;
    std::atomic<const KernelTable*> current{nullptr};

    Registry() {
        tables[count++] = &scalar::table;
#if defined(SUBGRADE_HAVE_AVX2)
        if (cpu_has_avx2()) tables[count++] = &avx2::table;
#endif
#if defined(SUBGRADE_HAVE_NEON)
        tables[count++] = &neon::table;
#endif
        current.store(tables[count - 1]);
    }

    const KernelTable* find(Isa isa) const noexcept {
        for (std::size_t i = 0; i < count; ++i)
            if (tables[i]->isa == isa) return tables[i];
        return nullptr;
    }
};

Registry& registry() noexcept {
    static Registry r;
    return r;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw Error(ErrorCode::DimensionMismatch, "kernel operand lengths differ");
}

} // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return scalar::table; }
const KernelTable* avx2_kernels() noexcept { return registry().find(Isa::Avx2); }
const KernelTable* neon_kernels() noexcept { return registry().find(Isa::Neon); }

Isa best_available() noexcept {
    auto& r = registry();
    return r.tables[r.count - 1]->isa;
}

const KernelTable& active() noexcept { return *registry().current.load(std::memory_order_relaxed); }

void select(Isa isa) {
    const KernelTable* t = registry().find(isa);
    if (t == nullptr)
        throw Error(ErrorCode::InvalidArgument, std::string("SIMD variant unavailable: ") + std::string(to_string(isa)));
    registry().current.store(t);
}

std::span<const KernelTable* const> available() noexcept {
    auto& r = registry();
    return {r.tables.data(), r.count};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return active().squared_distance(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size(), y.size());
    active().axpy(alpha, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double sum_sq_dev(std::span<const double> x, double center) {
    return active().sum_sq_dev(x.data(), center, x.size());
}

ResidualSums residual_sums(std::span<const double> actual, std::span<const double> predicted) {
    check_sizes(actual.size(), predicted.size());
    return active().residual_sums(actual.data(), predicted.data(), actual.size());
}

} // namespace subgrade::simd
