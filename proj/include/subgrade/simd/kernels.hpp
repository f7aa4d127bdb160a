// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

// Data-parallel inner loops shared by the solvers and the metrics.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at runtime from the CPU feature bits; `select()` overrides it.
// Vector variants reassociate sums, so they agree with the scalar reference
// to rounding, not bit-for-bit. Within one process and one selection results
// are fully deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace subgrade::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct ResidualSums {
    double sum_sq = 0.0;      // sum (p - a)^2
    double sum_abs = 0.0;     // sum |p - a|
    double sum_abs_rel = 0.0; // sum |p - a| / |a|
};

struct KernelTable {
    Isa isa;
    double (*squared_distance)(const double* a, const double* b, std::size_t d);
    // out[i] = |rows[i*d .. i*d+d) - q|^2 for i in [0, n)
    void (*squared_distances)(const double* rows, std::size_t n, std::size_t d, const double* q,
                              double* out);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y += alpha * (x1 - x2)
    void (*axpy_diff)(double alpha, const double* x1, const double* x2, double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // sum (x - center)^2
    double (*sum_sq_dev)(const double* x, double center, std::size_t n);
    ResidualSums (*residual_sums)(const double* actual, const double* predicted, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

Isa best_available() noexcept;

/// Currently selected table (best available unless overridden).
const KernelTable& active() noexcept;

/// Force a variant; throws Error(InvalidArgument) if it is unavailable.
void select(Isa isa);

/// Tables for every variant usable on this machine, scalar first.
std::span<const KernelTable* const> available() noexcept;

// Span conveniences over the active table.

double squared_distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double center);
ResidualSums residual_sums(std::span<const double> actual, std::span<const double> predicted);

} // namespace subgrade::simd
