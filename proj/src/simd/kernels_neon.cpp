// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

// aarch64 only; NEON (Advanced SIMD) is part of the base ISA there.

#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace subgrade::simd::neon {

double squared_distance(const double* a, const double* b, std::size_t d) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= d; k += 2) {
        const float64x2_t t = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
        acc = vfmaq_f64(acc, t, t);
    }
    double s = vaddvq_f64(acc);
    for (; k < d; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

void squared_distances(const double* rows, std::size_t n, std::size_t d, const double* q, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = squared_distance(rows + i * d, q, d);
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_diff(double alpha, const double* x1, const double* x2, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t diff = vsubq_f64(vld1q_f64(x1 + i), vld1q_f64(x2 + i));
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, diff));
    }
    for (; i < n; ++i) y[i] += alpha * (x1[i] - x2[i]);
}

double sum(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_sq_dev(const double* x, double center, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(center);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vsubq_f64(vld1q_f64(x + i), vc);
        acc = vfmaq_f64(acc, t, t);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double t = x[i] - center;
        s += t * t;
    }
    return s;
}

ResidualSums residual_sums(const double* actual, const double* predicted, std::size_t n) {
    float64x2_t sq = vdupq_n_f64(0.0);
    float64x2_t ab = vdupq_n_f64(0.0);
    float64x2_t rel = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t a = vld1q_f64(actual + i);
        const float64x2_t r = vsubq_f64(vld1q_f64(predicted + i), a);
        const float64x2_t ar = vabsq_f64(r);
        sq = vfmaq_f64(sq, r, r);
        ab = vaddq_f64(ab, ar);
        rel = vaddq_f64(rel, vdivq_f64(ar, vabsq_f64(a)));
    }
    ResidualSums s{vaddvq_f64(sq), vaddvq_f64(ab), vaddvq_f64(rel)};
    for (; i < n; ++i) {
        const double r = predicted[i] - actual[i];
        const double ar = std::fabs(r);
        s.sum_sq += r * r;
        s.sum_abs += ar;
        s.sum_abs_rel += ar / std::fabs(actual[i]);
    }
    return s;
}

const KernelTable table{
    Isa::Neon, squared_distance, squared_distances, dot, axpy, axpy_diff, sum, sum_sq_dev, residual_sums,
};

} // namespace subgrade::simd::neon
