// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace subgrade::simd::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));

} // namespace

double squared_distance(const double* a, const double* b, std::size_t d) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= d; k += 4) {
        const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        acc = _mm256_fmadd_pd(t, t, acc);
    }
    double s = hsum(acc);
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
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_diff(double alpha, const double* x1, const double* x2, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(x1 + i), _mm256_loadu_pd(x2 + i));
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, diff, _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * (x1[i] - x2[i]);
}

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_sq_dev(const double* x, double center, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(center);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
        acc = _mm256_fmadd_pd(t, t, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double t = x[i] - center;
        s += t * t;
    }
    return s;
}

ResidualSums residual_sums(const double* actual, const double* predicted, std::size_t n) {
    __m256d sq = _mm256_setzero_pd();
    __m256d ab = _mm256_setzero_pd();
    __m256d rel = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(actual + i);
        const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(predicted + i), a);
        const __m256d ar = _mm256_and_pd(r, kAbsMask);
        sq = _mm256_fmadd_pd(r, r, sq);
        ab = _mm256_add_pd(ab, ar);
        rel = _mm256_add_pd(rel, _mm256_div_pd(ar, _mm256_and_pd(a, kAbsMask)));
    }
    ResidualSums s{hsum(sq), hsum(ab), hsum(rel)};
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
    Isa::Avx2, squared_distance, squared_distances, dot, axpy, axpy_diff, sum, sum_sq_dev, residual_sums,
};

} // namespace subgrade::simd::avx2
