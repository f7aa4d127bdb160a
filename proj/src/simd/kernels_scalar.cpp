// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include <cmath>

#include "kernels_impl.hpp"

namespace subgrade::simd::scalar {

double squared_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double t = a[k] - b[k];
        acc += t * t;
    }
    return acc;
}

void squared_distances(const double* rows, std::size_t n, std::size_t d, const double* q, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = squared_distance(rows + i * d, q, d);
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_diff(double alpha, const double* x1, const double* x2, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * (x1[i] - x2[i]);
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq_dev(const double* x, double center, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = x[i] - center;
        acc += t * t;
    }
    return acc;
}

ResidualSums residual_sums(const double* actual, const double* predicted, std::size_t n) {
    ResidualSums s;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = predicted[i] - actual[i];
        const double ar = std::fabs(r);
        s.sum_sq += r * r;
        s.sum_abs += ar;
        s.sum_abs_rel += ar / std::fabs(actual[i]);
    }
    return s;
}

const KernelTable table{
    Isa::Scalar, squared_distance, squared_distances, dot, axpy, axpy_diff, sum, sum_sq_dev, residual_sums,
};

} // namespace subgrade::simd::scalar
