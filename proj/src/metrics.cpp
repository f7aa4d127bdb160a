// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/metrics.hpp"

#include <cmath>
#include <string>

#include "subgrade/error.hpp"
#include "subgrade/simd/kernels.hpp"

namespace subgrade {
namespace {

void check(std::span<const double> a, std::span<const double> p, std::size_t min_len) {
    if (a.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "actual and predicted lengths differ");
    if (a.size() < min_len)
        throw Error(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_len) + " samples");
}

void check_nonzero(std::span<const double> a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(std::fabs(a[i]) > kMapeZeroTolerance))
            throw Error(ErrorCode::NearZeroActual, "actual value near zero at row " + std::to_string(i));
}

double total_sum_squares(std::span<const double> a) {
    const double mean = simd::sum(a) / static_cast<double>(a.size());
    return simd::sum_sq_dev(a, mean);
}

} // namespace

double r2(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, 2);
    const double ss_tot = total_sum_squares(actual);
    if (ss_tot == 0.0) throw Error(ErrorCode::ConstantActual, "actual values have zero variance");
    return 1.0 - simd::residual_sums(actual, predicted).sum_sq / ss_tot;
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, 1);
    return std::sqrt(simd::residual_sums(actual, predicted).sum_sq / static_cast<double>(actual.size()));
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, 1);
    return simd::residual_sums(actual, predicted).sum_abs / static_cast<double>(actual.size());
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check(actual, predicted, 1);
    check_nonzero(actual);
    return simd::residual_sums(actual, predicted).sum_abs_rel / static_cast<double>(actual.size());
}

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted,
                    std::span<const std::size_t> row_ids) {
    check(actual, predicted, 2);
    if (row_ids.size() != actual.size()) throw Error(ErrorCode::DimensionMismatch, "row id count");
    check_nonzero(actual);
    const double ss_tot = total_sum_squares(actual);
    if (ss_tot == 0.0) throw Error(ErrorCode::ConstantActual, "actual values have zero variance");

    const auto sums = simd::residual_sums(actual, predicted);
    const double n = static_cast<double>(actual.size());
    EvalReport rep;
    rep.r2 = 1.0 - sums.sum_sq / ss_tot;
    rep.rmse = std::sqrt(sums.sum_sq / n);
    rep.mae = sums.sum_abs / n;
    rep.mape = sums.sum_abs_rel / n;
    rep.residuals.reserve(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) rep.residuals.push_back({row_ids[i], predicted[i] - actual[i]});
    return rep;
}

} // namespace subgrade
