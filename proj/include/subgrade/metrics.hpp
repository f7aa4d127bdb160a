// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace subgrade {

inline constexpr double kMapeZeroTolerance = 1e-9;

/// 1 - SS_res / SS_tot, SS_tot about mean(actual). Throws ConstantActual.
double r2(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);
double mae(std::span<const double> actual, std::span<const double> predicted);
/// Mean |residual / actual| as a fraction. Throws NearZeroActual.
double mape(std::span<const double> actual, std::span<const double> predicted);

/// One evaluated sample; value = predicted - actual.
struct Residual {
    std::size_t row_id;
    double value;

    friend bool operator==(const Residual&, const Residual&) = default;
};

struct EvalReport {
    double r2 = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    std::vector<Residual> residuals;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted,
                    std::span<const std::size_t> row_ids);

} // namespace subgrade
