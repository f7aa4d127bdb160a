// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subgrade/dataset.hpp"
#include "subgrade/regressor.hpp"

namespace subgrade {

inline constexpr std::size_t kDefaultPdpPoints = 50;

/// Partial dependence of a model on one input, in natural units.
struct PdpCurve {
    std::string feature;
    std::vector<double> grid;   // strictly increasing feature values
    std::vector<double> values; // mean prediction at each grid value
    std::size_t n_background = 0;

    friend bool operator==(const PdpCurve&, const PdpCurve&) = default;
};

/// n_points evenly spaced values from the feature's min to max over d.
/// Throws UnknownFeature, DegenerateFeature (constant column) or
/// InvalidArgument (n_points < 2).
std::vector<double> pdp_grid(const Dataset& d, std::string_view feature, std::size_t n_points = kDefaultPdpPoints);

/// For each grid value: overwrite the feature in every background row, scale
/// with `scaler`, and average the model's predictions.
PdpCurve pdp_compute(const Regressor& model, const Dataset& background, const MinMaxScaler& scaler,
                     std::string_view feature, std::span<const double> grid);

} // namespace subgrade
