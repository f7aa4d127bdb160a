// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/sensitivity.hpp"

#include <algorithm>

#include "subgrade/error.hpp"
#include "subgrade/simd/kernels.hpp"

namespace subgrade {
namespace {

std::size_t feature_index(const Dataset& d, std::string_view feature) {
    auto idx = d.schema().input_index(feature);
    if (!idx) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + std::string(feature) + "'");
    return *idx;
}

} // namespace

std::vector<double> pdp_grid(const Dataset& d, std::string_view feature, std::size_t n_points) {
    const auto f = feature_index(d, feature);
    if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "PDP grid needs at least 2 points");
    const auto col = d.x().column(f);
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(lo < hi)) throw Error(ErrorCode::DegenerateFeature, "feature '" + std::string(feature) + "' is constant");
    std::vector<double> grid(n_points);
    const double step = (hi - lo) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) grid[i] = lo + step * static_cast<double>(i);
    grid.back() = hi;
    return grid;
}

PdpCurve pdp_compute(const Regressor& model, const Dataset& background, const MinMaxScaler& scaler,
                     std::string_view feature, std::span<const double> grid) {
    const auto f = feature_index(background, feature);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "PDP grid must be strictly increasing");

    PdpCurve curve;
    curve.feature = background.schema().input_names[f];
    curve.grid.assign(grid.begin(), grid.end());
    curve.n_background = background.size();
    curve.values.reserve(grid.size());

    Matrix x = background.x();
    std::vector<double> pred(x.rows());
    for (double v : grid) {
        for (std::size_t r = 0; r < x.rows(); ++r) x(r, f) = v;
        model.predict_batch(scaler.transform(x), pred);
        curve.values.push_back(simd::sum(pred) / static_cast<double>(pred.size()));
    }
    return curve;
}

} // namespace subgrade
