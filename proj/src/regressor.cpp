// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/regressor.hpp"

#include "subgrade/error.hpp"

namespace subgrade {

void Regressor::predict_batch(const Matrix& x, std::span<double> out) const {
    if (out.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "prediction buffer size");
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
}

std::vector<double> Regressor::predict_all(const Matrix& x) const {
    std::vector<double> out(x.rows());
    predict_batch(x, out);
    return out;
}

} // namespace subgrade
