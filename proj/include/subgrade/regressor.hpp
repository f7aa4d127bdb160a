// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "subgrade/matrix.hpp"

namespace subgrade {

/// Anything that maps a feature row to a real prediction.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual std::size_t dims() const = 0;
    virtual double predict(std::span<const double> x) const = 0;

    /// out[r] = predict(x.row(r)); out.size() must equal x.rows().
    virtual void predict_batch(const Matrix& x, std::span<double> out) const;

    std::vector<double> predict_all(const Matrix& x) const;

    /// False when the underlying solver stopped before meeting its tolerance.
    virtual bool converged() const { return true; }
};

/// A model built in additive stages whose prefixes are valid models themselves.
class StagedRegressor : public Regressor {
public:
    virtual std::size_t stage_count() const = 0;

    /// rows x stages.size() predictions of the first stages[s] stages (ascending).
    virtual Matrix predict_staged(const Matrix& x, std::span<const std::size_t> stages) const = 0;
};

} // namespace subgrade
