// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subgrade/dataset.hpp"
#include "subgrade/matrix.hpp"
#include "subgrade/regressor.hpp"

namespace subgrade {

/// One point of a hyperparameter grid: values keyed by axis name, in axis order.
struct Candidate {
    std::vector<std::string> names;
    std::vector<double> values;

    std::optional<double> find(std::string_view name) const;
    double get(std::string_view name) const; // throws ConfigError when absent
    double get_or(std::string_view name, double fallback) const;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Named axes of values; candidates enumerate the cartesian product with the
/// first axis varying slowest.
class HyperGrid {
public:
    struct Axis {
        std::string name;
        std::vector<double> values;

        friend bool operator==(const Axis&, const Axis&) = default;
    };

    HyperGrid() = default;
    explicit HyperGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {}

    HyperGrid& add(std::string name, std::vector<double> values);

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    const Axis* axis(std::string_view name) const;
    std::size_t size() const noexcept;

    Candidate candidate(std::size_t index) const;
    std::vector<Candidate> candidates() const;

    /// Throws ConfigError on an empty grid or axis, or when size() > budget.
    void validate(std::size_t budget = 100000) const;

    friend bool operator==(const HyperGrid&, const HyperGrid&) = default;

private:
    std::vector<Axis> axes_;
};

struct FoldAssignment {
    std::size_t k = 0;
    std::vector<std::size_t> assignment; // fold index per row

    std::vector<std::size_t> held_out(std::size_t fold) const;
    std::vector<std::size_t> kept(std::size_t fold) const;
    std::vector<std::size_t> fold_sizes() const;

    friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

/// Seeded permutation, then fold labels dealt round-robin over it.
FoldAssignment make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// Fits a model on (already scaled) inputs for one candidate.
using Trainer =
    std::function<std::shared_ptr<const Regressor>(const Matrix& x, std::span<const double> y, const Candidate&)>;

struct CvScore {
    double mean_mse = 0.0;
    std::vector<double> fold_mses;
    bool feasible = true;
    std::string failure; // first failing fold's reason when infeasible

    friend bool operator==(const CvScore&, const CvScore&) = default;
};

/// Scalers fitted on each fold's kept rows (identical for every candidate).
std::vector<MinMaxScaler> fold_scalers(const Dataset& train, const FoldAssignment& folds);

/// k-fold CV MSE of one candidate. Inputs are rescaled inside every fold from
/// the kept rows only. A trainer exception or a non-converged model marks the
/// candidate infeasible instead of throwing.
CvScore cv_score(const Dataset& train, Target target, const Candidate& candidate, const FoldAssignment& folds,
                 const Trainer& trainer);

struct CandidateScore {
    Candidate candidate;
    CvScore score;

    friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

struct TuningResult {
    Candidate best_candidate;
    std::size_t best_index = 0;
    double best_cv_mse = 0.0;
    std::vector<CandidateScore> per_candidate; // grid order
    FoldAssignment folds;
    std::vector<MinMaxScaler> scalers;

    friend bool operator==(const TuningResult&, const TuningResult&) = default;
};

struct SearchOptions {
    std::size_t threads = 0; // 0: hardware concurrency
    std::size_t budget = 100000;
    /// Integer axis along which candidates can share one fit per fold: the
    /// largest value is trained and smaller values are scored on its stage
    /// prefixes. Needs a trainer returning StagedRegressor models; scores are
    /// identical to training each candidate separately.
    std::string stage_axis;
};

/// Scores every candidate on the same folds and keeps the lowest mean MSE;
/// ties go to the earliest candidate. Infeasible candidates rank last; throws
/// AllCandidatesInfeasible when nothing is feasible.
TuningResult grid_search(const Dataset& train, Target target, const HyperGrid& grid, std::size_t k,
                         std::uint64_t seed, const Trainer& trainer, const SearchOptions& options = {});

} // namespace subgrade
