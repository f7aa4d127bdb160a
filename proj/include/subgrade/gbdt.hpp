// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "subgrade/matrix.hpp"
#include "subgrade/regressor.hpp"

namespace subgrade {

class Rng;

enum class TreeShape { Axis, Oblivious };

std::string_view to_string(TreeShape s) noexcept;

/// Oblivious trees store 2^depth leaves, so their depth is capped.
inline constexpr std::size_t kMaxObliviousDepth = 24;
inline constexpr std::size_t kMaxAxisDepth = 64;

struct BoostHyperParams {
    std::size_t n_estimators = 100;
    double learning_rate = 0.1;
    std::size_t max_depth = 6;
    double reg_lambda = 1.0;       // L2 penalty on leaf weights
    double gamma_complexity = 0.0; // penalty per added leaf
    double subsample = 1.0;
    double colsample_bytree = 1.0;
    double min_child_weight = 1.0;
    TreeShape tree_shape = TreeShape::Axis;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const BoostHyperParams&, const BoostHyperParams&) = default;
};

/// First and second derivatives of the loss at the current predictions.
struct GradHess {
    std::vector<double> g;
    std::vector<double> h;
};

/// Squared loss 1/2 (y - pred)^2: g = pred - y, h = 1.
GradHess grad_hess_squared(std::span<const double> y, std::span<const double> pred);

/// -G / (H + lambda). Throws DegenerateDenominator if H + lambda <= 0.
double leaf_weight(double g_sum, double h_sum, double lambda);

/// 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma_complexity);

/// Axis-tree node. Internal when feature >= 0: rows with x[feature] < threshold go left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0; // leaves only

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// One level of an oblivious tree: every node at this depth tests the same rule.
struct ObliviousLevel {
    std::size_t feature = 0;
    double threshold = 0.0;

    friend bool operator==(const ObliviousLevel&, const ObliviousLevel&) = default;
};

class RegressionTree {
public:
    /// Single-leaf axis tree.
    static RegressionTree leaf(double weight);

    /// Preorder node list; node 0 is the root. Throws InvalidArgument on
    /// dangling, shared or unreachable nodes and on non-finite thresholds.
    static RegressionTree axis(std::vector<TreeNode> nodes);

    /// levels.size() = depth, leaf_weights.size() = 2^depth. Leaf index is the
    /// path read MSB-first with bit 1 meaning x[feature] >= threshold.
    static RegressionTree oblivious(std::vector<ObliviousLevel> levels, std::vector<double> leaf_weights);

    TreeShape shape() const noexcept { return shape_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const std::vector<ObliviousLevel>& levels() const noexcept { return levels_; }
    const std::vector<double>& leaf_weights() const noexcept { return leaf_weights_; }

    std::size_t leaf_count() const noexcept;
    std::size_t depth() const noexcept;

    double predict(std::span<const double> x) const;
    /// Leaf reached by x: node index (axis) or leaf slot (oblivious).
    std::size_t leaf_index(std::span<const double> x) const;

    /// Every (feature, threshold) the tree tests.
    std::vector<ObliviousLevel> split_rules() const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    TreeShape shape_ = TreeShape::Axis;
    std::vector<TreeNode> nodes_;
    std::vector<ObliviousLevel> levels_;
    std::vector<double> leaf_weights_;
};

/// Grow one tree on the given rows and feature subset (both ascending).
///
/// Axis: depth-first greedy exact search over midpoints between adjacent
/// distinct values; a split needs gain > 0 and both child hessian sums >=
/// min_child_weight. Oblivious: per level, the rule maximising the gain summed
/// over all current nodes, applied to every node. Gain ties go to the lower
/// feature index, then the lower threshold.
RegressionTree build_tree(const Matrix& x, const GradHess& grad, std::span<const std::size_t> rows,
                          std::span<const std::size_t> features, const BoostHyperParams& hyper);

/// Draws the row subsample and column sample from rng, then builds.
RegressionTree build_tree(const Matrix& x, const GradHess& grad, const BoostHyperParams& hyper, Rng& rng);

/// base_score + learning_rate * sum of tree outputs.
class BoostedEnsemble final : public StagedRegressor {
public:
    BoostedEnsemble() = default;
    BoostedEnsemble(double base_score, std::vector<RegressionTree> trees, BoostHyperParams hyper,
                    std::size_t n_features);

    double base_score() const noexcept { return base_score_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    const BoostHyperParams& hyper() const noexcept { return hyper_; }

    std::size_t dims() const override { return n_features_; }
    double predict(std::span<const double> x) const override;
    void predict_batch(const Matrix& x, std::span<double> out) const override;

    std::size_t stage_count() const override { return trees_.size(); }
    /// Bit-identical to predict_batch() of an ensemble holding only the first
    /// stages[s] trees.
    Matrix predict_staged(const Matrix& x, std::span<const std::size_t> stages) const override;

    friend bool operator==(const BoostedEnsemble& a, const BoostedEnsemble& b) {
        return a.base_score_ == b.base_score_ && a.trees_ == b.trees_ && a.hyper_ == b.hyper_ &&
               a.n_features_ == b.n_features_;
    }

private:
    double base_score_ = 0.0;
    std::vector<RegressionTree> trees_;
    BoostHyperParams hyper_;
    std::size_t n_features_ = 0;
};

/// Additive training: base_score = mean(y); each round fits a tree to the
/// squared-loss gradients at the current predictions on a fresh seeded
/// subsample. When `training_mse` is given it receives the training MSE after
/// each round.
BoostedEnsemble fit_boosted(const Matrix& x, std::span<const double> y, const BoostHyperParams& hyper,
                            std::vector<double>* training_mse = nullptr);

} // namespace subgrade
