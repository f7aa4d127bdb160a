// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "subgrade/error.hpp"
#include "subgrade/rng.hpp"
#include "subgrade/simd/kernels.hpp"

namespace subgrade {
namespace {

// Gains below this fraction of the parent score are rounding noise; the same
// margin separates a better candidate from a tie.
constexpr double kRelativeGainFloor = 1e-12;

double score(double g, double h, double lambda) {
    const double den = h + lambda;
    return den > 0.0 ? g * g / den : 0.0;
}

double midpoint(double lo, double hi) {
    const double m = 0.5 * (lo + hi);
    return m > lo ? m : hi;
}

struct SortedColumn {
    std::vector<std::pair<double, std::size_t>> entries; // (value, row)
};

SortedColumn sorted_column(const Matrix& x, std::span<const std::size_t> rows, std::size_t feature) {
    SortedColumn col;
    col.entries.reserve(rows.size());
    for (auto r : rows) col.entries.emplace_back(x(r, feature), r);
    std::sort(col.entries.begin(), col.entries.end());
    return col;
}

// ---- axis trees ---------------------------------------------------------

class AxisBuilder {
public:
    AxisBuilder(const Matrix& x, const GradHess& gh, std::span<const std::size_t> features,
                const BoostHyperParams& hp)
        : x_(x), gh_(gh), features_(features), hp_(hp) {}

    std::vector<TreeNode> build(std::vector<std::size_t> rows) {
        grow(std::move(rows), 0);
        return std::move(nodes_);
    }

private:
    struct Best {
        double gain = 0.0;
        int feature = -1;
        double threshold = 0.0;
    };

    int grow(std::vector<std::size_t> rows, std::size_t depth) {
        double g = 0.0, h = 0.0;
        for (auto r : rows) {
            g += gh_.g[r];
            h += gh_.h[r];
        }
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();

        Best best;
        if (depth < hp_.max_depth && rows.size() >= 2) best = find_split(rows, g, h);
        if (best.feature < 0) {
            nodes_[id].weight = leaf_weight(g, h, hp_.reg_lambda);
            return id;
        }

        std::vector<std::size_t> left, right;
        for (auto r : rows) (x_(r, best.feature) < best.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        nodes_[id].feature = best.feature;
        nodes_[id].threshold = best.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    Best find_split(std::span<const std::size_t> rows, double g, double h) const {
        const double lambda = hp_.reg_lambda;
        const double margin = kRelativeGainFloor * 0.5 * score(g, h, lambda);
        Best best;
        best.gain = std::max(0.0, margin);
        for (auto f : features_) {
            const auto col = sorted_column(x_, rows, f);
            double gl = 0.0, hl = 0.0;
            for (std::size_t k = 0; k + 1 < col.entries.size(); ++k) {
                const auto r = col.entries[k].second;
                gl += gh_.g[r];
                hl += gh_.h[r];
                const double v = col.entries[k].first, next = col.entries[k + 1].first;
                if (!(v < next)) continue;
                const double hr = h - hl;
                if (hl < hp_.min_child_weight || hr < hp_.min_child_weight) continue;
                const double gain = split_gain(gl, hl, g - gl, hr, lambda, hp_.gamma_complexity);
                if (gain > best.gain + (best.feature < 0 ? 0.0 : margin)) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = midpoint(v, next);
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const GradHess& gh_;
    std::span<const std::size_t> features_;
    const BoostHyperParams& hp_;
    std::vector<TreeNode> nodes_;
};

// ---- oblivious trees ----------------------------------------------------

class ObliviousBuilder {
public:
    ObliviousBuilder(const Matrix& x, const GradHess& gh, std::span<const std::size_t> rows,
                     std::span<const std::size_t> features, const BoostHyperParams& hp)
        : x_(x), gh_(gh), rows_(rows), hp_(hp), node_of_(x.rows(), 0) {
        for (auto f : features) columns_.push_back({f, sorted_column(x, rows, f)});
    }

    RegressionTree build() {
        std::vector<ObliviousLevel> levels;
        std::size_t n_nodes = 1;
        const std::size_t depth_cap = std::min(hp_.max_depth, kMaxObliviousDepth);
        while (levels.size() < depth_cap) {
            const auto rule = best_rule(n_nodes);
            if (!rule) break;
            levels.push_back(*rule);
            for (auto r : rows_) node_of_[r] = 2 * node_of_[r] + (x_(r, rule->feature) >= rule->threshold ? 1 : 0);
            n_nodes *= 2;
        }
        std::vector<double> g(n_nodes, 0.0), h(n_nodes, 0.0);
        for (auto r : rows_) {
            g[node_of_[r]] += gh_.g[r];
            h[node_of_[r]] += gh_.h[r];
        }
        std::vector<double> w(n_nodes, 0.0);
        for (std::size_t m = 0; m < n_nodes; ++m)
            if (h[m] > 0.0) w[m] = leaf_weight(g[m], h[m], hp_.reg_lambda); // empty leaves keep 0
        return RegressionTree::oblivious(std::move(levels), std::move(w));
    }

private:
    struct Column {
        std::size_t feature;
        SortedColumn sorted;
    };

    std::optional<ObliviousLevel> best_rule(std::size_t n_nodes) {
        const double lambda = hp_.reg_lambda, gamma = hp_.gamma_complexity, mcw = hp_.min_child_weight;
        std::vector<double> g(n_nodes, 0.0), h(n_nodes, 0.0);
        for (auto r : rows_) {
            g[node_of_[r]] += gh_.g[r];
            h[node_of_[r]] += gh_.h[r];
        }
        double parent = 0.0;
        for (std::size_t m = 0; m < n_nodes; ++m) parent += score(g[m], h[m], lambda);
        const double margin = kRelativeGainFloor * 0.5 * parent;
        double best_gain = std::max(0.0, margin);
        std::optional<ObliviousLevel> best;

        std::vector<double> gl(n_nodes), hl(n_nodes), contrib(n_nodes);
        std::vector<char> bad(n_nodes);
        auto violates = [&](std::size_t m) {
            const double hr = h[m] - hl[m];
            return (hl[m] > 0.0 && hl[m] < mcw) || (hr > 0.0 && hr < mcw);
        };
        for (const auto& col : columns_) {
            std::fill(gl.begin(), gl.end(), 0.0);
            std::fill(hl.begin(), hl.end(), 0.0);
            std::fill(contrib.begin(), contrib.end(), 0.0);
            std::size_t n_bad = 0;
            for (std::size_t m = 0; m < n_nodes; ++m) {
                bad[m] = violates(m);
                n_bad += static_cast<std::size_t>(bad[m]);
            }
            double total = 0.0;
            const auto& e = col.sorted.entries;
            for (std::size_t k = 0; k + 1 < e.size(); ++k) {
                const auto r = e[k].second;
                const auto m = node_of_[r];
                gl[m] += gh_.g[r];
                hl[m] += gh_.h[r];
                const double hr = h[m] - hl[m];
                // nodes with an empty side are carried down unsplit and add nothing
                const double c = (hl[m] > 0.0 && hr > 0.0)
                                     ? split_gain(gl[m], hl[m], g[m] - gl[m], hr, lambda, gamma)
                                     : 0.0;
                total += c - contrib[m];
                contrib[m] = c;
                const bool now_bad = violates(m);
                n_bad = n_bad - static_cast<std::size_t>(bad[m]) + static_cast<std::size_t>(now_bad);
                bad[m] = now_bad;

                const double v = e[k].first, next = e[k + 1].first;
                if (!(v < next) || n_bad > 0) continue;
                if (total > best_gain + (best ? margin : 0.0)) {
                    best_gain = total;
                    best = ObliviousLevel{col.feature, midpoint(v, next)};
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    const GradHess& gh_;
    std::span<const std::size_t> rows_;
    const BoostHyperParams& hp_;
    std::vector<Column> columns_;
    std::vector<std::size_t> node_of_;
};

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
}

} // namespace

std::string_view to_string(TreeShape s) noexcept { return s == TreeShape::Axis ? "axis" : "oblivious"; }

void BoostHyperParams::validate() const {
    if (n_estimators < 1 || n_estimators > 10000)
        throw Error(ErrorCode::InvalidArgument, "n_estimators must lie in [1, 10000]");
    check_finite(learning_rate, "learning_rate");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "learning_rate must lie in (0, 1]");
    const std::size_t cap = tree_shape == TreeShape::Oblivious ? kMaxObliviousDepth : kMaxAxisDepth;
    if (max_depth < 1 || max_depth > cap)
        throw Error(ErrorCode::InvalidArgument, "max_depth must lie in [1, " + std::to_string(cap) + "]");
    check_finite(reg_lambda, "reg_lambda");
    check_finite(gamma_complexity, "gamma_complexity");
    check_finite(min_child_weight, "min_child_weight");
    if (reg_lambda < 0.0 || gamma_complexity < 0.0 || min_child_weight < 0.0)
        throw Error(ErrorCode::InvalidArgument, "reg_lambda, gamma and min_child_weight must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw Error(ErrorCode::InvalidArgument, "subsample must lie in (0, 1]");
    if (!(colsample_bytree > 0.0 && colsample_bytree <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "colsample_bytree must lie in (0, 1]");
}

GradHess grad_hess_squared(std::span<const double> y, std::span<const double> pred) {
    if (y.size() != pred.size()) throw Error(ErrorCode::DimensionMismatch, "targets vs predictions");
    GradHess gh;
    gh.g.resize(y.size());
    gh.h.assign(y.size(), 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) gh.g[i] = pred[i] - y[i];
    return gh;
}

double leaf_weight(double g_sum, double h_sum, double lambda) {
    const double den = h_sum + lambda;
    if (!(den > 0.0)) throw Error(ErrorCode::DegenerateDenominator, "H + lambda must be > 0");
    return -g_sum / den;
}

double split_gain(double gl, double hl, double gr, double hr, double lambda, double gamma_complexity) {
    if (!(hl + lambda > 0.0) || !(hr + lambda > 0.0) || !(hl + hr + lambda > 0.0))
        throw Error(ErrorCode::DegenerateDenominator, "split gain denominators must be > 0");
    const double g = gl + gr;
    return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (hl + hr + lambda)) - gamma_complexity;
}

// ---- RegressionTree -----------------------------------------------------

RegressionTree RegressionTree::leaf(double weight) {
    TreeNode n;
    n.weight = weight;
    return axis({n});
}

RegressionTree RegressionTree::axis(std::vector<TreeNode> nodes) {
    if (nodes.empty()) throw Error(ErrorCode::InvalidArgument, "tree needs at least one node");
    const auto count = static_cast<int>(nodes.size());
    std::vector<char> seen(nodes.size(), 0);
    // preorder: children always follow their parent, each node referenced once
    for (int i = 0; i < count; ++i) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.is_leaf()) {
            if (!std::isfinite(n.weight)) throw Error(ErrorCode::InvalidArgument, "non-finite leaf weight");
            continue;
        }
        if (!std::isfinite(n.threshold)) throw Error(ErrorCode::InvalidArgument, "non-finite threshold");
        for (int c : {n.left, n.right}) {
            if (c <= i || c >= count) throw Error(ErrorCode::InvalidArgument, "child index out of preorder range");
            if (seen[static_cast<std::size_t>(c)]++) throw Error(ErrorCode::InvalidArgument, "node has two parents");
        }
    }
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!seen[i]) throw Error(ErrorCode::InvalidArgument, "unreachable node");
    RegressionTree t;
    t.shape_ = TreeShape::Axis;
    t.nodes_ = std::move(nodes);
    return t;
}

RegressionTree RegressionTree::oblivious(std::vector<ObliviousLevel> levels, std::vector<double> leaf_weights) {
    if (levels.size() > kMaxObliviousDepth) throw Error(ErrorCode::InvalidArgument, "oblivious tree too deep");
    if (leaf_weights.size() != (std::size_t{1} << levels.size()))
        throw Error(ErrorCode::InvalidArgument, "oblivious tree needs 2^depth leaf weights");
    for (const auto& l : levels)
        if (!std::isfinite(l.threshold)) throw Error(ErrorCode::InvalidArgument, "non-finite threshold");
    for (double w : leaf_weights)
        if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "non-finite leaf weight");
    RegressionTree t;
    t.shape_ = TreeShape::Oblivious;
    t.levels_ = std::move(levels);
    t.leaf_weights_ = std::move(leaf_weights);
    return t;
}

std::size_t RegressionTree::leaf_count() const noexcept {
    if (shape_ == TreeShape::Oblivious) return leaf_weights_.size();
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](auto& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const noexcept {
    if (shape_ == TreeShape::Oblivious) return levels_.size();
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t out = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        out = std::max(out, d[i]);
        if (!nodes_[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return out;
}

std::size_t RegressionTree::leaf_index(std::span<const double> x) const {
    if (shape_ == TreeShape::Oblivious) {
        std::size_t idx = 0;
        for (const auto& l : levels_) idx = 2 * idx + (x[l.feature] >= l.threshold ? 1 : 0);
        return idx;
    }
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& n = nodes_[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return i;
}

double RegressionTree::predict(std::span<const double> x) const {
    const auto idx = leaf_index(x);
    return shape_ == TreeShape::Oblivious ? leaf_weights_[idx] : nodes_[idx].weight;
}

std::vector<ObliviousLevel> RegressionTree::split_rules() const {
    if (shape_ == TreeShape::Oblivious) return levels_;
    std::vector<ObliviousLevel> out;
    for (const auto& n : nodes_)
        if (!n.is_leaf()) out.push_back({static_cast<std::size_t>(n.feature), n.threshold});
    return out;
}

// ---- building -----------------------------------------------------------

RegressionTree build_tree(const Matrix& x, const GradHess& grad, std::span<const std::size_t> rows,
                          std::span<const std::size_t> features, const BoostHyperParams& hyper) {
    if (rows.empty()) throw Error(ErrorCode::DegenerateInput, "tree needs at least one row");
    if (grad.g.size() != x.rows() || grad.h.size() != x.rows())
        throw Error(ErrorCode::DimensionMismatch, "gradient length vs rows");
    if (hyper.tree_shape == TreeShape::Oblivious) return ObliviousBuilder(x, grad, rows, features, hyper).build();
    AxisBuilder b(x, grad, features, hyper);
    return RegressionTree::axis(b.build(std::vector<std::size_t>(rows.begin(), rows.end())));
}

RegressionTree build_tree(const Matrix& x, const GradHess& grad, const BoostHyperParams& hyper, Rng& rng) {
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<std::size_t> rows, features;
    if (hyper.subsample < 1.0) {
        const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(hyper.subsample * n + 0.5)));
        rows = rng.sample_without_replacement(n, k);
    } else {
        rows.resize(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    if (hyper.colsample_bytree < 1.0) {
        const auto k =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(hyper.colsample_bytree * d + 0.5)));
        features = rng.sample_without_replacement(d, k);
    } else {
        features.resize(d);
        std::iota(features.begin(), features.end(), std::size_t{0});
    }
    return build_tree(x, grad, rows, features, hyper);
}

// ---- ensemble -----------------------------------------------------------

BoostedEnsemble::BoostedEnsemble(double base_score, std::vector<RegressionTree> trees, BoostHyperParams hyper,
                                 std::size_t n_features)
    : base_score_(base_score), trees_(std::move(trees)), hyper_(hyper), n_features_(n_features) {
    for (const auto& t : trees_)
        for (const auto& rule : t.split_rules())
            if (rule.feature >= n_features_) throw Error(ErrorCode::InvalidArgument, "tree tests unknown feature");
}

double BoostedEnsemble::predict(std::span<const double> x) const {
    if (x.size() != n_features_) throw Error(ErrorCode::DimensionMismatch, "ensemble input width");
    double acc = 0.0;
    for (const auto& t : trees_) acc += t.predict(x);
    return base_score_ + hyper_.learning_rate * acc;
}

void BoostedEnsemble::predict_batch(const Matrix& x, std::span<double> out) const {
    if (out.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "prediction buffer size");
    if (x.cols() != n_features_) throw Error(ErrorCode::DimensionMismatch, "ensemble input width");
    std::vector<double> acc(x.rows(), 0.0), leaf(x.rows());
    for (const auto& t : trees_) {
        for (std::size_t r = 0; r < x.rows(); ++r) leaf[r] = t.predict(x.row(r));
        // unit-scale axpy rounds exactly like acc += leaf, keeping parity with predict()
        simd::active().axpy(1.0, leaf.data(), acc.data(), acc.size());
    }
    for (std::size_t r = 0; r < x.rows(); ++r) out[r] = base_score_ + hyper_.learning_rate * acc[r];
}

Matrix BoostedEnsemble::predict_staged(const Matrix& x, std::span<const std::size_t> stages) const {
    if (x.cols() != n_features_) throw Error(ErrorCode::DimensionMismatch, "ensemble input width");
    for (std::size_t s = 0; s < stages.size(); ++s)
        if (stages[s] > trees_.size() || (s > 0 && stages[s] < stages[s - 1]))
            throw Error(ErrorCode::InvalidArgument, "stages must be ascending and <= tree count");
    Matrix out(x.rows(), stages.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double acc = 0.0;
        std::size_t k = 0;
        for (std::size_t s = 0; s < stages.size(); ++s) {
            for (; k < stages[s]; ++k) acc += trees_[k].predict(x.row(r));
            out(r, s) = base_score_ + hyper_.learning_rate * acc;
        }
    }
    return out;
}

BoostedEnsemble fit_boosted(const Matrix& x, std::span<const double> y, const BoostHyperParams& hyper,
                            std::vector<double>* training_mse) {
    hyper.validate();
    const std::size_t n = x.rows();
    if (n < 2) throw Error(ErrorCode::DegenerateInput, "boosting needs at least 2 samples");
    if (y.size() != n) throw Error(ErrorCode::DimensionMismatch, "targets vs rows");
    for (double v : y)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "boosting target");

    const double base = simd::sum(y) / static_cast<double>(n);
    std::vector<double> acc(n, 0.0), pred(n, base), out(n);
    std::vector<RegressionTree> trees;
    trees.reserve(hyper.n_estimators);
    if (training_mse) training_mse->clear();
    for (std::size_t k = 0; k < hyper.n_estimators; ++k) {
        const auto gh = grad_hess_squared(y, pred);
        Rng rng(hyper.seed, k + 1);
        trees.push_back(build_tree(x, gh, hyper, rng));
        const auto& t = trees.back();
        for (std::size_t r = 0; r < n; ++r) out[r] = t.predict(x.row(r));
        simd::active().axpy(1.0, out.data(), acc.data(), n);
        for (std::size_t r = 0; r < n; ++r) pred[r] = base + hyper.learning_rate * acc[r];
        if (training_mse) {
            double ss = 0.0;
            for (std::size_t r = 0; r < n; ++r) ss += (pred[r] - y[r]) * (pred[r] - y[r]);
            training_mse->push_back(ss / static_cast<double>(n));
        }
    }
    return BoostedEnsemble(base, std::move(trees), hyper, x.cols());
}

} // namespace subgrade
