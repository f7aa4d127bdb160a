// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "subgrade/error.hpp"
#include "subgrade/gbdt.hpp"
#include "subgrade/metrics.hpp"
#include "subgrade/rng.hpp"
#include "support/oracles.hpp"

using namespace subgrade;

namespace {

std::vector<std::size_t> iota_n(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

GradHess unit_hess(std::vector<double> g) {
    GradHess gh;
    gh.h.assign(g.size(), 1.0);
    gh.g = std::move(g);
    return gh;
}

// Rows of x grouped by the leaf they reach.
std::map<std::size_t, std::vector<std::size_t>> leaf_members(const RegressionTree& t, const Matrix& x) {
    std::map<std::size_t, std::vector<std::size_t>> out;
    for (std::size_t r = 0; r < x.rows(); ++r) out[t.leaf_index(x.row(r))].push_back(r);
    return out;
}

Matrix distinct_matrix(Rng& rng, std::size_t n, std::size_t d) {
    // continuous draws are distinct with probability one; rounding keeps a few ties per column
    Matrix x(n, d);
    for (auto& v : x.data()) v = std::round(rng.uniform(0, 1) * 1000.0) / 1000.0;
    for (std::size_t r = 0; r < n; ++r) x(r, 0) = static_cast<double>(r) + rng.uniform(0, 0.5);
    return x;
}

BoostHyperParams memorizing(TreeShape shape = TreeShape::Axis) {
    BoostHyperParams hp;
    hp.n_estimators = 1;
    hp.learning_rate = 1.0;
    hp.max_depth = shape == TreeShape::Axis ? kMaxAxisDepth : 12;
    hp.reg_lambda = 0.0;
    hp.gamma_complexity = 0.0;
    hp.min_child_weight = 0.0;
    hp.tree_shape = shape;
    return hp;
}

} // namespace

TEST_CASE("squared loss derivatives") {
    const std::vector<double> y{1.0, 3.0}, zero{0.0, 0.0};
    const auto gh = grad_hess_squared(y, zero);
    CHECK(gh.g == std::vector<double>{-1.0, -3.0});
    CHECK(gh.h == std::vector<double>{1.0, 1.0});
    for (double g : grad_hess_squared(y, y).g) CHECK(g == 0.0);

    Rng rng(21);
    const auto yy = oracle::random_vector(rng, 200, -5, 5);
    const auto pp = oracle::random_vector(rng, 200, -5, 5);
    const auto fd = grad_hess_squared(yy, pp);
    const double step = 1e-6;
    auto loss = [](double y1, double p) { return 0.5 * (y1 - p) * (y1 - p); };
    for (std::size_t i = 0; i < yy.size(); ++i) {
        const double d1 = (loss(yy[i], pp[i] + step) - loss(yy[i], pp[i] - step)) / (2 * step);
        const double d2 = (loss(yy[i], pp[i] + step) - 2 * loss(yy[i], pp[i]) + loss(yy[i], pp[i] - step)) /
                          (step * step);
        CHECK(std::fabs(fd.g[i] - d1) <= 1e-4);
        CHECK(std::fabs(fd.h[i] - d2) <= 1e-1 * std::max(1.0, std::fabs(loss(yy[i], pp[i]))));
    }
}

TEST_CASE("leaf weight closed form") {
    CHECK(leaf_weight(0.0, 3.0, 1.0) == 0.0);
    // residuals y - pred = [1, 3]
    CHECK(leaf_weight(-4.0, 2.0, 0.0) == 2.0);
    const std::vector<oracle::Stat> s{{-1.0, 1.0}, {-3.0, 1.0}};
    CHECK(std::fabs(oracle::leaf_argmin(s, 0.0) - 2.0) <= 1e-12);
    CHECK(std::fabs(leaf_weight(-4.0, 2.0, 1e12)) <= 1e-9);
    CHECK_THROWS_AS(leaf_weight(1.0, 0.0, 0.0), Error);
    try {
        leaf_weight(1.0, 1.0, -2.0);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDenominator);
    }
}

TEST_CASE("split gain closed form") {
    CHECK(split_gain(-2.0, 1.0, 2.0, 1.0, 1.0, 0.0) == 2.0);
    Rng rng(22);
    for (int t = 0; t < 200; ++t) {
        const double g = rng.uniform(-10, 10), h = rng.uniform(0.1, 10), gamma = rng.uniform(0, 5);
        CHECK(split_gain(g, h, g, h, 0.0, gamma) == -gamma);
    }
    CHECK_THROWS_AS(split_gain(1.0, 0.0, 1.0, 1.0, 0.0, 0.0), Error);
}

TEST_CASE("leaf weight and split gain agree with brute-force leaf objectives") {
    Rng rng(23);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t nl = 1 + rng.uniform_index(6), nr = 1 + rng.uniform_index(6);
        std::vector<oracle::Stat> left, right;
        for (std::size_t i = 0; i < nl; ++i) left.push_back({rng.uniform(-3, 3), rng.uniform(0.05, 2)});
        for (std::size_t i = 0; i < nr; ++i) right.push_back({rng.uniform(-3, 3), rng.uniform(0.05, 2)});
        const double lambda = rng.uniform(0, 3), gamma = rng.uniform(0, 1);
        auto sums = [](const std::vector<oracle::Stat>& s) {
            double g = 0, h = 0;
            for (const auto& v : s) {
                g += v.g;
                h += v.h;
            }
            return std::pair{g, h};
        };
        const auto [gl, hl] = sums(left);
        const auto [gr, hr] = sums(right);
        std::vector<oracle::Stat> all = left;
        all.insert(all.end(), right.begin(), right.end());

        CHECK(oracle::close_rel(leaf_weight(gl, hl, lambda), oracle::leaf_argmin(left, lambda), 1e-10, 1e-10));
        const double before = oracle::leaf_min(all, lambda);
        const double after = oracle::leaf_min(left, lambda) + oracle::leaf_min(right, lambda);
        const double want = before - after - gamma;
        CHECK(oracle::close_rel(split_gain(gl, hl, gr, hr, lambda, gamma), want, 1e-10, 1e-10));
    }
}

TEST_CASE("equal residuals give a single pooled leaf") {
    Rng rng(24);
    const Matrix x = oracle::random_matrix(rng, 15, 3);
    const auto gh = unit_hess(std::vector<double>(15, -0.75));
    BoostHyperParams hp;
    hp.reg_lambda = 0.5;
    const auto rows = iota_n(15), feats = iota_n(3);
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        hp.tree_shape = shape;
        const auto t = build_tree(x, gh, rows, feats, hp);
        CHECK(t.leaf_count() == 1);
        CHECK(t.predict(x.row(0)) == leaf_weight(-0.75 * 15, 15.0, 0.5));
    }
}

TEST_CASE("step data splits at the class midpoint") {
    Matrix x(10, 1);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i + 1);
        y[i] = i < 5 ? -1.0 : 1.0;
    }
    const auto gh = grad_hess_squared(y, std::vector<double>(10, 0.0));
    BoostHyperParams hp;
    hp.max_depth = 1;
    hp.reg_lambda = 0.0;
    hp.min_child_weight = 0.0;
    const auto t = build_tree(x, gh, iota_n(10), iota_n(1), hp);
    REQUIRE(t.split_rules().size() == 1);

    // exhaustive threshold enumeration
    double best_gain = -1, best_thr = 0;
    for (std::size_t k = 0; k + 1 < 10; ++k) {
        const double thr = 0.5 * (x(k, 0) + x(k + 1, 0));
        std::vector<oracle::Stat> l, r, all;
        for (std::size_t i = 0; i < 10; ++i) {
            (x(i, 0) < thr ? l : r).push_back({gh.g[i], gh.h[i]});
            all.push_back({gh.g[i], gh.h[i]});
        }
        const double gain = oracle::leaf_min(all, 0) - oracle::leaf_min(l, 0) - oracle::leaf_min(r, 0);
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_thr = thr;
        }
    }
    CHECK(best_thr == 5.5);
    CHECK(t.split_rules()[0].threshold == best_thr);
    CHECK(t.predict(std::vector<double>{1.0}) == -1.0);
    CHECK(t.predict(std::vector<double>{10.0}) == 1.0);
}

TEST_CASE("depth-one axis split matches exhaustive search on random data") {
    Rng rng(25);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 4 + rng.uniform_index(10), d = 1 + rng.uniform_index(3);
        const Matrix x = oracle::random_matrix(rng, n, d);
        const auto g = oracle::random_vector(rng, n, -2, 2);
        const auto gh = unit_hess(g);
        BoostHyperParams hp;
        hp.max_depth = 1;
        hp.reg_lambda = rng.uniform(0, 2);
        hp.min_child_weight = 0.0;
        const auto tree = build_tree(x, gh, iota_n(n), iota_n(d), hp);
        const auto levels = oracle::oblivious_levels(x, gh.g, gh.h, hp.reg_lambda, 1, 0.0);
        REQUIRE(tree.split_rules().size() == levels.size());
        if (!levels.empty()) {
            CHECK(tree.split_rules()[0].feature == levels[0].feature);
            CHECK(tree.split_rules()[0].threshold == doctest::Approx(levels[0].threshold).epsilon(1e-15));
        }
    }
}

TEST_CASE("oblivious depth-two tree matches the exhaustive level oracle") {
    Rng rng(26);
    for (int t = 0; t < 100; ++t) {
        const Matrix x = oracle::random_matrix(rng, 6, 3);
        const auto gh = unit_hess(oracle::random_vector(rng, 6, -2, 2));
        BoostHyperParams hp;
        hp.max_depth = 2;
        hp.reg_lambda = rng.uniform(0, 1);
        hp.min_child_weight = t % 2 ? 0.0 : 1.0;
        hp.tree_shape = TreeShape::Oblivious;
        const auto tree = build_tree(x, gh, iota_n(6), iota_n(3), hp);
        const auto want = oracle::oblivious_levels(x, gh.g, gh.h, hp.reg_lambda, 2, hp.min_child_weight);
        REQUIRE(tree.levels().size() == want.size());
        for (std::size_t l = 0; l < want.size(); ++l) {
            CHECK(tree.levels()[l].feature == want[l].feature);
            CHECK(tree.levels()[l].threshold == doctest::Approx(want[l].threshold).epsilon(1e-15));
        }
    }
}

TEST_CASE("leaf weights are the closed form of their members and locally optimal") {
    Rng rng(27);
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        for (int t = 0; t < 10; ++t) {
            const Matrix x = oracle::random_matrix(rng, 60, 4);
            GradHess gh;
            gh.g = oracle::random_vector(rng, 60, -3, 3);
            gh.h = oracle::random_vector(rng, 60, 0.2, 2);
            BoostHyperParams hp;
            hp.max_depth = 4;
            hp.reg_lambda = rng.uniform(0, 2);
            hp.tree_shape = shape;
            const auto tree = build_tree(x, gh, iota_n(60), iota_n(4), hp);
            CHECK(tree.leaf_count() <= std::size_t{1} << hp.max_depth);
            for (const auto& [leaf, members] : leaf_members(tree, x)) {
                std::vector<oracle::Stat> s;
                double g = 0, h = 0;
                for (auto r : members) {
                    s.push_back({gh.g[r], gh.h[r]});
                    g += gh.g[r];
                    h += gh.h[r];
                }
                const double w = tree.predict(x.row(members.front()));
                CHECK(w == leaf_weight(g, h, hp.reg_lambda));
                const double here = oracle::leaf_objective(s, hp.reg_lambda, w);
                CHECK(oracle::leaf_objective(s, hp.reg_lambda, w + 1e-3) >= here);
                CHECK(oracle::leaf_objective(s, hp.reg_lambda, w - 1e-3) >= here);
            }
        }
    }
}

TEST_CASE("memorizing settings fit distinct inputs exactly") {
    Rng rng(28);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 10 + rng.uniform_index(90);
        const Matrix x = distinct_matrix(rng, n, 1 + rng.uniform_index(4));
        const auto y = oracle::random_vector(rng, n, -10, 10);
        const auto model = fit_boosted(x, y, memorizing());
        const auto pred = model.predict_all(x);
        CHECK(r2(y, pred) >= 1.0 - 1e-9);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(pred[i] - y[i]) <= 1e-9 * std::max(1.0, std::fabs(y[i])));
    }
}

TEST_CASE("a degenerate single tree predicts the mean") {
    Rng rng(29);
    const Matrix x = oracle::random_matrix(rng, 12, 2);
    const std::vector<double> y(12, 7.5);
    BoostHyperParams hp;
    hp.n_estimators = 1;
    const auto m = fit_boosted(x, y, hp);
    for (double p : m.predict_all(x)) CHECK(p == 7.5);
    hp.n_estimators = 0;
    CHECK_THROWS_AS(fit_boosted(x, y, hp), Error);
}

TEST_CASE("training loss does not increase across rounds") {
    Rng rng(30);
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        const Matrix x = oracle::random_matrix(rng, 80, 5);
        auto y = oracle::random_vector(rng, 80, 0, 1);
        for (std::size_t i = 0; i < 80; ++i) y[i] += 3 * x(i, 0) - 2 * x(i, 1) * x(i, 2);
        BoostHyperParams hp;
        hp.n_estimators = 60;
        hp.learning_rate = 0.3;
        hp.max_depth = 3;
        hp.tree_shape = shape;
        std::vector<double> mse;
        fit_boosted(x, y, hp, &mse);
        REQUIRE(mse.size() == 60);
        for (std::size_t k = 1; k < mse.size(); ++k) CHECK(mse[k] <= mse[k - 1] * (1 + 1e-12));
    }
}

TEST_CASE("fit is deterministic under sampling") {
    Rng rng(31);
    const Matrix x = oracle::random_matrix(rng, 50, 6);
    const auto y = oracle::random_vector(rng, 50, 0, 5);
    BoostHyperParams hp;
    hp.n_estimators = 30;
    hp.subsample = 0.7;
    hp.colsample_bytree = 0.5;
    hp.seed = 99;
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        hp.tree_shape = shape;
        const auto a = fit_boosted(x, y, hp), b = fit_boosted(x, y, hp);
        CHECK(a == b);
        auto other = hp;
        other.seed = 100;
        CHECK_FALSE(fit_boosted(x, y, other) == a);
    }
}

TEST_CASE("prediction is piecewise constant between thresholds") {
    Rng rng(32);
    const Matrix x = oracle::random_matrix(rng, 70, 3);
    auto y = oracle::random_vector(rng, 70, 0, 1);
    BoostHyperParams hp;
    hp.n_estimators = 20;
    hp.max_depth = 3;
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        hp.tree_shape = shape;
        const auto m = fit_boosted(x, y, hp);
        std::vector<std::vector<double>> cuts(3, {-1e300, 1e300});
        for (const auto& t : m.trees())
            for (const auto& rule : t.split_rules()) cuts[rule.feature].push_back(rule.threshold);
        for (auto& c : cuts) std::sort(c.begin(), c.end());
        for (int s = 0; s < 200; ++s) {
            auto q = oracle::random_vector(rng, 3, -0.2, 1.2);
            const double before = m.predict(q);
            const std::size_t f = rng.uniform_index(3);
            const auto& c = cuts[f];
            const auto hi = std::upper_bound(c.begin(), c.end(), q[f]);
            const double lo_v = std::max(*(hi - 1), -0.5), hi_v = std::min(*hi, 1.5);
            // stay inside [lo, hi): x >= threshold goes right, x < threshold left
            q[f] = std::nextafter(hi_v, lo_v) > lo_v ? rng.uniform(lo_v, std::nextafter(hi_v, lo_v)) : lo_v;
            CHECK(m.predict(q) == before);
        }
    }
}

TEST_CASE("batch and staged prediction match per-row prediction bit for bit") {
    Rng rng(33);
    const Matrix x = oracle::random_matrix(rng, 90, 4);
    const auto y = oracle::random_vector(rng, 90, -1, 1);
    BoostHyperParams hp;
    hp.n_estimators = 40;
    hp.learning_rate = 0.07;
    hp.max_depth = 4;
    hp.subsample = 0.8;
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        hp.tree_shape = shape;
        const auto m = fit_boosted(x, y, hp);
        const Matrix q = oracle::random_matrix(rng, 33, 4, -0.1, 1.1);
        std::vector<double> batch(33);
        m.predict_batch(q, batch);
        for (std::size_t r = 0; r < 33; ++r) CHECK(batch[r] == m.predict(q.row(r)));

        const std::vector<std::size_t> stages{0, 1, 5, 5, 17, 40};
        const Matrix staged = m.predict_staged(q, stages);
        for (std::size_t s = 0; s < stages.size(); ++s) {
            const std::vector<RegressionTree> head(m.trees().begin(), m.trees().begin() + stages[s]);
            const BoostedEnsemble prefix(m.base_score(), head, m.hyper(), 4);
            std::vector<double> want(33);
            prefix.predict_batch(q, want);
            for (std::size_t r = 0; r < 33; ++r) CHECK(staged(r, s) == want[r]);
        }
        CHECK_THROWS_AS(m.predict_staged(q, std::vector<std::size_t>{41}), Error);
    }
}

TEST_CASE("staged prefix equals a shorter fit") {
    Rng rng(34);
    const Matrix x = oracle::random_matrix(rng, 40, 3);
    const auto y = oracle::random_vector(rng, 40, 0, 3);
    BoostHyperParams hp;
    hp.n_estimators = 25;
    hp.subsample = 0.75;
    hp.colsample_bytree = 0.7;
    const auto full = fit_boosted(x, y, hp);
    auto short_hp = hp;
    short_hp.n_estimators = 9;
    const auto part = fit_boosted(x, y, short_hp);
    const std::vector<std::size_t> stages{9};
    const Matrix staged = full.predict_staged(x, stages);
    const auto want = part.predict_all(x);
    for (std::size_t r = 0; r < 40; ++r) CHECK(staged(r, 0) == want[r]);
}

TEST_CASE("large complexity penalty leaves single-leaf trees") {
    Rng rng(35);
    const Matrix x = oracle::random_matrix(rng, 30, 3);
    const auto y = oracle::random_vector(rng, 30, 0, 1);
    BoostHyperParams hp;
    hp.n_estimators = 5;
    hp.gamma_complexity = 1e6;
    for (auto shape : {TreeShape::Axis, TreeShape::Oblivious}) {
        hp.tree_shape = shape;
        const auto m = fit_boosted(x, y, hp);
        for (const auto& t : m.trees()) CHECK(t.leaf_count() == 1);
    }
}

TEST_CASE("ensemble prediction edge cases") {
    BoostHyperParams hp;
    hp.learning_rate = 0.25;
    const BoostedEnsemble empty(1.5, {}, hp, 2);
    CHECK(empty.predict(std::vector<double>{0.0, 0.0}) == 1.5);
    const BoostedEnsemble one(1.5, {RegressionTree::leaf(4.0)}, hp, 2);
    CHECK(one.predict(std::vector<double>{0.3, 0.3}) == 2.5);
    CHECK_THROWS_AS(one.predict(std::vector<double>{0.3}), Error);
}

TEST_CASE("tree construction rejects malformed structures") {
    const TreeNode leaf{-1, 0, -1, -1, 1.0};
    CHECK_NOTHROW(RegressionTree::axis({TreeNode{0, 0.5, 1, 2, 0}, leaf, leaf}));
    CHECK_THROWS_AS(RegressionTree::axis({TreeNode{0, 0.5, 1, 3, 0}, leaf, leaf}), Error);
    CHECK_THROWS_AS(RegressionTree::axis({TreeNode{0, 0.5, 1, 1, 0}, leaf, leaf}), Error);
    CHECK_THROWS_AS(RegressionTree::axis({TreeNode{0, 0.5, 1, 2, 0}, leaf, leaf, leaf}), Error);
    CHECK_THROWS_AS(RegressionTree::axis({TreeNode{0, std::nan(""), 1, 2, 0}, leaf, leaf}), Error);
    CHECK_THROWS_AS(RegressionTree::oblivious({ObliviousLevel{0, 0.5}}, {1.0, 2.0, 3.0}), Error);

    const auto t = RegressionTree::oblivious({{0, 0.5}, {1, 0.25}}, {1, 2, 3, 4});
    CHECK(t.predict(std::vector<double>{0.1, 0.1}) == 1);
    CHECK(t.predict(std::vector<double>{0.1, 0.3}) == 2);
    CHECK(t.predict(std::vector<double>{0.6, 0.1}) == 3);
    CHECK(t.predict(std::vector<double>{0.5, 0.25}) == 4);
}
