// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include "subgrade/error.hpp"
#include "subgrade/rng.hpp"

namespace subgrade {
namespace {

constexpr std::uint64_t kFoldStream = 0xf01d;

} // namespace

std::optional<double> Candidate::find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    return std::nullopt;
}

double Candidate::get(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw Error(ErrorCode::ConfigError, "candidate has no value for '" + std::string(name) + "'");
}

double Candidate::get_or(std::string_view name, double fallback) const { return find(name).value_or(fallback); }

HyperGrid& HyperGrid::add(std::string name, std::vector<double> values) {
    axes_.push_back({std::move(name), std::move(values)});
    return *this;
}

const HyperGrid::Axis* HyperGrid::axis(std::string_view name) const {
    for (const auto& a : axes_)
        if (a.name == name) return &a;
    return nullptr;
}

std::size_t HyperGrid::size() const noexcept {
    if (axes_.empty()) return 0;
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.values.size();
    return n;
}

Candidate HyperGrid::candidate(std::size_t index) const {
    if (index >= size()) throw Error(ErrorCode::InvalidArgument, "candidate index out of range");
    Candidate c;
    c.names.resize(axes_.size());
    c.values.resize(axes_.size());
    for (std::size_t a = axes_.size(); a-- > 0;) {
        const auto& ax = axes_[a];
        c.names[a] = ax.name;
        c.values[a] = ax.values[index % ax.values.size()];
        index /= ax.values.size();
    }
    return c;
}

std::vector<Candidate> HyperGrid::candidates() const {
    std::vector<Candidate> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(candidate(i));
    return out;
}

void HyperGrid::validate(std::size_t budget) const {
    if (axes_.empty()) throw Error(ErrorCode::ConfigError, "grid has no axes");
    for (const auto& a : axes_) {
        if (a.values.empty()) throw Error(ErrorCode::ConfigError, "grid axis '" + a.name + "' is empty");
        for (double v : a.values)
            if (!std::isfinite(v)) throw Error(ErrorCode::ConfigError, "grid axis '" + a.name + "' has a non-finite value");
    }
    if (size() > budget)
        throw Error(ErrorCode::ConfigError,
                    "grid has " + std::to_string(size()) + " candidates, budget is " + std::to_string(budget));
}

std::vector<std::size_t> FoldAssignment::held_out(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldAssignment::kept(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
    std::vector<std::size_t> out(k, 0);
    for (auto f : assignment) ++out[f];
    return out;
}

FoldAssignment make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n)
        throw Error(ErrorCode::BadFoldCount, "fold count " + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
    Rng rng(seed, kFoldStream);
    const auto perm = rng.permutation(n);
    FoldAssignment fa;
    fa.k = k;
    fa.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) fa.assignment[perm[i]] = i % k;
    return fa;
}

std::vector<MinMaxScaler> fold_scalers(const Dataset& train, const FoldAssignment& folds) {
    if (folds.assignment.size() != train.size()) throw Error(ErrorCode::DimensionMismatch, "fold assignment length");
    std::vector<MinMaxScaler> out;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto kept = folds.kept(f);
        out.push_back(fit_scaler(train.x().select_rows(kept)));
    }
    return out;
}

namespace {

struct FoldData {
    Matrix x_kept; // scaled by the fold's own scaler
    std::vector<double> y_kept;
    Matrix x_held;
    std::vector<double> y_held;
};

std::vector<FoldData> prepare_folds(const Dataset& train, Target target, const FoldAssignment& folds) {
    if (folds.assignment.size() != train.size()) throw Error(ErrorCode::DimensionMismatch, "fold assignment length");
    const auto y = train.target(target);
    std::vector<FoldData> out;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto kept = folds.kept(f);
        const auto held = folds.held_out(f);
        const Matrix x_kept = train.x().select_rows(kept);
        const auto scaler = fit_scaler(x_kept);
        FoldData d;
        d.x_kept = scaler.transform(x_kept);
        d.x_held = scaler.transform(train.x().select_rows(held));
        for (auto i : kept) d.y_kept.push_back(y[i]);
        for (auto i : held) d.y_held.push_back(y[i]);
        out.push_back(std::move(d));
    }
    return out;
}

double fold_mse(std::span<const double> pred, std::span<const double> actual, std::size_t fold) {
    double ss = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) ss += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    const double mse = ss / static_cast<double>(actual.size());
    if (!std::isfinite(mse)) throw Error(ErrorCode::NonFiniteValue, "fold " + std::to_string(fold) + " MSE");
    return mse;
}

CvScore infeasible(std::string why) {
    CvScore s;
    s.feasible = false;
    s.failure = std::move(why);
    s.mean_mse = std::numeric_limits<double>::infinity();
    return s;
}

std::shared_ptr<const Regressor> fit_fold(const FoldData& d, const Candidate& c, const Trainer& trainer,
                                          std::size_t fold) {
    auto model = trainer(d.x_kept, d.y_kept, c);
    if (!model) throw Error(ErrorCode::InvalidArgument, "trainer returned no model");
    if (!model->converged()) throw Error(ErrorCode::DidNotConverge, "fold " + std::to_string(fold));
    return model;
}

CvScore score_folds(const std::vector<FoldData>& folds, const Candidate& candidate, const Trainer& trainer) {
    CvScore out;
    double total = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        try {
            const auto model = fit_fold(folds[f], candidate, trainer, f);
            const double mse = fold_mse(model->predict_all(folds[f].x_held), folds[f].y_held, f);
            out.fold_mses.push_back(mse);
            total += mse;
        } catch (const std::exception& e) {
            return infeasible(e.what());
        }
    }
    out.mean_mse = total / static_cast<double>(folds.size());
    return out;
}

std::optional<std::size_t> stage_value(const Candidate& c, std::string_view axis) {
    const double v = c.get(axis);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) return std::nullopt;
    return static_cast<std::size_t>(v);
}

// Candidates in `group` differ only on `axis`. One model per fold is trained
// at the largest stage value; every member is scored on its prefix. Falls back
// to separate fits whenever sharing is not possible.
std::vector<CvScore> score_group(const std::vector<FoldData>& folds, std::span<const Candidate> group,
                                 std::string_view axis, const Trainer& trainer) {
    auto separately = [&] {
        std::vector<CvScore> out;
        for (const auto& c : group) out.push_back(score_folds(folds, c, trainer));
        return out;
    };
    std::vector<std::size_t> stages;
    for (const auto& c : group) {
        const auto s = stage_value(c, axis);
        if (!s) return separately();
        stages.push_back(*s);
    }
    const auto top = static_cast<std::size_t>(std::ranges::max_element(stages) - stages.begin());
    std::vector<std::size_t> order(stages.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, {}, [&](std::size_t i) { return stages[i]; });
    std::vector<std::size_t> sorted;
    for (auto i : order) sorted.push_back(stages[i]);

    std::vector<CvScore> out(group.size());
    std::vector<double> totals(group.size(), 0.0);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::shared_ptr<const Regressor> model;
        try {
            model = fit_fold(folds[f], group[top], trainer, f);
        } catch (const std::exception&) {
            return separately();
        }
        const auto* staged = dynamic_cast<const StagedRegressor*>(model.get());
        if (!staged || staged->stage_count() != sorted.back()) return separately();
        const Matrix pred = staged->predict_staged(folds[f].x_held, sorted);
        std::vector<double> col(pred.rows());
        for (std::size_t s = 0; s < order.size(); ++s) {
            for (std::size_t r = 0; r < pred.rows(); ++r) col[r] = pred(r, s);
            auto& score = out[order[s]];
            if (!score.feasible) continue;
            try {
                const double mse = fold_mse(col, folds[f].y_held, f);
                score.fold_mses.push_back(mse);
                totals[order[s]] += mse;
            } catch (const std::exception& e) {
                score = infeasible(e.what());
            }
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].feasible) out[i].mean_mse = totals[i] / static_cast<double>(folds.size());
    return out;
}

} // namespace

CvScore cv_score(const Dataset& train, Target target, const Candidate& candidate, const FoldAssignment& folds,
                 const Trainer& trainer) {
    return score_folds(prepare_folds(train, target, folds), candidate, trainer);
}

TuningResult grid_search(const Dataset& train, Target target, const HyperGrid& grid, std::size_t k,
                         std::uint64_t seed, const Trainer& trainer, const SearchOptions& options) {
    grid.validate(options.budget);
    TuningResult res;
    res.folds = make_folds(train.size(), k, seed);
    res.scalers = fold_scalers(train, res.folds);
    const auto fold_data = prepare_folds(train, target, res.folds);

    const auto cands = grid.candidates();
    // work units: groups of candidate indices scored together
    std::vector<std::vector<std::size_t>> units;
    const auto& axes = grid.axes();
    const auto stage_it = std::ranges::find(axes, options.stage_axis, &HyperGrid::Axis::name);
    if (!options.stage_axis.empty() && stage_it != axes.end() && stage_it->values.size() > 1) {
        std::size_t stride = 1;
        for (auto it = stage_it + 1; it != axes.end(); ++it) stride *= it->values.size();
        const std::size_t len = stage_it->values.size();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if ((i / stride) % len != 0) continue;
            std::vector<std::size_t> g;
            for (std::size_t j = 0; j < len; ++j) g.push_back(i + j * stride);
            units.push_back(std::move(g));
        }
    } else {
        for (std::size_t i = 0; i < cands.size(); ++i) units.push_back({i});
    }

    std::vector<CvScore> scores(cands.size());
    auto run_unit = [&](const std::vector<std::size_t>& unit) {
        if (unit.size() == 1) {
            scores[unit[0]] = score_folds(fold_data, cands[unit[0]], trainer);
            return;
        }
        std::vector<Candidate> group;
        for (auto i : unit) group.push_back(cands[i]);
        auto s = score_group(fold_data, group, options.stage_axis, trainer);
        for (std::size_t j = 0; j < unit.size(); ++j) scores[unit[j]] = std::move(s[j]);
    };

    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, units.size());
    if (threads <= 1) {
        for (const auto& u : units) run_unit(u);
    } else {
        // results land at their candidate index, so completion order is irrelevant
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < units.size(); i = next++) run_unit(units[i]);
            });
        }
    }

    bool any = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (scores[i].feasible && (!any || scores[i].mean_mse < res.best_cv_mse)) {
            any = true;
            res.best_cv_mse = scores[i].mean_mse;
            res.best_index = i;
        }
        res.per_candidate.push_back({cands[i], std::move(scores[i])});
    }
    if (!any) throw Error(ErrorCode::AllCandidatesInfeasible, "no candidate produced a usable model");
    res.best_candidate = cands[res.best_index];
    return res;
}

} // namespace subgrade
