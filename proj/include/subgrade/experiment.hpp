// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subgrade/config.hpp"
#include "subgrade/dataset.hpp"
#include "subgrade/metrics.hpp"
#include "subgrade/regressor.hpp"
#include "subgrade/sensitivity.hpp"
#include "subgrade/serialize.hpp"
#include "subgrade/tuning.hpp"

namespace subgrade {

/// Builds the model-specific hyperparameters for one grid candidate.
SvrHyperParams svr_hyper(const Candidate& c);
BoostHyperParams boost_hyper(ModelKind kind, const Candidate& c, std::uint64_t seed);

/// Trainer that fits `kind` with the candidate's hyperparameters.
Trainer make_trainer(ModelKind kind, std::uint64_t seed);

/// JSON form of a model returned by make_trainer().
Json model_to_json(const Regressor& model);

/// Actual vs predicted for one phase, in split order.
struct PhaseData {
    std::vector<std::size_t> row_ids;
    std::vector<double> actual;
    std::vector<double> predicted;
};

struct TaskOptions {
    bool tune_only = false; // stop after the grid search
    bool pdp = true;
    std::size_t threads = 0;
};

struct TaskResult {
    ModelKind model = ModelKind::Svr;
    Target target = Target::CBR;
    std::uint64_t seed = 0;
    std::vector<std::size_t> train_ids; // split order
    std::vector<std::size_t> test_ids;
    MinMaxScaler scaler;
    TuningResult tuning;
    std::shared_ptr<const Regressor> fitted;
    bool converged = true;
    EvalReport train_report;
    EvalReport test_report;
    PhaseData train_data;
    PhaseData test_data;
    std::vector<PdpCurve> pdp; // one per input, canonical order
};

/// split -> scale -> tune -> refit -> evaluate -> partial dependence.
/// Errors are rethrown tagged with the stage that raised them.
TaskResult run_task(const Dataset& data, const RunConfig& cfg, ModelKind model, Target target, std::uint64_t seed,
                    const TaskOptions& options = {});

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0; // sample (n - 1)

    std::string formatted(int decimals = 4) const;
};

/// Mean and sample standard deviation. Requires at least two values.
MetricSummary mean_std(std::span<const double> values);

struct RepeatRun {
    std::uint64_t seed = 0;
    Candidate best_candidate;
    bool converged = true;
    double r2 = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
};

struct RepeatSummary {
    ModelKind model = ModelKind::Svr;
    Target target = Target::CBR;
    std::vector<RepeatRun> runs;
    MetricSummary r2;
    MetricSummary rmse;
    MetricSummary mae;
    MetricSummary mape;
};

RepeatSummary summarize_runs(ModelKind model, Target target, std::vector<RepeatRun> runs);

/// run_task over seeds base_seed .. base_seed + n_repeats - 1, aggregating test metrics.
RepeatSummary repeat_study(const Dataset& data, const RunConfig& cfg, ModelKind model, Target target,
                           std::size_t n_repeats);

/// Published results on the same 121-sample soil data, for comparison only.
struct LiteratureEntry {
    Target target;
    std::string_view source;
    std::string_view citation;
    std::string_view algorithm;
    std::size_t dataset_size;
    double r2;
    double rmse;
    double mae;
};

std::span<const LiteratureEntry> literature_table() noexcept;

struct StudyReport {
    RunConfig config;
    std::vector<TaskResult> tasks;      // models outer, targets inner
    std::vector<RepeatSummary> repeats; // same order, empty when not run

    bool converged() const;
};

/// Every configured (model, target) on the primary split seed cfg.base_seed.
StudyReport run_study(const Dataset& data, const RunConfig& cfg, bool with_repeats, const TaskOptions& options = {});

} // namespace subgrade
