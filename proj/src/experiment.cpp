// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/experiment.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "subgrade/error.hpp"
#include "subgrade/format.hpp"
#include "subgrade/gbdt.hpp"
#include "subgrade/svr.hpp"

namespace subgrade {
namespace {

std::size_t as_count(double v) { return static_cast<std::size_t>(std::llround(v)); }

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

constexpr std::string_view kOnyelowe2021a =
    "Onyelowe, K.C., Iqbal, M., Jalal, F.E., Onyia, M.E., Onuoha, I.C. Application of 3-algorithm ANN programming to "
    "predict the strength performance of hydrated-lime activated rice husk ash treated soil. Multiscale and "
    "Multidisciplinary Modeling, Experiments and Design 4, 259-274 (2021).";
constexpr std::string_view kOnyelowe2021b =
    "Onyelowe, K., Alaneme, G., Onyia, M., et al. Comparative modeling of strength properties of hydrated-lime "
    "activated rice-husk-ash (HARHA) modified soft soil for pavement construction purposes by artificial neural "
    "network (ANN) and fuzzy logic (FL). Jurnal Kejuruteraan 33(2), 365-384 (2021).";

constexpr LiteratureEntry kLiterature[] = {
    {Target::CBR, "Onyelowe et al. (2021a)", kOnyelowe2021a, "ANN", 121, 0.9994, 1.1900, 0.1649},
    {Target::CBR, "Onyelowe et al. (2021b)", kOnyelowe2021b, "ANN", 121, 0.9987, 0.4346, 0.2987},
    {Target::CBR, "Onyelowe et al. (2021b)", kOnyelowe2021b, "Fuzzy Logic", 121, 0.9921, 0.5561, 0.3213},
    {Target::UCS, "Onyelowe et al. (2021a)", kOnyelowe2021a, "ANN", 121, 0.9350, 1.1900, 1.2700},
    {Target::UCS, "Onyelowe et al. (2021b)", kOnyelowe2021b, "ANN", 121, 0.9992, 0.5570, 1.3230},
    {Target::UCS, "Onyelowe et al. (2021b)", kOnyelowe2021b, "Fuzzy Logic", 121, 0.9981, 0.8152, 0.3145},
    {Target::R, "Onyelowe et al. (2021a)", kOnyelowe2021a, "ANN", 121, 0.9900, 1.1900, 0.0380},
    {Target::R, "Onyelowe et al. (2021b)", kOnyelowe2021b, "ANN", 121, 0.9970, 0.2545, 0.2033},
    {Target::R, "Onyelowe et al. (2021b)", kOnyelowe2021b, "Fuzzy Logic", 121, 0.9810, 0.6251, 0.4852},
};

PhaseData phase_data(const Dataset& scaled, Target target, const Regressor& model) {
    PhaseData p;
    p.row_ids = scaled.row_ids();
    p.actual = scaled.target(target);
    p.predicted = model.predict_all(scaled.x());
    return p;
}

} // namespace

SvrHyperParams svr_hyper(const Candidate& c) {
    SvrHyperParams h;
    h.c = c.get_or("c", h.c);
    h.epsilon = c.get_or("epsilon", h.epsilon);
    h.kernel.gamma = c.get_or("gamma", h.kernel.gamma);
    h.tolerance = c.get_or("tolerance", h.tolerance);
    h.max_passes = as_count(c.get_or("max_passes", 0.0));
    h.validate();
    return h;
}

BoostHyperParams boost_hyper(ModelKind kind, const Candidate& c, std::uint64_t seed) {
    if (kind == ModelKind::Svr) throw Error(ErrorCode::InvalidArgument, "svr has no boosting hyperparameters");
    BoostHyperParams h;
    h.tree_shape = kind == ModelKind::Oblivious ? TreeShape::Oblivious : TreeShape::Axis;
    h.seed = seed;
    h.n_estimators = as_count(c.get_or("n_estimators", static_cast<double>(h.n_estimators)));
    h.learning_rate = c.get_or("learning_rate", h.learning_rate);
    double depth = c.get_or("max_depth", static_cast<double>(h.max_depth));
    double lambda = c.get_or("reg_lambda", h.reg_lambda);
    if (kind == ModelKind::Oblivious) {
        depth = c.get_or("depth", depth);
        lambda = c.get_or("l2_leaf_reg", lambda);
    }
    h.max_depth = as_count(depth);
    h.reg_lambda = lambda;
    h.subsample = c.get_or("subsample", h.subsample);
    h.colsample_bytree = c.get_or("colsample_bytree", h.colsample_bytree);
    h.gamma_complexity = c.get_or("gamma_complexity", h.gamma_complexity);
    h.min_child_weight = c.get_or("min_child_weight", h.min_child_weight);
    h.validate();
    return h;
}

Trainer make_trainer(ModelKind kind, std::uint64_t seed) {
    if (kind == ModelKind::Svr) {
        return [seed](const Matrix& x, std::span<const double> y, const Candidate& c) -> std::shared_ptr<const Regressor> {
            return std::make_shared<SvrModel>(fit_svr(x, y, svr_hyper(c), seed));
        };
    }
    return [kind, seed](const Matrix& x, std::span<const double> y, const Candidate& c) -> std::shared_ptr<const Regressor> {
        return std::make_shared<BoostedEnsemble>(fit_boosted(x, y, boost_hyper(kind, c, seed)));
    };
}

Json model_to_json(const Regressor& model) {
    if (const auto* s = dynamic_cast<const SvrModel*>(&model)) return Json{{"kind", "svr"}, {"model", to_json(*s)}};
    if (const auto* e = dynamic_cast<const BoostedEnsemble*>(&model))
        return Json{{"kind", "boosted"}, {"model", to_json(*e)}};
    throw Error(ErrorCode::InvalidArgument, "model type has no JSON form");
}

TaskResult run_task(const Dataset& data, const RunConfig& cfg, ModelKind model, Target target, std::uint64_t seed,
                    const TaskOptions& options) {
    TaskResult r;
    r.model = model;
    r.target = target;
    r.seed = seed;

    auto [train, test] = in_stage("split", [&] { return split(data, SplitSpec{cfg.train_fraction, seed}); });
    r.train_ids = train.row_ids();
    r.test_ids = test.row_ids();

    r.scaler = in_stage("scale", [&] { return fit_scaler(train); });

    const Trainer trainer = make_trainer(model, seed);
    r.tuning = in_stage("tune", [&] {
        SearchOptions so;
        so.threads = options.threads ? options.threads : cfg.threads;
        if (model != ModelKind::Svr) so.stage_axis = "n_estimators";
        return grid_search(train, target, cfg.grid(model), cfg.cv_k, seed, trainer, so);
    });
    if (options.tune_only) return r;

    const Dataset train_s = r.scaler.transform(train);
    r.fitted = in_stage("train", [&] {
        const auto y = train_s.target(target);
        return trainer(train_s.x(), y, r.tuning.best_candidate);
    });
    r.converged = r.fitted->converged();

    in_stage("evaluate", [&] {
        r.train_data = phase_data(train_s, target, *r.fitted);
        r.train_report = evaluate(r.train_data.actual, r.train_data.predicted, r.train_data.row_ids);
        const Dataset test_s = r.scaler.transform(test);
        r.test_data = phase_data(test_s, target, *r.fitted);
        r.test_report = evaluate(r.test_data.actual, r.test_data.predicted, r.test_data.row_ids);
    });

    if (options.pdp) {
        in_stage("pdp", [&] {
            for (const auto& name : train.schema().input_names) {
                std::vector<double> grid;
                try {
                    grid = pdp_grid(train, name, cfg.pdp_points);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::DegenerateFeature) continue;
                    throw;
                }
                r.pdp.push_back(pdp_compute(*r.fitted, train, r.scaler, name, grid));
            }
        });
    }
    return r;
}

std::string MetricSummary::formatted(int decimals) const { return format_mean_std(mean, std, decimals); }

MetricSummary mean_std(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::InvalidArgument, "mean/std needs at least two values");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

RepeatSummary summarize_runs(ModelKind model, Target target, std::vector<RepeatRun> runs) {
    RepeatSummary s;
    s.model = model;
    s.target = target;
    s.runs = std::move(runs);
    auto collect = [&](double RepeatRun::*field) {
        std::vector<double> v;
        for (const auto& run : s.runs) v.push_back(run.*field);
        return mean_std(v);
    };
    s.r2 = collect(&RepeatRun::r2);
    s.rmse = collect(&RepeatRun::rmse);
    s.mae = collect(&RepeatRun::mae);
    s.mape = collect(&RepeatRun::mape);
    return s;
}

RepeatSummary repeat_study(const Dataset& data, const RunConfig& cfg, ModelKind model, Target target,
                           std::size_t n_repeats) {
    if (n_repeats < 2) throw Error(ErrorCode::ConfigError, "repeat study needs at least two repeats");
    std::vector<RepeatRun> runs;
    for (std::size_t i = 0; i < n_repeats; ++i) {
        const std::uint64_t seed = cfg.base_seed + i;
        TaskOptions opts;
        opts.pdp = false;
        TaskResult t;
        try {
            t = run_task(data, cfg, model, target, seed, opts);
        } catch (const Error& e) {
            throw Error(e.code(), e.detail(), "repeat seed " + std::to_string(seed) + (e.stage().empty() ? "" : "/" + e.stage()));
        }
        runs.push_back({seed, t.tuning.best_candidate, t.converged, t.test_report.r2, t.test_report.rmse,
                        t.test_report.mae, t.test_report.mape});
    }
    return summarize_runs(model, target, std::move(runs));
}

std::span<const LiteratureEntry> literature_table() noexcept { return kLiterature; }

bool StudyReport::converged() const {
    for (const auto& t : tasks)
        if (!t.converged) return false;
    for (const auto& r : repeats)
        for (const auto& run : r.runs)
            if (!run.converged) return false;
    return true;
}

StudyReport run_study(const Dataset& data, const RunConfig& cfg, bool with_repeats, const TaskOptions& options) {
    StudyReport study;
    study.config = cfg;
    for (auto m : cfg.models)
        for (auto t : cfg.targets) study.tasks.push_back(run_task(data, cfg, m, t, cfg.base_seed, options));
    if (with_repeats)
        for (auto m : cfg.models)
            for (auto t : cfg.targets) study.repeats.push_back(repeat_study(data, cfg, m, t, cfg.repeats));
    return study;
}

} // namespace subgrade
