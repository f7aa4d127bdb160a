// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "subgrade/error.hpp"
#include "subgrade/format.hpp"

namespace subgrade {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

Json summary_json(const MetricSummary& m) {
    return Json{{"mean", m.mean}, {"std", m.std}, {"formatted", m.formatted()}};
}

void phase_rows(std::ostringstream& out, const TaskResult& t, const char* phase, const EvalReport& r) {
    out << phase << ',' << to_string(t.model) << ',' << to_string(t.target) << ',' << format_double(r.r2) << ','
        << format_double(r.rmse) << ',' << format_double(r.mae) << ',' << format_double(r.mape) << '\n';
}

std::string phase_csv(const PhaseData& p, bool with_residual) {
    std::ostringstream out;
    out << (with_residual ? "sample,row_id,actual,predicted,residual\n" : "row_id,actual,predicted\n");
    for (std::size_t i = 0; i < p.row_ids.size(); ++i) {
        if (with_residual) out << i + 1 << ',';
        out << p.row_ids[i] << ',' << format_double(p.actual[i]) << ',' << format_double(p.predicted[i]);
        if (with_residual) out << ',' << format_double(p.predicted[i] - p.actual[i]);
        out << '\n';
    }
    return out.str();
}

} // namespace

std::string task_stem(ModelKind model, Target target) {
    return std::string(to_string(model)) + "_" + lower(to_string(target));
}

Json to_json(const TaskResult& t) {
    Json pdp = Json::array();
    for (const auto& c : t.pdp) pdp.push_back(to_json(c));
    Json j{{"model", std::string(to_string(t.model))},
           {"target", std::string(to_string(t.target))},
           {"seed", t.seed},
           {"converged", t.converged},
           {"train_size", t.train_ids.size()},
           {"test_size", t.test_ids.size()},
           {"hyperparameters", to_json(t.tuning.best_candidate)},
           {"best_cv_mse", t.tuning.best_cv_mse},
           {"scaler", to_json(t.scaler)},
           {"train", to_json(t.train_report)},
           {"test", to_json(t.test_report)}};
    return j;
}

Json to_json(const RepeatSummary& r) {
    Json runs = Json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed},
                        {"hyperparameters", to_json(run.best_candidate)},
                        {"converged", run.converged},
                        {"r2", run.r2},
                        {"rmse", run.rmse},
                        {"mae", run.mae},
                        {"mape", run.mape}});
    return Json{{"model", std::string(to_string(r.model))},
                {"target", std::string(to_string(r.target))},
                {"n_repeats", r.runs.size()},
                {"r2", summary_json(r.r2)},
                {"rmse", summary_json(r.rmse)},
                {"mae", summary_json(r.mae)},
                {"mape", summary_json(r.mape)},
                {"runs", runs}};
}

Json literature_json() {
    Json rows = Json::array();
    for (const auto& e : literature_table())
        rows.push_back({{"target", std::string(to_string(e.target))},
                        {"source", std::string(e.source)},
                        {"algorithm", std::string(e.algorithm)},
                        {"dataset_size", e.dataset_size},
                        {"r2", e.r2},
                        {"rmse", e.rmse},
                        {"mae", e.mae},
                        {"citation", std::string(e.citation)}});
    return Json{{"note", "Published values for reference; not reproduced by this artifact."}, {"rows", rows}};
}

Json study_json(const StudyReport& s) {
    Json cfg = to_json(s.config);
    cfg.erase("output_dir");
    cfg.erase("threads");
    Json tasks = Json::array();
    for (const auto& t : s.tasks) tasks.push_back(to_json(t));
    Json repeats = Json::array();
    for (const auto& r : s.repeats) repeats.push_back(to_json(r));
    return Json{{"partial", !s.converged()},
                {"config", cfg},
                {"tasks", tasks},
                {"repeats", repeats},
                {"literature", literature_json()}};
}

std::string metrics_csv(std::span<const TaskResult> tasks) {
    std::ostringstream out;
    out << "phase,model,target,r2,rmse,mae,mape\n";
    for (const auto& t : tasks) {
        phase_rows(out, t, "train", t.train_report);
        phase_rows(out, t, "test", t.test_report);
    }
    return out.str();
}

std::string comparison_markdown(const StudyReport& s) {
    std::ostringstream out;
    out << "# Comparison with published results\n\n"
        << "Literature rows are static reference values, not reproduced by this artifact. "
        << "Run rows are test-partition metrics from this run (seed " << s.config.base_seed << ").\n";
    for (auto target : kAllTargets) {
        out << "\n## " << to_string(target) << "\n\n"
            << "| Source | Algorithm | Dataset size | R2 | RMSE | MAE | MAPE |\n"
            << "|---|---|---|---|---|---|---|\n";
        for (const auto& e : literature_table()) {
            if (e.target != target) continue;
            out << "| " << e.source << " | " << e.algorithm << " | " << e.dataset_size << " | "
                << format_fixed(e.r2, 4) << " | " << format_fixed(e.rmse, 4) << " | " << format_fixed(e.mae, 4)
                << " | - |\n";
        }
        for (const auto& t : s.tasks) {
            if (t.target != target) continue;
            const auto& r = t.test_report;
            out << "| this run | " << to_string(t.model) << " | " << t.train_ids.size() + t.test_ids.size() << " | "
                << format_fixed(r.r2, 4) << " | " << format_fixed(r.rmse, 4) << " | " << format_fixed(r.mae, 4)
                << " | " << format_fixed(r.mape, 4) << " |\n";
        }
    }
    out << "\n## References\n\n";
    std::vector<std::string_view> cited;
    for (const auto& e : literature_table()) {
        if (std::ranges::find(cited, e.source) != cited.end()) continue;
        cited.push_back(e.source);
        out << "- " << e.source << ": " << e.citation << "\n";
    }
    return out.str();
}

std::string repeat_csv(std::span<const RepeatSummary> repeats) {
    std::ostringstream out;
    out << "model,target,metric,mean,std,formatted\n";
    for (const auto& r : repeats) {
        const std::pair<const char*, const MetricSummary*> rows[] = {
            {"r2", &r.r2}, {"rmse", &r.rmse}, {"mae", &r.mae}, {"mape", &r.mape}};
        for (const auto& [name, m] : rows)
            out << to_string(r.model) << ',' << to_string(r.target) << ',' << name << ',' << format_double(m->mean)
                << ',' << format_double(m->std) << ',' << m->formatted() << '\n';
    }
    return out.str();
}

std::string stats_csv(const SummaryStats& s) {
    std::ostringstream out;
    out << "column,count,mean,std,min,q25,median,q75,max\n";
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        const auto& c = s.columns[i];
        out << s.names[i] << ',' << c.count << ',' << format_double(c.mean) << ',' << format_double(c.std) << ','
            << format_double(c.min) << ',' << format_double(c.q25) << ',' << format_double(c.median) << ','
            << format_double(c.q75) << ',' << format_double(c.max) << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_tuning(const TaskResult& t, const std::filesystem::path& dir) {
    write_text(dir / "tuning" / (task_stem(t.model, t.target) + ".json"), dump(to_json(t.tuning)));
}

void write_model(const TaskResult& t, const std::filesystem::path& dir) {
    if (!t.fitted) return;
    Json j = model_to_json(*t.fitted);
    j["scaler"] = to_json(t.scaler);
    j["converged"] = t.converged;
    write_text(dir / "models" / (task_stem(t.model, t.target) + ".json"), dump(j));
}

void write_plot_data(const TaskResult& t, const std::filesystem::path& dir) {
    const auto stem = task_stem(t.model, t.target);
    write_text(dir / "residuals" / (stem + "_train.csv"), phase_csv(t.train_data, true));
    write_text(dir / "residuals" / (stem + "_test.csv"), phase_csv(t.test_data, true));
    write_text(dir / "scatter" / (stem + "_train.csv"), phase_csv(t.train_data, false));
    write_text(dir / "scatter" / (stem + "_test.csv"), phase_csv(t.test_data, false));
}

void write_pdp(const TaskResult& t, const std::filesystem::path& dir) {
    const auto stem = task_stem(t.model, t.target);
    Json all = Json::array();
    for (const auto& c : t.pdp) {
        std::ostringstream out;
        out << "feature_value,mean_prediction\n";
        for (std::size_t i = 0; i < c.grid.size(); ++i)
            out << format_double(c.grid[i]) << ',' << format_double(c.values[i]) << '\n';
        write_text(dir / "pdp" / (stem + "_" + lower(c.feature) + ".csv"), out.str());
        all.push_back(to_json(c));
    }
    write_text(dir / "pdp" / (stem + ".json"), dump(all));
}

void emit_report(const StudyReport& s, const std::filesystem::path& dir) {
    write_text(dir / "report.json", dump(study_json(s)));
    write_text(dir / "metrics.csv", metrics_csv(s.tasks));
    write_text(dir / "comparison.md", comparison_markdown(s));
    for (const auto& t : s.tasks) {
        write_tuning(t, dir);
        write_model(t, dir);
        write_plot_data(t, dir);
        if (!t.pdp.empty()) write_pdp(t, dir);
    }
    if (!s.repeats.empty()) write_text(dir / "repeat.csv", repeat_csv(s.repeats));
    const auto marker = dir / "PARTIAL";
    if (!s.converged()) {
        std::ostringstream out;
        out << "Some fits stopped before reaching the solver tolerance:\n";
        for (const auto& t : s.tasks)
            if (!t.converged) out << task_stem(t.model, t.target) << " seed " << t.seed << '\n';
        for (const auto& r : s.repeats)
            for (const auto& run : r.runs)
                if (!run.converged) out << task_stem(r.model, r.target) << " repeat seed " << run.seed << '\n';
        write_text(marker, out.str());
    } else {
        std::error_code ec;
        std::filesystem::remove(marker, ec);
    }
}

} // namespace subgrade
