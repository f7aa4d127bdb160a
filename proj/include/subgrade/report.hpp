// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "subgrade/experiment.hpp"
#include "subgrade/serialize.hpp"

namespace subgrade {

/// "<model>_<target>", lower case, used for per-task file names.
std::string task_stem(ModelKind model, Target target);

Json to_json(const TaskResult& t);
Json to_json(const RepeatSummary& r);
Json literature_json();
/// Structured report; the run's output directory and thread count are not part of it.
Json study_json(const StudyReport& s);

/// Columns phase, model, target, r2, rmse, mae, mape; train then test per task.
std::string metrics_csv(std::span<const TaskResult> tasks);
std::string comparison_markdown(const StudyReport& s);
std::string repeat_csv(std::span<const RepeatSummary> repeats);
std::string stats_csv(const SummaryStats& s);

/// Text file writer that creates parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

void write_tuning(const TaskResult& t, const std::filesystem::path& dir);  // tuning/<stem>.json
void write_model(const TaskResult& t, const std::filesystem::path& dir);   // models/<stem>.json
void write_plot_data(const TaskResult& t, const std::filesystem::path& dir); // residuals/, scatter/
void write_pdp(const TaskResult& t, const std::filesystem::path& dir);     // pdp/

/// report.json, metrics.csv, comparison.md, the per-task files above and,
/// when repeats were run, repeat.csv. A study with non-converged fits also
/// gets a PARTIAL marker file.
void emit_report(const StudyReport& s, const std::filesystem::path& dir);

} // namespace subgrade
