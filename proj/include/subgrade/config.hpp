// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "subgrade/dataset.hpp"
#include "subgrade/sensitivity.hpp"
#include "subgrade/serialize.hpp"
#include "subgrade/tuning.hpp"

namespace subgrade {

enum class ModelKind : std::size_t { Svr = 0, Xgb = 1, Oblivious = 2 };

inline constexpr ModelKind kAllModels[] = {ModelKind::Svr, ModelKind::Xgb, ModelKind::Oblivious};

std::string_view to_string(ModelKind m) noexcept;
/// Accepts "svr", "xgb" (or "xgb_style") and "oblivious", any case.
std::optional<ModelKind> parse_model(std::string_view name);

/// Either a CSV file or a synthetic generator spec.
struct DataSource {
    std::optional<std::filesystem::path> csv;
    SynthSpec synthesize;
};

struct RunConfig {
    DataSource data;
    std::vector<Target> targets{std::begin(kAllTargets), std::end(kAllTargets)};
    std::vector<ModelKind> models{std::begin(kAllModels), std::end(kAllModels)};
    double train_fraction = 0.7;
    std::size_t cv_k = 5;
    std::uint64_t base_seed = 0;
    std::array<HyperGrid, 3> grids;
    std::size_t pdp_points = kDefaultPdpPoints;
    std::filesystem::path output_dir = "out";
    std::size_t repeats = 10;
    std::size_t threads = 0;

    const HyperGrid& grid(ModelKind m) const { return grids[static_cast<std::size_t>(m)]; }
    HyperGrid& grid(ModelKind m) { return grids[static_cast<std::size_t>(m)]; }

    /// Throws ConfigError on empty target/model lists, bad fractions or counts,
    /// and on grids the model's trainer cannot interpret.
    void validate() const;
};

/// Default search space per model. Each is a superset of the published optima.
HyperGrid default_grid(ModelKind m);

/// Axis names a model's trainer understands.
std::span<const std::string_view> grid_keys(ModelKind m);

RunConfig default_config();

/// Keys absent from the document keep their defaults; unknown keys are errors.
/// A relative csv path is resolved against `base_dir`.
RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
Json to_json(const RunConfig& c);

/// Loads the configured data source.
Dataset load_data(const RunConfig& c);

} // namespace subgrade
