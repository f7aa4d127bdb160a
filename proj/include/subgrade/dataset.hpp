// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subgrade/matrix.hpp"

namespace subgrade {

inline constexpr std::size_t kNumInputs = 7;
inline constexpr std::size_t kNumTargets = 3;

enum class Target : std::size_t { CBR = 0, UCS = 1, R = 2 };

inline constexpr Target kAllTargets[] = {Target::CBR, Target::UCS, Target::R};

std::string_view to_string(Target t) noexcept;
/// Case-insensitive; accepts "R-value" for R.
std::optional<Target> parse_target(std::string_view name);

/// Canonical column names. Matrices index inputs and targets in this order.
struct FeatureSchema {
    std::vector<std::string> input_names;
    std::vector<std::string> target_names;

    static const FeatureSchema& canonical();

    std::optional<std::size_t> input_index(std::string_view name) const;
    std::optional<std::size_t> target_index(std::string_view name) const;

    /// Throws InvalidArgument unless there are 7 inputs, 3 targets, all distinct.
    void validate() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// Row-major table of inputs (n x 7) and targets (n x 3).
///
/// Constructed values always satisfy: n >= 2, every value finite, row ids unique.
class Dataset {
public:
    Dataset(FeatureSchema schema, Matrix x, Matrix y, std::vector<std::size_t> row_ids);

    const FeatureSchema& schema() const noexcept { return schema_; }
    const Matrix& x() const noexcept { return x_; }
    const Matrix& y() const noexcept { return y_; }
    const std::vector<std::size_t>& row_ids() const noexcept { return row_ids_; }
    std::size_t size() const noexcept { return x_.rows(); }

    std::vector<double> target(Target t) const { return y_.column(static_cast<std::size_t>(t)); }

    /// Rows at the given positions, keeping their row ids.
    Dataset subset(std::span<const std::size_t> positions) const;

    /// Same rows with inputs replaced (targets and ids untouched).
    Dataset with_inputs(Matrix x) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    FeatureSchema schema_;
    Matrix x_;
    Matrix y_;
    std::vector<std::size_t> row_ids_;
};

// ---- CSV ----------------------------------------------------------------

/// Comma separated, one header row, '.' decimal separator. Header names are
/// matched case-insensitively and in any order; unknown columns are ignored.
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema = FeatureSchema::canonical());
Dataset parse_csv(std::istream& in, const FeatureSchema& schema = FeatureSchema::canonical());

/// Writes inputs then targets in canonical order, shortest round-trip numbers.
void write_csv(const Dataset& d, const std::filesystem::path& path);
void write_csv(const Dataset& d, std::ostream& out);

// ---- summary statistics -------------------------------------------------

struct ColumnStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0; // sample (n - 1)
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

struct SummaryStats {
    std::vector<std::string> names; // 7 inputs then 3 targets
    std::vector<ColumnStats> columns;
};

/// Quantile by linear interpolation between order statistics, h = (n - 1) p.
double quantile_sorted(std::span<const double> sorted, double p);

ColumnStats column_stats(std::span<const double> values);
SummaryStats summarize(const Dataset& d);

// ---- split --------------------------------------------------------------

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

/// round(f * n), ties half-up.
std::size_t train_size(std::size_t n, double train_fraction);

/// Seeded uniform permutation; the first train_size rows go to train, the
/// rest to test, both in permuted order. Throws DegenerateSplit if either
/// side would hold fewer than two rows.
std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec);

/// Positions (into d) of the train and test rows produced by split().
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_positions(std::size_t n,
                                                                                const SplitSpec& spec);

// ---- scaling ------------------------------------------------------------

/// Per-input min-max scaler. Constant features map to 0; values outside the
/// fitted range are not clipped.
class MinMaxScaler {
public:
    MinMaxScaler() = default;
    MinMaxScaler(std::vector<double> fitted_min, std::vector<double> fitted_max);

    const std::vector<double>& fitted_min() const noexcept { return min_; }
    const std::vector<double>& fitted_max() const noexcept { return max_; }
    std::size_t dims() const noexcept { return min_.size(); }

    /// Indices of features with fitted_min == fitted_max.
    std::vector<std::size_t> constant_features() const;

    double transform_value(std::size_t feature, double v) const;
    void transform_row(std::span<const double> in, std::span<double> out) const;
    Matrix transform(const Matrix& x) const;
    Dataset transform(const Dataset& d) const;

    friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

/// Fit on inputs only. Requires at least two rows.
MinMaxScaler fit_scaler(const Matrix& x);
MinMaxScaler fit_scaler(const Dataset& train);

// ---- synthetic data -----------------------------------------------------

/// Gaussian noise scale (as a fraction of each clean target's std) that puts
/// the Bayes-optimal R^2 at 0.999.
inline constexpr double kNoiseForR2_0999 = 0.0316;

struct SynthSpec {
    std::uint64_t seed = 1;
    std::size_t n = 121;
    double noise_scale = kNoiseForR2_0999;
};

/// Noise-free target values for one input row (canonical feature order).
/// Strictly increasing in HARSH and MDD, strictly decreasing in LL and PI.
std::array<double, kNumTargets> synth_targets(std::span<const double> inputs);

/// Deterministic stand-in for the 121-sample soil table. HARSH is evenly
/// spaced over [0, 12]; the other inputs follow HARSH with seeded jitter inside
/// their observed ranges; targets are synth_targets() plus Gaussian noise of
/// sd = noise_scale * std(clean target), clamped to the observed envelopes.
Dataset synthesize(std::uint64_t seed, std::size_t n, double noise_scale);
inline Dataset synthesize(const SynthSpec& s) { return synthesize(s.seed, s.n, s.noise_scale); }

/// Table-1 style envelope per column (7 inputs then 3 targets).
struct ColumnRange {
    double min;
    double max;
};
std::span<const ColumnRange> reference_ranges() noexcept;

} // namespace subgrade
