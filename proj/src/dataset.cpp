// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "subgrade/error.hpp"
#include "subgrade/format.hpp"
#include "subgrade/rng.hpp"

namespace subgrade {
namespace {

constexpr std::uint64_t kSplitStream = 0x5b1;
constexpr std::uint64_t kSynthStream = 0x5e7;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

// Reference ranges: 7 inputs, then CBR, UCS, R.
constexpr ColumnRange kRanges[] = {
    {0.0, 12.0},  {27.0, 66.0}, {12.8, 21.0},   {14.0, 45.0}, {16.0, 19.0},
    {0.6, 2.0},   {1.25, 1.99}, {8.0, 44.6},    {125.0, 232.0}, {11.7, 27.0},
};

} // namespace

std::string_view to_string(Target t) noexcept {
    switch (t) {
    case Target::CBR: return "CBR";
    case Target::UCS: return "UCS";
    case Target::R: return "R";
    }
    return "?";
}

std::optional<Target> parse_target(std::string_view name) {
    const auto n = lower(trim(name));
    if (n == "cbr") return Target::CBR;
    if (n == "ucs") return Target::UCS;
    if (n == "r" || n == "r-value" || n == "r_value") return Target::R;
    return std::nullopt;
}

const FeatureSchema& FeatureSchema::canonical() {
    static const FeatureSchema s{
        {"HARSH", "LL", "PL", "PI", "OMC", "CA", "MDD"},
        {"CBR", "UCS", "R"},
    };
    return s;
}

std::optional<std::size_t> FeatureSchema::input_index(std::string_view name) const {
    const auto key = lower(name);
    for (std::size_t i = 0; i < input_names.size(); ++i)
        if (lower(input_names[i]) == key) return i;
    return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::target_index(std::string_view name) const {
    const auto key = lower(name);
    for (std::size_t i = 0; i < target_names.size(); ++i)
        if (lower(target_names[i]) == key) return i;
    return std::nullopt;
}

void FeatureSchema::validate() const {
    if (input_names.size() != kNumInputs || target_names.size() != kNumTargets)
        throw Error(ErrorCode::InvalidArgument, "schema needs 7 inputs and 3 targets");
    std::set<std::string> seen;
    for (const auto& n : input_names) seen.insert(lower(n));
    for (const auto& n : target_names) seen.insert(lower(n));
    if (seen.size() != kNumInputs + kNumTargets) throw Error(ErrorCode::InvalidArgument, "schema names not distinct");
}

Dataset::Dataset(FeatureSchema schema, Matrix x, Matrix y, std::vector<std::size_t> row_ids)
    : schema_(std::move(schema)), x_(std::move(x)), y_(std::move(y)), row_ids_(std::move(row_ids)) {
    schema_.validate();
    if (x_.cols() != kNumInputs || y_.cols() != kNumTargets)
        throw Error(ErrorCode::DimensionMismatch, "dataset needs 7 input and 3 target columns");
    if (x_.rows() != y_.rows() || x_.rows() != row_ids_.size())
        throw Error(ErrorCode::DimensionMismatch, "dataset row counts differ");
    if (x_.rows() < 2) throw Error(ErrorCode::TooFewRows, "dataset needs at least 2 rows");
    for (double v : x_.data())
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite input value");
    for (double v : y_.data())
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite target value");
    std::unordered_set<std::size_t> ids(row_ids_.begin(), row_ids_.end());
    if (ids.size() != row_ids_.size()) throw Error(ErrorCode::InvalidArgument, "row ids not unique");
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
    std::vector<std::size_t> ids;
    ids.reserve(positions.size());
    for (auto p : positions) ids.push_back(row_ids_[p]);
    return Dataset(schema_, x_.select_rows(positions), y_.select_rows(positions), std::move(ids));
}

Dataset Dataset::with_inputs(Matrix x) const { return Dataset(schema_, std::move(x), y_, row_ids_); }

// ---- CSV ----------------------------------------------------------------

Dataset parse_csv(std::istream& in, const FeatureSchema& schema) {
    schema.validate();
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::TooFewRows, "empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    const std::size_t total = kNumInputs + kNumTargets;
    std::vector<std::size_t> source(total);
    std::vector<std::string> names = schema.input_names;
    names.insert(names.end(), schema.target_names.begin(), schema.target_names.end());
    for (std::size_t c = 0; c < total; ++c) {
        const auto key = lower(names[c]);
        auto it = std::find_if(header.begin(), header.end(), [&](std::string_view h) { return lower(h) == key; });
        if (it == header.end()) throw Error(ErrorCode::MissingColumn, "missing column " + names[c]);
        source[c] = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::vector<double>> xs, ys;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> xr(kNumInputs), yr(kNumTargets);
        for (std::size_t c = 0; c < total; ++c) {
            const std::string where = "row " + std::to_string(row + 1) + ", column " + names[c];
            if (source[c] >= fields.size()) throw Error(ErrorCode::UnparseableCell, where + ": missing cell");
            const auto cell = fields[source[c]];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
                throw Error(ErrorCode::UnparseableCell, where + ": '" + std::string(cell) + "'");
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, where);
            (c < kNumInputs ? xr[c] : yr[c - kNumInputs]) = v;
        }
        xs.push_back(std::move(xr));
        ys.push_back(std::move(yr));
        ++row;
    }
    if (xs.size() < 2) throw Error(ErrorCode::TooFewRows, "need at least 2 data rows");
    std::vector<std::size_t> ids(xs.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return Dataset(schema, Matrix::from_rows(xs), Matrix::from_rows(ys), std::move(ids));
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return parse_csv(in, schema);
}

void write_csv(const Dataset& d, std::ostream& out) {
    const auto& s = d.schema();
    bool first = true;
    for (const auto& n : s.input_names) {
        out << (first ? "" : ",") << n;
        first = false;
    }
    for (const auto& n : s.target_names) out << "," << n;
    out << "\n";
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < kNumInputs; ++c) out << (c ? "," : "") << format_double(d.x()(r, c));
        for (std::size_t c = 0; c < kNumTargets; ++c) out << "," << format_double(d.y()(r, c));
        out << "\n";
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_csv(d, out);
}

// ---- summary statistics -------------------------------------------------

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of empty column");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

ColumnStats column_stats(std::span<const double> values) {
    ColumnStats s;
    s.count = values.size();
    if (values.empty()) return s;
    double acc = 0.0;
    for (double v : values) acc += v;
    s.mean = acc / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.5);
    s.q75 = quantile_sorted(sorted, 0.75);
    return s;
}

SummaryStats summarize(const Dataset& d) {
    SummaryStats out;
    for (std::size_t c = 0; c < kNumInputs; ++c) {
        out.names.push_back(d.schema().input_names[c]);
        out.columns.push_back(column_stats(d.x().column(c)));
    }
    for (std::size_t c = 0; c < kNumTargets; ++c) {
        out.names.push_back(d.schema().target_names[c]);
        out.columns.push_back(column_stats(d.y().column(c)));
    }
    return out;
}

// ---- split --------------------------------------------------------------

std::size_t train_size(std::size_t n, double train_fraction) {
    return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_positions(std::size_t n,
                                                                                const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
    const std::size_t n_train = train_size(n, spec.train_fraction);
    if (n_train < 2 || n < n_train + 2)
        throw Error(ErrorCode::DegenerateSplit, "split leaves a partition with fewer than 2 rows (n=" +
                                                    std::to_string(n) + ", train=" + std::to_string(n_train) + ")");
    Rng rng(spec.seed, kSplitStream);
    auto perm = rng.permutation(n);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> split(const Dataset& d, const SplitSpec& spec) {
    auto [train, test] = split_positions(d.size(), spec);
    return {d.subset(train), d.subset(test)};
}

// ---- scaling ------------------------------------------------------------

MinMaxScaler::MinMaxScaler(std::vector<double> fitted_min, std::vector<double> fitted_max)
    : min_(std::move(fitted_min)), max_(std::move(fitted_max)) {
    if (min_.size() != max_.size()) throw Error(ErrorCode::DimensionMismatch, "scaler bounds");
    for (std::size_t i = 0; i < min_.size(); ++i)
        if (!(max_[i] >= min_[i])) throw Error(ErrorCode::InvalidArgument, "scaler max < min");
}

std::vector<std::size_t> MinMaxScaler::constant_features() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < min_.size(); ++i)
        if (min_[i] == max_[i]) out.push_back(i);
    return out;
}

double MinMaxScaler::transform_value(std::size_t feature, double v) const {
    const double span = max_[feature] - min_[feature];
    if (span == 0.0) return 0.0;
    return (v - min_[feature]) / span;
}

void MinMaxScaler::transform_row(std::span<const double> in, std::span<double> out) const {
    if (in.size() != dims() || out.size() != dims())
        throw Error(ErrorCode::DimensionMismatch, "scaler row width");
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = transform_value(i, in[i]);
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
    if (x.cols() != dims()) throw Error(ErrorCode::DimensionMismatch, "scaler column count");
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) transform_row(x.row(r), out.row(r));
    return out;
}

Dataset MinMaxScaler::transform(const Dataset& d) const { return d.with_inputs(transform(d.x())); }

MinMaxScaler fit_scaler(const Matrix& x) {
    if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "scaler needs at least 2 rows");
    std::vector<double> lo(x.cols()), hi(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        lo[c] = hi[c] = x(0, c);
        for (std::size_t r = 1; r < x.rows(); ++r) {
            lo[c] = std::min(lo[c], x(r, c));
            hi[c] = std::max(hi[c], x(r, c));
        }
    }
    return MinMaxScaler(std::move(lo), std::move(hi));
}

MinMaxScaler fit_scaler(const Dataset& train) { return fit_scaler(train.x()); }

// ---- synthetic data -----------------------------------------------------

std::span<const ColumnRange> reference_ranges() noexcept { return kRanges; }

std::array<double, kNumTargets> synth_targets(std::span<const double> in) {
    if (in.size() != kNumInputs) throw Error(ErrorCode::DimensionMismatch, "synth_targets needs 7 inputs");
    auto unit = [&](std::size_t c) { return (in[c] - kRanges[c].min) / (kRanges[c].max - kRanges[c].min); };
    const double harsh = unit(0), ll = unit(1), pl = unit(2), pi = unit(3), omc = unit(4), ca = unit(5),
                 mdd = unit(6);
    // hump in OMC peaking at 60% of its range, in [0, 1] on the unit interval
    const double omc_hump = 1.0 - (omc - 0.6) * (omc - 0.6) / 0.36;

    const double s_cbr = 0.50 * harsh + 0.15 * mdd + 0.12 * (1.0 - ll) + 0.13 * (1.0 - pi) + 0.05 * (1.0 - ca) +
                         0.05 * omc_hump;
    const double s_ucs = 0.45 * harsh + 0.20 * mdd + 0.15 * (1.0 - ll) + 0.10 * (1.0 - pi) + 0.05 * (1.0 - ca) +
                         0.05 * omc_hump;
    const double s_r = 0.55 * harsh + 0.10 * mdd + 0.10 * (1.0 - ll) + 0.15 * (1.0 - pi) + 0.05 * (1.0 - ca) +
                       0.05 * (1.0 - pl);

    // strictly increasing maps of [0, 1] into [0.08, 0.92] of each envelope
    const double g_cbr = 0.08 + 0.84 * (0.6 * s_cbr + 0.4 * s_cbr * s_cbr);
    const double k = 1.5;
    const double g_ucs = 0.08 + 0.84 * (1.0 - std::exp(-k * s_ucs)) / (1.0 - std::exp(-k));
    const double g_r = 0.08 + 0.84 * (s_r + 0.5 * s_r * (1.0 - s_r));

    auto scale = [&](std::size_t t, double g) {
        const auto& r = kRanges[kNumInputs + t];
        return r.min + (r.max - r.min) * g;
    };
    return {scale(0, g_cbr), scale(1, g_ucs), scale(2, g_r)};
}

Dataset synthesize(std::uint64_t seed, std::size_t n, double noise_scale) {
    if (n < 10) throw Error(ErrorCode::InvalidArgument, "synthesize needs n >= 10");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale))
        throw Error(ErrorCode::InvalidArgument, "noise_scale must be finite and >= 0");
    Rng rng(seed, kSynthStream);
    auto clamp_to = [](std::size_t c, double v) { return std::clamp(v, kRanges[c].min, kRanges[c].max); };

    Matrix x(n, kNumInputs);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double j1 = rng.uniform(-1, 1), j2 = rng.uniform(-1, 1), j3 = rng.uniform(-1, 1),
                     j4 = rng.uniform(-1, 1), j5 = rng.uniform(-1, 1);
        const double harsh = 12.0 * t;
        const double ll = clamp_to(1, 66.0 - 39.0 * t + 3.0 * j1);
        const double pl = clamp_to(2, 21.0 - 8.0 * t + 0.6 * j2);
        const double pi = clamp_to(3, ll - pl);
        const double omc = clamp_to(4, 16.6 + 2.0 * t + 0.3 * j3);
        const double ca = clamp_to(5, 1.9 - 1.1 * t + 0.1 * j4);
        const double mdd = clamp_to(6, 1.3 + 0.65 * t + 0.04 * j5);
        const double row[kNumInputs] = {harsh, ll, pl, pi, omc, ca, mdd};
        std::copy(std::begin(row), std::end(row), x.row(i).begin());
    }

    Matrix y(n, kNumTargets);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = synth_targets(x.row(i));
        std::copy(t.begin(), t.end(), y.row(i).begin());
    }
    if (noise_scale > 0.0) {
        for (std::size_t c = 0; c < kNumTargets; ++c) {
            const double sd = noise_scale * column_stats(y.column(c)).std;
            for (std::size_t i = 0; i < n; ++i)
                y(i, c) = clamp_to(kNumInputs + c, y(i, c) + sd * rng.normal());
        }
    }
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    return Dataset(FeatureSchema::canonical(), std::move(x), std::move(y), std::move(ids));
}

} // namespace subgrade
