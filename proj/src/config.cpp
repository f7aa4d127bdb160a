// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "subgrade/error.hpp"

namespace subgrade {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

constexpr std::string_view kSvrKeys[] = {"c", "gamma", "epsilon", "tolerance", "max_passes"};
constexpr std::string_view kXgbKeys[] = {"n_estimators",     "learning_rate",    "max_depth",
                                         "subsample",        "colsample_bytree", "reg_lambda",
                                         "gamma_complexity", "min_child_weight"};
constexpr std::string_view kObliviousKeys[] = {"n_estimators",     "learning_rate", "depth",
                                               "subsample",        "colsample_bytree", "l2_leaf_reg",
                                               "max_depth",        "reg_lambda",    "gamma_complexity",
                                               "min_child_weight"};

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(where) + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (std::ranges::find(allowed, std::string_view(k)) == allowed.end())
            throw Error(ErrorCode::ConfigError, "unknown key '" + k + "' in " + std::string(where));
    }
}

template <typename T>
T get_as(const Json& j, std::string_view key) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ConfigError, "config key '" + std::string(key) + "' has the wrong type");
    }
}

std::size_t get_count(const Json& j, std::string_view key) {
    if (!j.is_number_unsigned()) throw Error(ErrorCode::ConfigError, "config key '" + std::string(key) + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

} // namespace

std::string_view to_string(ModelKind m) noexcept {
    switch (m) {
    case ModelKind::Svr: return "svr";
    case ModelKind::Xgb: return "xgb";
    case ModelKind::Oblivious: return "oblivious";
    }
    return "?";
}

std::optional<ModelKind> parse_model(std::string_view name) {
    const auto s = lower(name);
    if (s == "svr") return ModelKind::Svr;
    if (s == "xgb" || s == "xgb_style") return ModelKind::Xgb;
    if (s == "oblivious") return ModelKind::Oblivious;
    return std::nullopt;
}

std::span<const std::string_view> grid_keys(ModelKind m) {
    switch (m) {
    case ModelKind::Svr: return kSvrKeys;
    case ModelKind::Xgb: return kXgbKeys;
    case ModelKind::Oblivious: return kObliviousKeys;
    }
    return {};
}

HyperGrid default_grid(ModelKind m) {
    HyperGrid g;
    switch (m) {
    case ModelKind::Svr:
        g.add("c", {1, 10, 52, 75, 100, 500});
        g.add("gamma", {0.1, 0.5, 0.9, 0.96, 0.99});
        g.add("epsilon", {0.001, 0.002, 0.01});
        break;
    case ModelKind::Xgb:
        g.add("n_estimators", {242, 349, 359});
        g.add("learning_rate", {0.03, 0.04});
        g.add("max_depth", {6, 7});
        g.add("subsample", {0.7, 1});
        g.add("colsample_bytree", {0.5, 0.7, 1});
        g.add("reg_lambda", {0.06, 1.1, 1.21});
        break;
    case ModelKind::Oblivious:
        g.add("n_estimators", {289, 493, 500});
        g.add("learning_rate", {0.04, 0.05});
        g.add("depth", {5, 7, 12});
        g.add("subsample", {0.9, 1});
        g.add("colsample_bytree", {0.4, 1});
        g.add("l2_leaf_reg", {0.03, 0.21, 0.48});
        break;
    }
    return g;
}

RunConfig default_config() {
    RunConfig c;
    for (auto m : kAllModels) c.grid(m) = default_grid(m);
    return c;
}

void RunConfig::validate() const {
    if (targets.empty()) throw Error(ErrorCode::ConfigError, "at least one target is required");
    if (models.empty()) throw Error(ErrorCode::ConfigError, "at least one model is required");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::ConfigError, "train_fraction must lie in (0, 1)");
    if (cv_k < 2) throw Error(ErrorCode::ConfigError, "cv_k must be at least 2");
    if (pdp_points < 2) throw Error(ErrorCode::ConfigError, "pdp_points must be at least 2");
    if (data.synthesize.n < 10 && !data.csv) throw Error(ErrorCode::ConfigError, "synthesize.n must be at least 10");
    if (!(data.synthesize.noise_scale >= 0.0) || !std::isfinite(data.synthesize.noise_scale))
        throw Error(ErrorCode::ConfigError, "synthesize.noise_scale must be finite and >= 0");
    for (auto m : kAllModels) {
        const auto& g = grid(m);
        g.validate();
        const auto keys = grid_keys(m);
        for (const auto& axis : g.axes()) {
            if (std::ranges::find(keys, std::string_view(axis.name)) == keys.end())
                throw Error(ErrorCode::ConfigError,
                            "grid axis '" + axis.name + "' is not a " + std::string(to_string(m)) + " hyperparameter");
            for (double v : axis.values) {
                if (!std::isfinite(v)) throw Error(ErrorCode::ConfigError, "grid axis '" + axis.name + "' holds a non-finite value");
                const bool count_axis = axis.name == "n_estimators" || axis.name == "max_depth" || axis.name == "depth" ||
                                        axis.name == "max_passes";
                if (count_axis && (!is_integral(v) || v < 0))
                    throw Error(ErrorCode::ConfigError, "grid axis '" + axis.name + "' must hold non-negative integers");
            }
        }
        if (m == ModelKind::Oblivious) {
            if (g.axis("depth") && g.axis("max_depth"))
                throw Error(ErrorCode::ConfigError, "oblivious grid sets both depth and max_depth");
            if (g.axis("l2_leaf_reg") && g.axis("reg_lambda"))
                throw Error(ErrorCode::ConfigError, "oblivious grid sets both l2_leaf_reg and reg_lambda");
        }
    }
}

RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    RunConfig c = default_config();
    check_keys(j,
               {"data", "targets", "models", "train_fraction", "cv_k", "base_seed", "grids", "pdp_points", "output_dir",
                "repeats", "threads"},
               "config");
    if (j.contains("data")) {
        const auto& d = j.at("data");
        check_keys(d, {"csv", "synthesize"}, "data");
        if (d.contains("csv") && d.contains("synthesize"))
            throw Error(ErrorCode::ConfigError, "data takes either csv or synthesize, not both");
        if (d.contains("csv")) {
            std::filesystem::path p = get_as<std::string>(d.at("csv"), "data.csv");
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.data.csv = p;
        }
        if (d.contains("synthesize")) {
            const auto& s = d.at("synthesize");
            check_keys(s, {"seed", "n", "noise_scale"}, "data.synthesize");
            if (s.contains("seed")) c.data.synthesize.seed = get_as<std::uint64_t>(s.at("seed"), "synthesize.seed");
            if (s.contains("n")) c.data.synthesize.n = get_count(s.at("n"), "synthesize.n");
            if (s.contains("noise_scale"))
                c.data.synthesize.noise_scale = get_as<double>(s.at("noise_scale"), "synthesize.noise_scale");
        }
    }
    if (j.contains("targets")) {
        c.targets.clear();
        for (const auto& t : j.at("targets")) {
            const auto name = get_as<std::string>(t, "targets");
            const auto parsed = parse_target(name);
            if (!parsed) throw Error(ErrorCode::ConfigError, "unknown target '" + name + "'");
            if (std::ranges::find(c.targets, *parsed) != c.targets.end())
                throw Error(ErrorCode::ConfigError, "target '" + name + "' listed twice");
            c.targets.push_back(*parsed);
        }
    }
    if (j.contains("models")) {
        c.models.clear();
        for (const auto& m : j.at("models")) {
            const auto name = get_as<std::string>(m, "models");
            const auto parsed = parse_model(name);
            if (!parsed) throw Error(ErrorCode::ConfigError, "unknown model '" + name + "'");
            if (std::ranges::find(c.models, *parsed) != c.models.end())
                throw Error(ErrorCode::ConfigError, "model '" + name + "' listed twice");
            c.models.push_back(*parsed);
        }
    }
    if (j.contains("train_fraction")) c.train_fraction = get_as<double>(j.at("train_fraction"), "train_fraction");
    if (j.contains("cv_k")) c.cv_k = get_count(j.at("cv_k"), "cv_k");
    if (j.contains("base_seed")) c.base_seed = get_as<std::uint64_t>(j.at("base_seed"), "base_seed");
    if (j.contains("pdp_points")) c.pdp_points = get_count(j.at("pdp_points"), "pdp_points");
    if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j.at("output_dir"), "output_dir");
    if (j.contains("repeats")) c.repeats = get_count(j.at("repeats"), "repeats");
    if (j.contains("threads")) c.threads = get_count(j.at("threads"), "threads");
    if (j.contains("grids")) {
        const auto& g = j.at("grids");
        check_keys(g, {"svr", "xgb", "oblivious"}, "grids");
        for (const auto& [k, v] : g.items()) c.grid(*parse_model(k)) = grid_from_json(v);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

Json to_json(const RunConfig& c) {
    Json data = Json::object();
    if (c.data.csv) data["csv"] = c.data.csv->generic_string();
    else
        data["synthesize"] = {{"seed", c.data.synthesize.seed},
                              {"n", c.data.synthesize.n},
                              {"noise_scale", c.data.synthesize.noise_scale}};
    Json targets = Json::array();
    for (auto t : c.targets) targets.push_back(std::string(to_string(t)));
    Json models = Json::array();
    for (auto m : c.models) models.push_back(std::string(to_string(m)));
    Json grids = Json::object();
    for (auto m : kAllModels) grids[std::string(to_string(m))] = to_json(c.grid(m));
    return Json{{"data", data},
                {"targets", targets},
                {"models", models},
                {"train_fraction", c.train_fraction},
                {"cv_k", c.cv_k},
                {"base_seed", c.base_seed},
                {"grids", grids},
                {"pdp_points", c.pdp_points},
                {"output_dir", c.output_dir.generic_string()},
                {"repeats", c.repeats},
                {"threads", c.threads}};
}

Dataset load_data(const RunConfig& c) {
    if (c.data.csv) return load_csv(*c.data.csv);
    return synthesize(c.data.synthesize);
}

} // namespace subgrade
