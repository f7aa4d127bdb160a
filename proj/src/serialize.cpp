// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/serialize.hpp"

#include <cmath>

#include "subgrade/error.hpp"

namespace subgrade {
namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing JSON field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("bad JSON field '") + key + "': " + e.what());
    }
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
}

Matrix matrix_from_json(const Json& j, std::size_t cols) {
    std::vector<std::vector<double>> rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return Matrix(0, cols);
    return Matrix::from_rows(rows);
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace

// ---- svr ----------------------------------------------------------------

Json to_json(const SvrHyperParams& h) {
    return Json{{"c", h.c},
                {"epsilon", h.epsilon},
                {"kernel", {{"kind", "rbf"}, {"gamma", h.kernel.gamma}}},
                {"tolerance", h.tolerance},
                {"max_passes", h.max_passes}};
}

SvrHyperParams svr_hyper_from_json(const Json& j) {
    SvrHyperParams h;
    h.c = field<double>(j, "c");
    h.epsilon = field<double>(j, "epsilon");
    const auto& k = j.at("kernel");
    if (field<std::string>(k, "kind") != "rbf") throw Error(ErrorCode::ConfigError, "only the rbf kernel is supported");
    h.kernel.gamma = field<double>(k, "gamma");
    h.tolerance = field<double>(j, "tolerance");
    h.max_passes = field<std::size_t>(j, "max_passes");
    h.validate();
    return h;
}

Json to_json(const SvrModel& m) {
    return Json{{"hyper", to_json(m.hyper())},
                {"n_features", m.dims()},
                {"bias", m.bias()},
                {"support_indices", m.support_indices()},
                {"dual_coeffs", m.dual_coeffs()},
                {"support_x", matrix_json(m.support_x())},
                {"converged", m.stats().converged},
                {"updates", m.stats().updates},
                {"final_gap", m.stats().final_gap},
                {"dual_objective", m.stats().dual_objective}};
}

SvrModel svr_model_from_json(const Json& j) {
    SvrSolverStats st;
    st.converged = field<bool>(j, "converged");
    st.updates = field<std::size_t>(j, "updates");
    st.final_gap = field<double>(j, "final_gap");
    st.dual_objective = field<double>(j, "dual_objective");
    const auto d = field<std::size_t>(j, "n_features");
    return SvrModel(matrix_from_json(j.at("support_x"), d), field<std::vector<double>>(j, "dual_coeffs"),
                    field<double>(j, "bias"), svr_hyper_from_json(j.at("hyper")),
                    field<std::vector<std::size_t>>(j, "support_indices"), std::move(st));
}

// ---- gbdt ---------------------------------------------------------------

Json to_json(const BoostHyperParams& h) {
    return Json{{"n_estimators", h.n_estimators},
                {"learning_rate", h.learning_rate},
                {"max_depth", h.max_depth},
                {"reg_lambda", h.reg_lambda},
                {"gamma_complexity", h.gamma_complexity},
                {"subsample", h.subsample},
                {"colsample_bytree", h.colsample_bytree},
                {"min_child_weight", h.min_child_weight},
                {"tree_shape", std::string(to_string(h.tree_shape))},
                {"seed", h.seed}};
}

BoostHyperParams boost_hyper_from_json(const Json& j) {
    BoostHyperParams h;
    h.n_estimators = field<std::size_t>(j, "n_estimators");
    h.learning_rate = field<double>(j, "learning_rate");
    h.max_depth = field<std::size_t>(j, "max_depth");
    h.reg_lambda = field<double>(j, "reg_lambda");
    h.gamma_complexity = field<double>(j, "gamma_complexity");
    h.subsample = field<double>(j, "subsample");
    h.colsample_bytree = field<double>(j, "colsample_bytree");
    h.min_child_weight = field<double>(j, "min_child_weight");
    const auto shape = field<std::string>(j, "tree_shape");
    if (shape == "axis") h.tree_shape = TreeShape::Axis;
    else if (shape == "oblivious") h.tree_shape = TreeShape::Oblivious;
    else throw Error(ErrorCode::ConfigError, "unknown tree_shape '" + shape + "'");
    h.seed = field<std::uint64_t>(j, "seed");
    h.validate();
    return h;
}

Json to_json(const RegressionTree& t) {
    if (t.shape() == TreeShape::Oblivious) {
        Json levels = Json::array();
        for (const auto& l : t.levels()) levels.push_back({{"feature", l.feature}, {"threshold", l.threshold}});
        return Json{{"shape", "oblivious"}, {"levels", levels}, {"leaf_weights", t.leaf_weights()}};
    }
    Json nodes = Json::array();
    for (const auto& n : t.nodes()) {
        if (n.is_leaf()) nodes.push_back({{"leaf", n.weight}});
        else
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
    return Json{{"shape", "axis"}, {"nodes", nodes}};
}

RegressionTree tree_from_json(const Json& j) {
    const auto shape = field<std::string>(j, "shape");
    if (shape == "oblivious") {
        std::vector<ObliviousLevel> levels;
        for (const auto& l : j.at("levels")) levels.push_back({field<std::size_t>(l, "feature"), field<double>(l, "threshold")});
        return RegressionTree::oblivious(std::move(levels), field<std::vector<double>>(j, "leaf_weights"));
    }
    if (shape != "axis") throw Error(ErrorCode::ConfigError, "unknown tree shape '" + shape + "'");
    std::vector<TreeNode> nodes;
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        if (n.contains("leaf")) {
            node.weight = field<double>(n, "leaf");
        } else {
            node.feature = field<int>(n, "feature");
            node.threshold = field<double>(n, "threshold");
            node.left = field<int>(n, "left");
            node.right = field<int>(n, "right");
            if (node.feature < 0) throw Error(ErrorCode::InvalidArgument, "negative split feature");
        }
        nodes.push_back(node);
    }
    return RegressionTree::axis(std::move(nodes));
}

Json to_json(const BoostedEnsemble& e) {
    Json trees = Json::array();
    for (const auto& t : e.trees()) trees.push_back(to_json(t));
    return Json{{"hyper", to_json(e.hyper())}, {"n_features", e.dims()}, {"base_score", e.base_score()}, {"trees", trees}};
}

BoostedEnsemble ensemble_from_json(const Json& j) {
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
    return BoostedEnsemble(field<double>(j, "base_score"), std::move(trees), boost_hyper_from_json(j.at("hyper")),
                           field<std::size_t>(j, "n_features"));
}

// ---- dataset / metrics --------------------------------------------------

Json to_json(const MinMaxScaler& s) {
    return Json{{"fitted_min", s.fitted_min()}, {"fitted_max", s.fitted_max()}};
}

MinMaxScaler scaler_from_json(const Json& j) {
    return MinMaxScaler(field<std::vector<double>>(j, "fitted_min"), field<std::vector<double>>(j, "fitted_max"));
}

Json to_json(const EvalReport& r) {
    Json res = Json::array();
    for (const auto& e : r.residuals) res.push_back({{"row_id", e.row_id}, {"residual", e.value}});
    return Json{{"r2", r.r2}, {"rmse", r.rmse}, {"mae", r.mae}, {"mape", r.mape}, {"residuals", res}};
}

EvalReport eval_report_from_json(const Json& j) {
    EvalReport r;
    r.r2 = field<double>(j, "r2");
    r.rmse = field<double>(j, "rmse");
    r.mae = field<double>(j, "mae");
    r.mape = field<double>(j, "mape");
    for (const auto& e : j.at("residuals")) r.residuals.push_back({field<std::size_t>(e, "row_id"), field<double>(e, "residual")});
    return r;
}

Json to_json(const SummaryStats& s) {
    Json out = Json::object();
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        const auto& c = s.columns[i];
        out[s.names[i]] = {{"count", c.count}, {"mean", c.mean}, {"std", c.std}, {"min", c.min},
                           {"q25", c.q25},     {"median", c.median}, {"q75", c.q75}, {"max", c.max}};
    }
    return out;
}

// ---- tuning -------------------------------------------------------------

Json to_json(const Candidate& c) {
    Json out = Json::object();
    for (std::size_t i = 0; i < c.names.size(); ++i) out[c.names[i]] = c.values[i];
    return out;
}

Candidate candidate_from_json(const Json& j) {
    Candidate c;
    for (const auto& [k, v] : j.items()) {
        c.names.push_back(k);
        c.values.push_back(v.get<double>());
    }
    return c;
}

Json to_json(const HyperGrid& g) {
    Json out = Json::object();
    for (const auto& a : g.axes()) out[a.name] = a.values;
    return out;
}

HyperGrid grid_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "grid must be an object of axis arrays");
    HyperGrid g;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_array()) throw Error(ErrorCode::ConfigError, "grid axis '" + k + "' must be an array");
        try {
            g.add(k, v.get<std::vector<double>>());
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::ConfigError, "grid axis '" + k + "' must hold numbers");
        }
    }
    return g;
}

Json to_json(const TuningResult& t) {
    Json per = Json::array();
    for (const auto& pc : t.per_candidate) {
        Json folds = Json::array();
        for (double m : pc.score.fold_mses) folds.push_back(m);
        Json e{{"candidate", to_json(pc.candidate)},
               {"feasible", pc.score.feasible},
               {"mean_mse", number_or_null(pc.score.mean_mse)},
               {"fold_mses", folds}};
        if (!pc.score.feasible) e["failure"] = pc.score.failure;
        per.push_back(std::move(e));
    }
    Json scalers = Json::array();
    for (const auto& s : t.scalers) scalers.push_back(to_json(s));
    return Json{{"best_index", t.best_index},
                {"best_candidate", to_json(t.best_candidate)},
                {"best_cv_mse", t.best_cv_mse},
                {"folds", {{"k", t.folds.k}, {"assignment", t.folds.assignment}}},
                {"fold_scalers", scalers},
                {"per_candidate", per}};
}

// ---- sensitivity --------------------------------------------------------

Json to_json(const PdpCurve& c) {
    return Json{{"feature", c.feature}, {"n_background", c.n_background}, {"grid", c.grid}, {"values", c.values}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace subgrade
