// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

// JSON encodings. Numbers are written in shortest round-trip form, so a
// parse of any emitted document reproduces every double bit-for-bit.

#include <json.hpp>

#include "subgrade/dataset.hpp"
#include "subgrade/gbdt.hpp"
#include "subgrade/metrics.hpp"
#include "subgrade/sensitivity.hpp"
#include "subgrade/svr.hpp"
#include "subgrade/tuning.hpp"

namespace subgrade {

using Json = nlohmann::ordered_json;

Json to_json(const SvrHyperParams& h);
SvrHyperParams svr_hyper_from_json(const Json& j);
Json to_json(const SvrModel& m);
SvrModel svr_model_from_json(const Json& j);

Json to_json(const BoostHyperParams& h);
BoostHyperParams boost_hyper_from_json(const Json& j);
Json to_json(const RegressionTree& t);
RegressionTree tree_from_json(const Json& j);
Json to_json(const BoostedEnsemble& e);
BoostedEnsemble ensemble_from_json(const Json& j);

Json to_json(const MinMaxScaler& s);
MinMaxScaler scaler_from_json(const Json& j);

Json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const Json& j);

Json to_json(const Candidate& c);
Candidate candidate_from_json(const Json& j);
Json to_json(const HyperGrid& g);
HyperGrid grid_from_json(const Json& j);
Json to_json(const TuningResult& t);

Json to_json(const PdpCurve& c);
Json to_json(const SummaryStats& s);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const Json& j);

} // namespace subgrade
