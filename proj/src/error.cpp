// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/error.hpp"

namespace subgrade {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableCell: return "UnparseableCell";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::ConstantActual: return "ConstantActual";
    case ErrorCode::NearZeroActual: return "NearZeroActual";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::BadFoldCount: return "BadFoldCount";
    case ErrorCode::AllCandidatesInfeasible: return "AllCandidatesInfeasible";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string Error::compose(ErrorCode code, const std::string& message, const std::string& stage) {
    std::string out;
    if (!stage.empty()) {
        out += "[";
        out += stage;
        out += "] ";
    }
    out += to_string(code);
    if (!message.empty()) {
        out += ": ";
        out += message;
    }
    return out;
}

} // namespace subgrade
