// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace subgrade {

enum class ErrorCode {
    // data
    MissingColumn,
    UnparseableCell,
    NonFiniteValue,
    TooFewRows,
    DegenerateSplit,
    DimensionMismatch,
    DegenerateInput,
    DegenerateFeature,
    UnknownFeature,
    ConstantActual,
    NearZeroActual,
    // numerical
    DegenerateDenominator,
    DidNotConverge,
    BadFoldCount,
    AllCandidatesInfeasible,
    // configuration / io
    InvalidArgument,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` carries the failure kind
/// and `stage()` optionally names the pipeline stage that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string stage = {})
        : std::runtime_error(compose(code, message, stage)), code_(code), message_(message),
          stage_(std::move(stage)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }

    /// Same error, re-tagged with the stage it surfaced in.
    Error with_stage(std::string stage) const { return Error(code_, message_, std::move(stage)); }

    const std::string& detail() const noexcept { return message_; }

private:
    static std::string compose(ErrorCode code, const std::string& message, const std::string& stage);

    ErrorCode code_;
    std::string message_;
    std::string stage_;
};

} // namespace subgrade
