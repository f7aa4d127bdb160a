// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <string>

namespace subgrade {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double v, int decimals);

/// "mean±std" with fixed decimals, e.g. "0.9996±0.0004".
std::string format_mean_std(double mean, double std, int decimals = 4);

} // namespace subgrade
