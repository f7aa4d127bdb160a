// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/format.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace subgrade {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double v, int decimals) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    return std::string(buf.data(), res.ptr);
}

std::string format_mean_std(double mean, double std, int decimals) {
    return format_fixed(mean, decimals) + "±" + format_fixed(std, decimals);
}

} // namespace subgrade
