#pragma once

// Locale-independent number formatting and strict parsing used by every file
// format in the library.  Data files carry 9 significant digits; checkpoints
// carry 17 so doubles round-trip exactly.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "alcore/errors.hpp"

namespace alcore {

inline std::string format_double(double value, int significant_digits = 9) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value,
                             std::chars_format::general, significant_digits);
    if (res.ec != std::errc())
        throw internal_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

// Whole-token double parse; anything trailing is an error.
inline double parse_double(std::string_view token, const std::string& context) {
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw format_error(context + ": not a number: '" + std::string(token) + "'");
    return value;
}

inline long long parse_int(std::string_view token, const std::string& context) {
    long long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw format_error(context + ": not an integer: '" + std::string(token) + "'");
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace alcore
