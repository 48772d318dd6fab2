// SPDX-License-Identifier: Apache-2.0
//
// mucomp: multicell MU-MIMO cooperative transmission with limited feedback
// Copyright (C) 2026 The mucomp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef MUCOMP_NUMFMT_HPP
#define MUCOMP_NUMFMT_HPP

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace mucomp
{
    // 17 significant digits, '.' separator regardless of the global locale.
    inline std::string format_double(double x)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
        if (res.ec != std::errc())
            throw std::runtime_error("format_double: conversion failed");
        return std::string(buf, res.ptr);
    }

    inline double parse_double(std::string_view s)
    {
        double x = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), x);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::invalid_argument("not a number: '" + std::string(s) + "'");
        return x;
    }

    template <class Int>
    Int parse_int(std::string_view s)
    {
        Int x{};
        auto res = std::from_chars(s.data(), s.data() + s.size(), x);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
        return x;
    }
} // namespace mucomp

#endif
