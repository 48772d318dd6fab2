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

#ifndef MUCOMP_LINALG_HPP
#define MUCOMP_LINALG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mucomp
{
    using cdouble = std::complex<double>;

    // Channels are row vectors throughout (1 x n), precoders are columns.
    using CVector = Eigen::RowVectorXcd;
    using CColumn = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RMatrix = Eigen::MatrixXd;

    // Invalid scenario or configuration; maps to CLI exit status 2.
    class ConfigError : public std::invalid_argument
    {
    public:
        explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
        ConfigError(const std::string &what, std::vector<std::string> diagnostics)
            : std::invalid_argument(what), diagnostics_(std::move(diagnostics)) {}
        const std::vector<std::string> &diagnostics() const noexcept { return diagnostics_; }

    private:
        std::vector<std::string> diagnostics_;
    };

    // Numerical failure at run time (ill-conditioned ZF, all trials failed, ...); exit status 3.
    class NumericalError : public std::runtime_error
    {
    public:
        explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
    };

    // x y^H for row vectors
    inline cdouble inner(const CVector &x, const CVector &y)
    {
        if (x.size() != y.size())
            throw std::invalid_argument("inner: dimension mismatch");
        return (x * y.adjoint())(0, 0);
    }

    inline CVector unit(const CVector &v)
    {
        const double n = v.norm();
        if (!(n > 0.0))
            throw std::domain_error("unit: zero vector has no direction");
        return v / n;
    }

    // Row vector [blocks[0], blocks[1], ...]
    inline CVector concat(const std::vector<CVector> &blocks)
    {
        Eigen::Index len = 0;
        for (const auto &b : blocks)
            len += b.size();
        CVector out(len);
        Eigen::Index pos = 0;
        for (const auto &b : blocks)
        {
            out.segment(pos, b.size()) = b;
            pos += b.size();
        }
        return out;
    }

    // Stack row vectors into a K x M matrix.
    inline CMatrix stack_rows(const std::vector<CVector> &rows)
    {
        if (rows.empty())
            return CMatrix(0, 0);
        CMatrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            if (rows[i].size() != m.cols())
                throw std::invalid_argument("stack_rows: rows of unequal length");
            m.row(static_cast<Eigen::Index>(i)) = rows[i];
        }
        return m;
    }

    inline double mean(const std::vector<double> &v)
    {
        if (v.empty())
            return 0.0;
        double s = 0.0;
        for (double x : v)
            s += x;
        return s / static_cast<double>(v.size());
    }

    // Standard error of the sample mean (unbiased variance).
    inline double standard_error(const std::vector<double> &v)
    {
        const std::size_t n = v.size();
        if (n < 2)
            return 0.0;
        const double m = mean(v);
        double ss = 0.0;
        for (double x : v)
            ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
} // namespace mucomp

#endif
