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


#ifndef MUCOMP_PRECODING_HPP
#define MUCOMP_PRECODING_HPP

#include "linalg.hpp"

#include <Eigen/SVD>

#include <cstdint>
#include <cstring>

namespace mucomp
{
    class PrecodingError : public NumericalError
    {
    public:
        explicit PrecodingError(const std::string &what) : NumericalError(what) {}
    };

    struct Precoder
    {
        CMatrix columns; // M x K, column k = v_k, unit norm
        std::uint64_t source_channel_hash = 0;
        double condition_number = 1.0;

        Eigen::Index users() const { return columns.cols(); }
        CColumn column(Eigen::Index k) const { return columns.col(k); }
    };

    // FNV-1a over the raw doubles of the reconstructed channels; binds a precoder to its input.
    inline std::uint64_t channel_hash(const std::vector<CVector> &rows)
    {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&](double x)
        {
            unsigned char b[sizeof(double)];
            std::memcpy(b, &x, sizeof(double));
            for (unsigned char c : b)
            {
                h ^= c;
                h *= 1099511628211ULL;
            }
        };
        for (const auto &r : rows)
            for (Eigen::Index i = 0; i < r.size(); ++i)
            {
                mix(r(i).real());
                mix(r(i).imag());
            }
        return h;
    }

    inline constexpr double default_condition_cap = 1e8;

    // Multicell ZF: V = H^H (H H^H)^{-1}, columns normalized to unit norm (per-user power).
    // The pseudo-inverse is taken from an SVD of H; rank-deficient or ill-conditioned H is rejected.
    inline Precoder zf_precoder(const std::vector<CVector> &reconstructed, double condition_cap = default_condition_cap)
    {
        if (reconstructed.empty())
            throw std::invalid_argument("zf_precoder: no users");
        const CMatrix H = stack_rows(reconstructed);
        if (H.rows() > H.cols())
            throw PrecodingError("zf_precoder: more users than transmit antennas");
        Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto &s = svd.singularValues();
        const double smax = s(0);
        const double smin = s(s.size() - 1);
        if (!(smin > 0.0) || !(smax / smin <= condition_cap))
            throw PrecodingError("zf_precoder: channel matrix rank-deficient or ill-conditioned (cond > " +
                                 std::to_string(condition_cap) + ")");
        const CMatrix V = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
        Precoder p;
        p.columns = V;
        for (Eigen::Index k = 0; k < V.cols(); ++k)
            p.columns.col(k) /= V.col(k).norm();
        p.source_channel_hash = channel_hash(reconstructed);
        p.condition_number = smax / smin;
        return p;
    }

    // SINR_k = P |g_k v_k|^2 / (noise + P sum_{j != k} |g_k v_j|^2), evaluated on the true channels.
    inline std::vector<double> sinr(const std::vector<CVector> &true_channels, const Precoder &pc, double tx_power,
                                    double noise)
    {
        if (static_cast<Eigen::Index>(true_channels.size()) != pc.users())
            throw std::invalid_argument("sinr: number of channels does not match precoder");
        const CMatrix G = stack_rows(true_channels);
        if (G.cols() != pc.columns.rows())
            throw std::invalid_argument("sinr: channel length does not match precoder");
        const RMatrix gain = (G * pc.columns).cwiseAbs2();
        std::vector<double> out(true_channels.size());
        for (Eigen::Index k = 0; k < gain.rows(); ++k)
        {
            const double signal = tx_power * gain(k, k);
            const double interference = tx_power * (gain.row(k).sum() - gain(k, k));
            out[static_cast<std::size_t>(k)] = signal / (noise + std::max(interference, 0.0));
        }
        return out;
    }

    // Residual interference power P sum_{j != k} |g_k v_j|^2.
    inline std::vector<double> interference_power(const std::vector<CVector> &true_channels, const Precoder &pc,
                                                  double tx_power)
    {
        const RMatrix gain = (stack_rows(true_channels) * pc.columns).cwiseAbs2();
        std::vector<double> out(true_channels.size());
        for (Eigen::Index k = 0; k < gain.rows(); ++k)
            out[static_cast<std::size_t>(k)] = tx_power * std::max(gain.row(k).sum() - gain(k, k), 0.0);
        return out;
    }

    // log2(1 + SINR_k)
    inline std::vector<double> instantaneous_rate(const std::vector<double> &sinr_values)
    {
        std::vector<double> r;
        r.reserve(sinr_values.size());
        for (double s : sinr_values)
        {
            if (!(s >= 0.0))
                throw std::domain_error("instantaneous_rate: SINR must be nonnegative");
            r.push_back(std::log2(1.0 + s));
        }
        return r;
    }
} // namespace mucomp

#endif
