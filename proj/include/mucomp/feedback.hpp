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


#ifndef MUCOMP_FEEDBACK_HPP
#define MUCOMP_FEEDBACK_HPP

#include "channel.hpp"
#include "codebook.hpp"

#include <limits>
#include <memory>

namespace mucomp
{
    using CodebookPtr = std::shared_ptr<const Codebook>;
    // [user][bs] -> codebook quantizing h_{k,b}
    using LinkCodebooks = std::vector<std::vector<CodebookPtr>>;

    enum class FeedbackKind
    {
        perfect,
        per_cell,
        global,
    };

    inline constexpr long not_applicable = -1;

    struct FeedbackReport
    {
        FeedbackKind kind = FeedbackKind::perfect;
        Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> indices; // i_{k,b}; global: (k,k) only
        RMatrix error;                                               // sin^2 theta_{k,b}; NaN where not applicable
        RMatrix norms;                                               // rho_{k,b} = alpha_{k,b} ||h_{k,b}||
        std::vector<std::vector<CVector>> directions;                // hat h_{k,b} (unit); empty for global
        std::vector<CVector> reconstructed;                          // hat g_k
        std::vector<unsigned> total_bits;                            // sum_b B_{k,b} per user

        std::size_t users() const { return reconstructed.size(); }
    };

    namespace detail
    {
        inline RMatrix block_norms(const ChannelRealization &real, const LargeScaleMap &ls)
        {
            RMatrix rho(static_cast<Eigen::Index>(real.users()), static_cast<Eigen::Index>(real.cells()));
            for (std::size_t k = 0; k < real.users(); ++k)
                for (std::size_t b = 0; b < real.cells(); ++b)
                {
                    const auto K = static_cast<Eigen::Index>(k), B = static_cast<Eigen::Index>(b);
                    rho(K, B) = std::sqrt(ls.alpha_sq(K, B)) * real.small_scale[k][b].norm();
                }
            return rho;
        }

        inline void check_dims(const ChannelRealization &real, const LargeScaleMap &ls)
        {
            if (real.global.size() != real.users())
                throw std::invalid_argument("feedback: realization has no global channels (call assemble_global)");
            if (static_cast<Eigen::Index>(real.users()) != ls.users() ||
                static_cast<Eigen::Index>(real.cells()) != ls.cells())
                throw std::invalid_argument("feedback: large-scale map does not match realization");
        }
    } // namespace detail

    // Ideal CSI: hat g_k = g_k.
    inline FeedbackReport perfect_feedback(const ChannelRealization &real, const LargeScaleMap &ls)
    {
        detail::check_dims(real, ls);
        const auto K = static_cast<Eigen::Index>(real.users()), N = static_cast<Eigen::Index>(real.cells());
        FeedbackReport r;
        r.kind = FeedbackKind::perfect;
        r.indices.setConstant(K, N, not_applicable);
        r.error.setZero(K, N);
        r.norms = detail::block_norms(real, ls);
        r.directions.assign(real.users(), {});
        for (std::size_t k = 0; k < real.users(); ++k)
            for (std::size_t b = 0; b < real.cells(); ++b)
                r.directions[k].push_back(unit(real.small_scale[k][b]));
        r.reconstructed = real.global;
        r.total_bits.assign(real.users(), 0);
        return r;
    }

    // Each h_{k,b} quantized with its own codebook; hat g_k = [rho_{k,1} hat h_{k,1}, ..., rho_{k,N} hat h_{k,N}].
    // With phase_aligned, hat h_{k,b} = c_i e^{j phi} where phi = arg(hbar c_i^H), so that
    // hbar = cos(theta) hat h + sin(theta) s with real cos(theta) >= 0; otherwise hat h = c_i.
    //
    // A dither U[k][b] (unitary) replaces link (k, b)'s codebook by its rotated copy {c_i U}.
    using Dither = std::vector<std::vector<CMatrix>>;

    inline FeedbackReport per_cell_feedback(const ChannelRealization &real, const LargeScaleMap &ls,
                                            const LinkCodebooks &codebooks, bool phase_aligned = true,
                                            const Dither *dither = nullptr)
    {
        detail::check_dims(real, ls);
        if (codebooks.size() != real.users())
            throw std::invalid_argument("per_cell_feedback: need one codebook row per user");
        const auto K = static_cast<Eigen::Index>(real.users()), N = static_cast<Eigen::Index>(real.cells());
        FeedbackReport r;
        r.kind = FeedbackKind::per_cell;
        r.indices.resize(K, N);
        r.error.resize(K, N);
        r.norms = detail::block_norms(real, ls);
        r.directions.assign(real.users(), std::vector<CVector>(real.cells()));
        r.reconstructed.resize(real.users());
        r.total_bits.assign(real.users(), 0);
        for (std::size_t k = 0; k < real.users(); ++k)
        {
            if (codebooks[k].size() != real.cells())
                throw std::invalid_argument("per_cell_feedback: need one codebook per link");
            std::vector<CVector> blocks(real.cells());
            for (std::size_t b = 0; b < real.cells(); ++b)
            {
                const Codebook &cb = *codebooks[k][b];
                if (cb.dimension() != real.n_tx)
                    throw std::invalid_argument("per_cell_feedback: codebook dimension " + std::to_string(cb.dimension()) +
                                                " != n_tx " + std::to_string(real.n_tx));
                const CMatrix *u = dither ? &(*dither).at(k).at(b) : nullptr;
                const Quantized q = u ? quantize_direction(real.small_scale[k][b] * u->adjoint(), cb)
                                      : quantize_direction(real.small_scale[k][b], cb);
                CVector hhat = u ? CVector(cb.codeword(q.index) * *u) : cb.codeword(q.index);
                if (phase_aligned && std::abs(q.projection) > 0.0)
                    hhat *= q.projection / std::abs(q.projection);
                const auto kk = static_cast<Eigen::Index>(k), bb = static_cast<Eigen::Index>(b);
                r.indices(kk, bb) = static_cast<long>(q.index);
                r.error(kk, bb) = q.error;
                r.directions[k][b] = hhat;
                blocks[b] = r.norms(kk, bb) * hhat;
                r.total_bits[k] += cb.bits();
            }
            r.reconstructed[k] = concat(blocks);
        }
        return r;
    }

    // gbar_k = g_k / ||g_k|| quantized as one vector; hat g_k = ||g_k|| * codeword.
    // Error and index live in entry (k, k); other entries are not applicable.
    inline FeedbackReport global_feedback(const ChannelRealization &real, const LargeScaleMap &ls,
                                          const std::vector<CodebookPtr> &codebooks)
    {
        detail::check_dims(real, ls);
        if (real.users() != real.cells())
            throw ConfigError("global_feedback: requires one user per cell");
        if (codebooks.size() != real.users())
            throw std::invalid_argument("global_feedback: need one codebook per user");
        const auto K = static_cast<Eigen::Index>(real.users()), N = static_cast<Eigen::Index>(real.cells());
        FeedbackReport r;
        r.kind = FeedbackKind::global;
        r.indices.setConstant(K, N, not_applicable);
        r.error.setConstant(K, N, std::numeric_limits<double>::quiet_NaN());
        r.norms = detail::block_norms(real, ls);
        r.reconstructed.resize(real.users());
        r.total_bits.assign(real.users(), 0);
        for (std::size_t k = 0; k < real.users(); ++k)
        {
            const Codebook &cb = *codebooks[k];
            if (cb.dimension() != static_cast<std::size_t>(real.global[k].size()))
                throw std::invalid_argument("global_feedback: codebook dimension must equal N * n_tx");
            const Quantized q = quantize_direction(real.global[k], cb);
            const auto kk = static_cast<Eigen::Index>(k);
            r.indices(kk, kk) = static_cast<long>(q.index);
            r.error(kk, kk) = q.error;
            r.reconstructed[k] = real.global[k].norm() * cb.codeword(q.index);
            r.total_bits[k] = cb.bits();
        }
        return r;
    }

    // Chordal error between gbar and hat g / ||hat g||.
    inline double global_chordal_error(const CVector &g, const CVector &ghat)
    {
        const double c = std::norm(inner(unit(g), unit(ghat)));
        return std::clamp(1.0 - c, 0.0, 1.0);
    }
} // namespace mucomp

#endif
