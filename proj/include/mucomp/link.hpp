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


#ifndef MUCOMP_LINK_HPP
#define MUCOMP_LINK_HPP

// One downlink transmission: feedback construction, ZF on the reconstructed channels,
// and rate evaluation against the true channels.

#include "feedback.hpp"
#include "precoding.hpp"

namespace mucomp
{
    struct FeedbackSetup
    {
        FeedbackKind kind = FeedbackKind::perfect;
        LinkCodebooks per_cell;          // per_cell: [user][bs]
        std::vector<CodebookPtr> global; // global: [user]
        bool phase_aligned = true;
    };

    inline FeedbackReport make_feedback(const FeedbackSetup &setup, const ChannelRealization &real,
                                        const LargeScaleMap &ls)
    {
        switch (setup.kind)
        {
        case FeedbackKind::perfect:
            return perfect_feedback(real, ls);
        case FeedbackKind::per_cell:
            return per_cell_feedback(real, ls, setup.per_cell, setup.phase_aligned);
        case FeedbackKind::global:
            return global_feedback(real, ls, setup.global);
        }
        throw std::logic_error("make_feedback: unknown kind");
    }

    struct TrialRates
    {
        bool ok = false;
        std::vector<double> rate;         // log2(1 + SINR_k)
        std::vector<double> interference; // P sum_{j != k} |g_k v_j|^2
        std::string failure;
    };

    inline TrialRates transmit(const std::vector<CVector> &true_channels, const std::vector<CVector> &reconstructed,
                               double tx_power, double noise, double condition_cap = default_condition_cap)
    {
        TrialRates t;
        try
        {
            const Precoder p = zf_precoder(reconstructed, condition_cap);
            t.rate = instantaneous_rate(sinr(true_channels, p, tx_power, noise));
            t.interference = interference_power(true_channels, p, tx_power);
            t.ok = true;
        }
        catch (const PrecodingError &e)
        {
            t.failure = e.what();
        }
        return t;
    }
} // namespace mucomp

#endif
