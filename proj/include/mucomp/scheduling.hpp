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


#ifndef MUCOMP_SCHEDULING_HPP
#define MUCOMP_SCHEDULING_HPP

#include "linalg.hpp"

#include <optional>
#include <string>

namespace mucomp
{
    enum class PairingMode
    {
        fixed,         // designated user per cell, unconditionally
        sus_threshold, // greedy semi-orthogonal user selection on quantized channels
        always_pair,   // first user of every cell, no orthogonality check
    };

    struct PairingPolicy
    {
        PairingMode mode = PairingMode::always_pair;
        double threshold = 0.3;
        std::size_t candidate_pool_size = 1;

        bool operator==(const PairingPolicy &) const = default;

        std::vector<std::string> check() const
        {
            std::vector<std::string> e;
            if (!(threshold >= 0.0 && threshold <= 1.0))
                e.emplace_back("threshold: must lie in [0, 1]");
            if (candidate_pool_size < 1)
                e.emplace_back("candidate_pool_size: must be >= 1");
            return e;
        }
    };

    // |a b^H| / (||a|| ||b||)
    inline double quantized_correlation(const CVector &a, const CVector &b)
    {
        const double na = a.norm(), nb = b.norm();
        if (!(na > 0.0) || !(nb > 0.0))
            throw std::domain_error("quantized_correlation: zero vector");
        return std::min(1.0, std::abs(inner(a, b)) / (na * nb));
    }

    struct Selection
    {
        bool accepted = false;
        std::vector<std::size_t> chosen; // index into each cell's candidate list
        std::string reason;
    };

    // A candidate is admissible if its correlation with every already-selected user is below the
    // threshold; threshold 1 imposes no constraint.
    inline bool admissible(const CVector &g, const std::vector<const CVector *> &selected, double threshold)
    {
        if (threshold >= 1.0)
            return true;
        for (const CVector *s : selected)
            if (!(quantized_correlation(g, *s) < threshold))
                return false;
        return true;
    }

    // candidates[cell] = reconstructed channels hat g of that cell's candidate users.
    inline Selection select_pairing(const std::vector<std::vector<CVector>> &candidates, const PairingPolicy &policy,
                                    const std::vector<std::size_t> &designated = {})
    {
        if (candidates.empty())
            throw ConfigError("select_pairing: no cells");
        for (std::size_t c = 0; c < candidates.size(); ++c)
            if (candidates[c].empty())
                throw ConfigError("select_pairing: cell " + std::to_string(c) + " has no candidates");
        auto e = policy.check();
        if (!e.empty())
            throw ConfigError("select_pairing: " + e.front(), e);

        Selection sel;
        if (policy.mode == PairingMode::always_pair)
        {
            sel.accepted = true;
            sel.chosen.assign(candidates.size(), 0);
            return sel;
        }
        if (policy.mode == PairingMode::fixed)
        {
            sel.chosen = designated.empty() ? std::vector<std::size_t>(candidates.size(), 0) : designated;
            if (sel.chosen.size() != candidates.size())
                throw ConfigError("select_pairing: need one designated user per cell");
            for (std::size_t c = 0; c < candidates.size(); ++c)
                if (sel.chosen[c] >= candidates[c].size())
                    throw ConfigError("select_pairing: designated user out of range in cell " + std::to_string(c));
            sel.accepted = true;
            return sel;
        }

        std::vector<const CVector *> selected;
        for (std::size_t c = 0; c < candidates.size(); ++c)
        {
            std::optional<std::size_t> best;
            double best_norm = -1.0;
            for (std::size_t i = 0; i < candidates[c].size(); ++i)
            {
                const CVector &g = candidates[c][i];
                const double n = g.norm();
                if (n > best_norm && admissible(g, selected, policy.threshold))
                {
                    best = i;
                    best_norm = n;
                }
            }
            if (!best)
            {
                sel.accepted = false;
                sel.reason = "no candidate in cell " + std::to_string(c) + " is semi-orthogonal to the selected users";
                return sel;
            }
            sel.chosen.push_back(*best);
            selected.push_back(&candidates[c][*best]);
        }
        sel.accepted = true;
        return sel;
    }
} // namespace mucomp

#endif
