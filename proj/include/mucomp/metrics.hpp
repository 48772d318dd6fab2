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


#ifndef MUCOMP_METRICS_HPP
#define MUCOMP_METRICS_HPP

// Long-format CSV output, one value per row.

#include "montecarlo.hpp"
#include "numfmt.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace mucomp
{
    struct MetricsRow
    {
        std::string experiment;
        std::string arm;
        std::string sweep_variable;
        double sweep_value = 0.0;
        std::size_t user = 0; // 1-based; 0 when not user-specific
        std::string metric;
        double value = 0.0;
        std::size_t trials = 0;
        std::uint64_t seed = 0;
    };

    inline constexpr const char *metrics_header = "experiment,arm,sweep_variable,sweep_value,user,metric,value,trials,seed";

    namespace detail
    {
        inline std::string csv_field(const std::string &s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char c : s)
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
        }
    } // namespace detail

    inline void write_csv(std::ostream &os, const std::vector<MetricsRow> &rows)
    {
        os << metrics_header << '\n';
        for (const auto &r : rows)
        {
            if (!std::isfinite(r.value) || !std::isfinite(r.sweep_value))
                throw NumericalError("write_csv: non-finite value for metric " + r.metric);
            os << detail::csv_field(r.experiment) << ',' << detail::csv_field(r.arm) << ','
               << detail::csv_field(r.sweep_variable) << ',' << format_double(r.sweep_value) << ',' << std::to_string(r.user) << ','
               << detail::csv_field(r.metric) << ',' << format_double(r.value) << ',' << std::to_string(r.trials) << ',' << std::to_string(r.seed)
               << '\n';
        }
    }

    inline std::vector<MetricsRow> to_rows(const ExperimentResult &res)
    {
        std::vector<MetricsRow> rows;
        for (const auto &r : res.runs)
        {
            auto add = [&](std::size_t user, const std::string &metric, double v)
            { rows.push_back({res.name, r.arm, res.sweep_variable, r.sweep_value, user, metric, v, r.trials, r.seed}); };
            for (std::size_t k = 0; k < r.throughput.size(); ++k)
            {
                add(k + 1, "throughput_mean", r.throughput[k].mean);
                add(k + 1, "throughput_se", r.throughput[k].se);
                add(k + 1, "ideal_throughput_mean", r.ideal_throughput[k].mean);
                add(k + 1, "rate_loss_mc", r.rate_loss[k].mean);
                add(k + 1, "rate_loss_se", r.rate_loss[k].se);
                if (std::isfinite(r.rate_loss_bound[k]))
                    add(k + 1, "rate_loss_bound", r.rate_loss_bound[k]);
            }
            add(0, "failures", static_cast<double>(r.failures));
        }
        return rows;
    }

    // Empirical CDF rows: sweep_value is the cumulative probability, value the per-drop throughput.
    inline std::vector<MetricsRow> to_rows(const CdfResult &res)
    {
        std::vector<MetricsRow> rows;
        for (const auto &a : res.arms)
        {
            for (std::size_t k = 0; k < a.sorted.size(); ++k)
            {
                const auto &v = a.sorted[k];
                for (std::size_t i = 0; i < v.size(); ++i)
                    rows.push_back({res.name, a.arm, "cdf", static_cast<double>(i + 1) / static_cast<double>(v.size()),
                                    k + 1, "throughput_cdf", v[i], res.trials_per_drop, res.seed});
                rows.push_back({res.name, a.arm, "none", 0.0, k + 1, "median_throughput", a.median(k),
                                res.trials_per_drop, res.seed});
            }
            rows.push_back({res.name, a.arm, "none", 0.0, 0, "failures", static_cast<double>(a.failed_trials),
                            res.trials_per_drop, res.seed});
        }
        return rows;
    }

    // Derivation-step diagnostics; value is lhs, rhs follows as a separate metric.
    inline std::vector<MetricsRow> to_rows(const AppendixReport &rep, const std::string &experiment, std::size_t trials,
                                           std::uint64_t seed)
    {
        std::vector<MetricsRow> rows;
        for (const auto &c : rep.checks)
        {
            rows.push_back({experiment, "appendix", "none", 0.0, 0, "appendix_check:" + c.step + ":lhs", c.lhs, trials, seed});
            rows.push_back({experiment, "appendix", "none", 0.0, 0, "appendix_check:" + c.step + ":rhs", c.rhs, trials, seed});
            rows.push_back({experiment, "appendix", "none", 0.0, 0, "appendix_check:" + c.step + ":pass",
                            c.status == CheckStatus::pass ? 1.0 : 0.0, trials, seed});
        }
        return rows;
    }
} // namespace mucomp

#endif
