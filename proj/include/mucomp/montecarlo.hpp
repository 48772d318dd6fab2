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


#ifndef MUCOMP_MONTECARLO_HPP
#define MUCOMP_MONTECARLO_HPP

// Scenario runner: codebook provisioning, per-trial simulation and deterministic aggregation.

#include "bounds.hpp"
#include "codebook_io.hpp"
#include "link.hpp"
#include "parallel.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace mucomp
{
    // Trains (or loads) codebooks once per key and hands out shared immutable copies. Distinct keys
    // may be built concurrently; a second request for a key in progress waits for the first.
    class CodebookStore
    {
    public:
        explicit CodebookStore(CodebookConfig cfg) : cfg_(std::move(cfg)) {}

        const CodebookConfig &config() const { return cfg_; }

        // Codebook for isotropic block directions, with E{sin^2 theta} attached.
        CodebookPtr isotropic(std::size_t dim, unsigned bits)
        {
            const std::string key = std::to_string(dim) + ":" + std::to_string(bits);
            return once("iso/" + key, [&]
                        {
                            Codebook cb;
                            if (auto f = cfg_.files.find(key); f != cfg_.files.end())
                            {
                                cb = load_codebook(f->second);
                                if (cb.dimension() != dim || cb.bits() != bits)
                                    throw ConfigError("codebook file " + f->second + " does not have dimension " +
                                                          std::to_string(dim) + " and " + std::to_string(bits) + " bits",
                                                      {"codebooks.files." + key + ": dimension or bit count mismatch"});
                            }
                            else if (cfg_.kind == CodebookKind::random)
                                cb = random_codebook(dim, bits, cfg_.seed);
                            else
                                cb = train_isotropic_lloyd(dim, bits, cfg_.seed, cfg_.training_factor, options());
                            if (!cb.expected_error())
                                cb.set_expected_error(estimate_expected_error(cb, cfg_.error_samples, cfg_.seed));
                            return cb; });
        }

        // Codebook adapted to a non-isotropic direction distribution; `draw` yields one unit sample.
        CodebookPtr adapted(const std::string &key, std::size_t dim, unsigned bits,
                            const std::function<CVector(Rng &)> &draw)
        {
            return once("adapted/" + key, [&]
                        {
                            std::uint64_t h = 0xcbf29ce484222325ULL;
                            for (unsigned char c : key)
                                h = (h ^ c) * 0x100000001b3ULL;
                            const std::uint64_t seed = derive_seed(cfg_.seed, StreamTag::codebook_training, {dim, bits, h});
                            if (cfg_.kind == CodebookKind::random)
                                return random_codebook(dim, bits, seed);
                            const auto n = static_cast<std::size_t>(
                                std::ceil(cfg_.training_factor * static_cast<double>(std::size_t{1} << bits)));
                            Rng rng(seed);
                            std::vector<CVector> samples;
                            samples.reserve(n);
                            for (std::size_t i = 0; i < n; ++i)
                                samples.push_back(draw(rng));
                            return train_lloyd(dim, bits, samples, options(), seed); });
        }

        std::size_t size() const
        {
            std::lock_guard lock(mutex_);
            return cache_.size();
        }

    private:
        template <class Build>
        CodebookPtr once(const std::string &key, Build &&build)
        {
            std::promise<CodebookPtr> promise;
            std::shared_future<CodebookPtr> future;
            {
                std::lock_guard lock(mutex_);
                if (auto it = cache_.find(key); it != cache_.end())
                    future = it->second;
                else
                    cache_.emplace(key, promise.get_future().share());
            }
            if (future.valid())
                return future.get();
            try
            {
                auto p = std::make_shared<const Codebook>(build());
                promise.set_value(p);
                return p;
            }
            catch (...)
            {
                promise.set_exception(std::current_exception());
                throw;
            }
        }

        LloydOptions options() const
        {
            LloydOptions o;
            o.max_iters = cfg_.max_iters;
            o.tol = cfg_.tol;
            return o;
        }

        CodebookConfig cfg_;
        mutable std::mutex mutex_;
        std::map<std::string, std::shared_future<CodebookPtr>> cache_;
    };

    struct Stat
    {
        double mean = 0.0;
        double se = 0.0;
    };

    // Aggregate of one arm at one sweep point (or over all drops of a random-placement run).
    struct RunResult
    {
        std::string arm;
        std::size_t point = 0;
        double sweep_value = 0.0;
        std::vector<Stat> throughput;       // per user, quantized feedback
        std::vector<Stat> ideal_throughput; // per user, perfect CSI for the same users and channels
        std::vector<Stat> rate_loss;        // per user, ideal minus quantized, paired
        std::vector<double> rate_loss_bound; // per user; NaN where no closed form applies
        std::vector<std::vector<double>> samples; // per user quantized rates (retain_samples only)
        std::size_t trials = 0;
        std::size_t successes = 0;
        std::size_t failures = 0;
        std::uint64_t config_fingerprint = 0;
        std::uint64_t seed = 0;
    };

    struct ExperimentResult
    {
        std::string name;
        std::string sweep_variable; // "ms<k>_distance_m", or "none"
        std::vector<double> sweep_values;
        std::vector<RunResult> runs; // arm-major: runs[a * points + p]
        std::uint64_t config_fingerprint = 0;
        std::uint64_t seed = 0;

        const RunResult &at(const std::string &arm, std::size_t point) const
        {
            for (const auto &r : runs)
                if (r.arm == arm && r.point == point)
                    return r;
            throw std::out_of_range("no result for arm '" + arm + "' at point " + std::to_string(point));
        }
    };

    struct RunOptions
    {
        std::size_t workers = 1;
        CodebookStore *store = nullptr; // optional shared cache
    };

    namespace detail
    {
        struct PreparedArm
        {
            const Arm *arm = nullptr;
            ArmLayout layout;
            std::uint64_t layout_id = 0;
            std::vector<Point> positions;
            LargeScaleMap ls;
            FeedbackSetup setup;
        };

        struct TrialOutcome
        {
            bool ok = false;
            std::vector<double> rate;
            std::vector<double> ideal;
        };

        inline std::uint64_t layout_id(Layout l) { return l == Layout::comp ? 0 : 1; }

        // Draw of a normalized global channel direction for a user at `pos`.
        inline CVector draw_global_direction(const Geometry &g, std::size_t n_tx, const RMatrix &alpha_row, Rng &rng)
        {
            std::vector<CVector> blocks;
            for (std::size_t b = 0; b < g.n_cells; ++b)
                blocks.push_back(std::sqrt(alpha_row(0, static_cast<Eigen::Index>(b))) *
                                 rng.complex_normal_vector(static_cast<Eigen::Index>(n_tx)));
            return unit(concat(blocks));
        }

        inline FeedbackSetup provision(const Scenario &s, const Arm &arm, const ArmLayout &l, CodebookStore &store,
                                       const std::function<RMatrix(std::size_t user, Rng &)> &alpha_sampler,
                                       const std::string &point_key)
        {
            FeedbackSetup f;
            f.kind = arm.feedback.mode;
            f.phase_aligned = arm.feedback.phase_aligned;
            const std::size_t K = l.geometry.n_users();
            if (f.kind == FeedbackKind::per_cell)
            {
                f.per_cell.resize(K);
                for (std::size_t k = 0; k < K; ++k)
                    for (int bits : arm.feedback.bits[k])
                        f.per_cell[k].push_back(store.isotropic(l.n_tx, static_cast<unsigned>(bits)));
            }
            if (f.kind == FeedbackKind::global)
            {
                const std::size_t dim = l.geometry.n_cells * l.n_tx;
                for (std::size_t k = 0; k < K; ++k)
                {
                    const std::string key = s.name + "/" + point_key + "/user" + std::to_string(k) + "/" +
                                            std::to_string(dim) + ":" + std::to_string(arm.feedback.global_bits);
                    f.global.push_back(store.adapted(key, dim, static_cast<unsigned>(arm.feedback.global_bits),
                                                     [&, k](Rng &rng)
                                                     { return draw_global_direction(l.geometry, l.n_tx, alpha_sampler(k, rng), rng); }));
                }
            }
            return f;
        }

        inline RMatrix expected_error_matrix(const FeedbackSetup &f)
        {
            const auto K = static_cast<Eigen::Index>(f.per_cell.size());
            const auto N = K ? static_cast<Eigen::Index>(f.per_cell.front().size()) : 0;
            RMatrix e(K, N);
            for (Eigen::Index k = 0; k < K; ++k)
                for (Eigen::Index b = 0; b < N; ++b)
                    e(k, b) = f.per_cell[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]->expected_error()->mean;
            return e;
        }

        inline std::vector<double> bound_row(const PreparedArm &pa)
        {
            const auto K = static_cast<std::size_t>(pa.ls.users());
            std::vector<double> out(K, std::numeric_limits<double>::quiet_NaN());
            if (K < 2)
                return out;
            if (pa.setup.kind == FeedbackKind::perfect)
                return std::vector<double>(K, 0.0);
            if (pa.setup.kind != FeedbackKind::per_cell)
                return out;
            const auto p = RateLossParams::from_large_scale(pa.ls, pa.layout.n_tx, expected_error_matrix(pa.setup));
            for (std::size_t k = 0; k < K; ++k)
                out[k] = rate_loss_bound_general(p, k).value;
            return out;
        }

        // One trial of one arm. `counters` identifies the channel draw and is shared by all arms of a layout.
        inline TrialOutcome run_trial(const Scenario &s, const PreparedArm &pa, std::uint64_t point, std::uint64_t trial)
        {
            const std::size_t K = pa.layout.geometry.n_users(), N = pa.layout.geometry.n_cells, nt = pa.layout.n_tx;
            const double P = pa.ls.tx_power, n0 = pa.ls.noise;
            TrialOutcome out;
            ChannelRealization real;
            FeedbackReport fb;
            if (s.pairing.mode == PairingMode::sus_threshold)
            {
                Rng rng(s.master_seed, StreamTag::candidate_pool, {point, trial, pa.layout_id});
                const std::size_t pool = s.pairing.candidate_pool_size;
                std::vector<ChannelRealization> reals;
                std::vector<FeedbackReport> fbs;
                std::vector<std::vector<CVector>> candidates(N);
                for (std::size_t i = 0; i < pool; ++i)
                {
                    reals.push_back(sample_small_scale(K, N, nt, rng));
                    assemble_global(reals.back(), pa.ls);
                    fbs.push_back(make_feedback(pa.setup, reals.back(), pa.ls));
                    for (std::size_t c = 0; c < N; ++c)
                        candidates[c].push_back(fbs.back().reconstructed[c]);
                }
                const Selection sel = select_pairing(candidates, s.pairing);
                if (!sel.accepted)
                    return out;
                real.n_tx = nt;
                real.small_scale.resize(K);
                real.global.resize(K);
                fb.reconstructed.resize(K);
                for (std::size_t c = 0; c < K; ++c)
                {
                    real.small_scale[c] = reals[sel.chosen[c]].small_scale[c];
                    real.global[c] = reals[sel.chosen[c]].global[c];
                    fb.reconstructed[c] = fbs[sel.chosen[c]].reconstructed[c];
                }
            }
            else
            {
                Rng rng(s.master_seed, StreamTag::small_scale, {point, trial, pa.layout_id});
                real = sample_small_scale(K, N, nt, rng);
                assemble_global(real, pa.ls);
                fb = make_feedback(pa.setup, real, pa.ls);
            }
            const TrialRates ideal = transmit(real.global, real.global, P, n0, s.condition_cap);
            const TrialRates quant = pa.setup.kind == FeedbackKind::perfect
                                         ? ideal
                                         : transmit(real.global, fb.reconstructed, P, n0, s.condition_cap);
            if (!ideal.ok || !quant.ok)
                return out;
            out.ok = true;
            out.rate = quant.rate;
            out.ideal = ideal.rate;
            return out;
        }

        inline std::vector<Point> base_positions(const Scenario &s, const Arm &arm)
        {
            return arm.positions ? *arm.positions : s.placement.positions;
        }

        inline std::size_t cell_of(const Geometry &g, std::size_t user) { return user / g.users_per_cell; }

        inline RunResult summarize(const std::vector<TrialOutcome> &slots, std::size_t K, bool retain)
        {
            RunResult r;
            r.trials = slots.size();
            std::vector<std::vector<double>> q(K), id(K), d(K);
            for (const auto &o : slots)
            {
                if (!o.ok)
                {
                    ++r.failures;
                    continue;
                }
                ++r.successes;
                for (std::size_t k = 0; k < K; ++k)
                {
                    q[k].push_back(o.rate[k]);
                    id[k].push_back(o.ideal[k]);
                    d[k].push_back(o.ideal[k] - o.rate[k]);
                }
            }
            for (std::size_t k = 0; k < K; ++k)
            {
                r.throughput.push_back({mean(q[k]), standard_error(q[k])});
                r.ideal_throughput.push_back({mean(id[k]), standard_error(id[k])});
                r.rate_loss.push_back({mean(d[k]), standard_error(d[k])});
            }
            if (retain)
                r.samples = std::move(q);
            return r;
        }
    } // namespace detail

    // User positions of an arm, with the swept user moved to `sweep_value` when given.
    inline std::vector<Point> positions_at(const Scenario &s, const Arm &arm, std::optional<double> sweep_value)
    {
        std::vector<Point> pos = detail::base_positions(s, arm);
        if (sweep_value)
        {
            if (s.placement.mode != PlacementMode::line_sweep)
                throw ConfigError("positions_at: scenario has no swept user");
            const Geometry g = arm_layout(s, arm).geometry;
            const std::size_t u = s.placement.sweep.user;
            pos.at(u) = point_toward_neighbour(g, detail::cell_of(g, u), *sweep_value);
        }
        return pos;
    }

    // Large-scale map and provisioned feedback of one arm at fixed user positions.
    inline LinkModel link_model(const Scenario &s, const Arm &arm, const std::vector<Point> &positions,
                                CodebookStore &store)
    {
        const ArmLayout l = arm_layout(s, arm);
        LinkModel m;
        m.large_scale = build_large_scale(positions, l.geometry, l.user_power, s.noise);
        m.n_tx = l.n_tx;
        m.condition_cap = s.condition_cap;
        const RMatrix alpha = m.large_scale.alpha_sq;
        std::string point_key = "p";
        for (const auto &pt : positions)
            point_key += format_double(pt.x) + "," + format_double(pt.y) + ";";
        m.feedback = detail::provision(s, arm, l, store,
                                       [alpha](std::size_t k, Rng &) -> RMatrix
                                       { return alpha.row(static_cast<Eigen::Index>(k)); },
                                       point_key);
        return m;
    }

    // Closed-form bound per user for per-cell feedback; zero for perfect CSI, NaN otherwise.
    inline std::vector<double> rate_loss_bounds(const LinkModel &m)
    {
        detail::PreparedArm pa;
        pa.ls = m.large_scale;
        pa.setup = m.feedback;
        pa.layout.n_tx = m.n_tx;
        return detail::bound_row(pa);
    }

    // Fixed or line-sweep placement: every arm at every sweep point.
    inline ExperimentResult run(const Scenario &s, const RunOptions &opt = {})
    {
        validate(s);
        if (s.placement.mode == PlacementMode::random_uniform)
            throw ConfigError("run: random_uniform placement is handled by run_cdf");
        std::unique_ptr<CodebookStore> own;
        CodebookStore *store = opt.store;
        if (!store)
        {
            own = std::make_unique<CodebookStore>(s.codebooks);
            store = own.get();
        }

        ExperimentResult res;
        res.name = s.name;
        res.config_fingerprint = fingerprint(s);
        res.seed = s.master_seed;
        const bool sweep = s.placement.mode == PlacementMode::line_sweep;
        res.sweep_values = sweep ? s.placement.sweep.values() : std::vector<double>{0.0};
        res.sweep_variable = sweep ? "ms" + std::to_string(s.placement.sweep.user + 1) + "_distance_m" : "none";
        const std::size_t points = res.sweep_values.size();

        // Prepare every (arm, point) up front so the trial loop only reads shared state.
        std::vector<detail::PreparedArm> prepared(s.arms.size() * points);
        parallel_for(prepared.size(), opt.workers, [&](std::size_t idx)
                     {
                         const Arm &arm = s.arms[idx / points];
                         const std::size_t p = idx % points;
                         detail::PreparedArm &pa = prepared[idx];
                         pa.arm = &arm;
                         pa.layout = arm_layout(s, arm);
                         pa.layout_id = detail::layout_id(arm.layout);
                         pa.positions = positions_at(s, arm, sweep ? std::optional<double>(res.sweep_values[p]) : std::nullopt);
                         LinkModel m = link_model(s, arm, pa.positions, *store);
                         pa.ls = std::move(m.large_scale);
                         pa.setup = std::move(m.feedback); });

        const std::size_t T = s.trials;
        std::vector<std::vector<detail::TrialOutcome>> slots(prepared.size(), std::vector<detail::TrialOutcome>(T));
        parallel_for(points * T, opt.workers, [&](std::size_t i)
                     {
                         const std::size_t p = i / T, t = i % T;
                         for (std::size_t a = 0; a < s.arms.size(); ++a)
                         {
                             const std::size_t idx = a * points + p;
                             slots[idx][t] = detail::run_trial(s, prepared[idx], p, t);
                         } });

        for (std::size_t idx = 0; idx < prepared.size(); ++idx)
        {
            const auto &pa = prepared[idx];
            const auto K = static_cast<std::size_t>(pa.ls.users());
            RunResult r = detail::summarize(slots[idx], K, s.outputs.retain_samples);
            if (r.successes == 0)
                throw NumericalError("arm '" + pa.arm->label + "': precoding failed in every trial at point " +
                                     std::to_string(idx % points));
            r.arm = pa.arm->label;
            r.point = idx % points;
            r.sweep_value = res.sweep_values[r.point];
            r.rate_loss_bound = detail::bound_row(pa);
            r.config_fingerprint = res.config_fingerprint;
            r.seed = s.master_seed;
            res.runs.push_back(std::move(r));
        }
        return res;
    }

    // Per-drop results of a random-placement run.
    struct CdfArm
    {
        std::string arm;
        std::vector<std::vector<double>> per_drop; // [user][drop], mean over the drop's successful trials; NaN if none
        std::vector<std::vector<double>> ideal_per_drop;
        std::vector<std::vector<double>> sorted;   // [user], ascending
        std::size_t failed_trials = 0;
        std::size_t empty_drops = 0; // drops with no successful trial; excluded from the CDF
        Stat throughput_user0;

        double quantile(std::size_t user, double q) const
        {
            const auto &v = sorted.at(user);
            if (v.empty())
                throw std::out_of_range("quantile: no samples");
            const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, v.size() - 1);
            return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
        }
        double median(std::size_t user = 0) const { return quantile(user, 0.5); }
    };

    struct CdfResult
    {
        std::string name;
        std::size_t drops = 0;
        std::size_t trials_per_drop = 0;
        std::vector<CdfArm> arms;
        std::uint64_t config_fingerprint = 0;
        std::uint64_t seed = 0;

        const CdfArm &at(const std::string &arm) const
        {
            for (const auto &a : arms)
                if (a.arm == arm)
                    return a;
            throw std::out_of_range("no result for arm '" + arm + "'");
        }
    };

    namespace detail
    {
        // User positions of one drop: each user uniform in its own cell disc. The single-cell layout
        // keeps the CoMP positions of the first cell's users and redraws the others inside that cell.
        inline std::vector<Point> drop_positions(const Geometry &comp, Layout layout, std::uint64_t master,
                                                 std::uint64_t drop)
        {
            Rng rng(master, StreamTag::placement, {drop});
            std::vector<Point> pos;
            for (std::size_t u = 0; u < comp.n_users(); ++u)
                pos.push_back(uniform_drop(comp.bs_positions[cell_of(comp, u)], comp.cell_radius_m, comp.min_distance_m, rng));
            if (layout == Layout::single_cell)
                for (std::size_t u = 0; u < comp.n_users(); ++u)
                    if (cell_of(comp, u) != 0)
                        pos[u] = uniform_drop(comp.bs_positions[0], comp.cell_radius_m, comp.min_distance_m, rng);
            return pos;
        }
    } // namespace detail

    // Random uniform drops: per drop, every arm runs `trials` small-scale realizations.
    inline CdfResult run_cdf(const Scenario &s, const RunOptions &opt = {})
    {
        validate(s);
        if (s.placement.mode != PlacementMode::random_uniform)
            throw ConfigError("run_cdf: needs random_uniform placement");
        std::unique_ptr<CodebookStore> own;
        CodebookStore *store = opt.store;
        if (!store)
        {
            own = std::make_unique<CodebookStore>(s.codebooks);
            store = own.get();
        }

        CdfResult res;
        res.name = s.name;
        res.drops = s.drops;
        res.trials_per_drop = s.trials;
        res.config_fingerprint = fingerprint(s);
        res.seed = s.master_seed;

        // Codebooks do not depend on the drop; adapted ones are trained over the drop distribution.
        std::vector<detail::PreparedArm> templates(s.arms.size());
        parallel_for(s.arms.size(), opt.workers, [&](std::size_t a)
        {
            const Arm &arm = s.arms[a];
            detail::PreparedArm &pa = templates[a];
            pa.arm = &arm;
            pa.layout = arm_layout(s, arm);
            pa.layout_id = detail::layout_id(arm.layout);
            const Geometry geom = pa.layout.geometry;
            const double power = pa.layout.user_power, noise = s.noise;
            pa.setup = detail::provision(s, arm, pa.layout, *store,
                                         [geom, power, noise](std::size_t k, Rng &rng) -> RMatrix
                                         {
                                             const Point p = uniform_drop(geom.bs_positions[detail::cell_of(geom, k)],
                                                                          geom.cell_radius_m, geom.min_distance_m, rng);
                                             std::vector<Point> all(geom.n_users(), p);
                                             return build_large_scale(all, geom, power, noise)
                                                 .alpha_sq.row(static_cast<Eigen::Index>(k));
                                         },
                                         "random");
        });

        const std::size_t A = s.arms.size(), D = s.drops, T = s.trials;
        struct DropSlot
        {
            std::vector<std::vector<double>> mean_rate, mean_ideal; // [arm][user]
            std::vector<std::size_t> failed;                        // [arm]
        };
        std::vector<DropSlot> slots(D);
        parallel_for(D, opt.workers, [&](std::size_t d)
                     {
                         DropSlot &slot = slots[d];
                         slot.mean_rate.resize(A);
                         slot.mean_ideal.resize(A);
                         slot.failed.assign(A, 0);
                         for (std::size_t a = 0; a < A; ++a)
                         {
                             detail::PreparedArm pa = templates[a];
                             pa.positions = detail::drop_positions(s.geometry, pa.arm->layout, s.master_seed, d);
                             pa.ls = build_large_scale(pa.positions, pa.layout.geometry, pa.layout.user_power, s.noise);
                             const std::size_t K = pa.layout.geometry.n_users();
                             std::vector<double> sum(K, 0.0), sum_ideal(K, 0.0);
                             std::size_t ok = 0;
                             for (std::size_t t = 0; t < T; ++t)
                             {
                                 const auto o = detail::run_trial(s, pa, d, t);
                                 if (!o.ok)
                                 {
                                     ++slot.failed[a];
                                     continue;
                                 }
                                 ++ok;
                                 for (std::size_t k = 0; k < K; ++k)
                                 {
                                     sum[k] += o.rate[k];
                                     sum_ideal[k] += o.ideal[k];
                                 }
                             }
                             if (ok == 0)
                                 continue;
                             for (std::size_t k = 0; k < K; ++k)
                             {
                                 sum[k] /= static_cast<double>(ok);
                                 sum_ideal[k] /= static_cast<double>(ok);
                             }
                             slot.mean_rate[a] = std::move(sum);
                             slot.mean_ideal[a] = std::move(sum_ideal);
                         } });

        for (std::size_t a = 0; a < A; ++a)
        {
            CdfArm ca;
            ca.arm = s.arms[a].label;
            const std::size_t K = templates[a].layout.geometry.n_users();
            ca.per_drop.resize(K);
            ca.ideal_per_drop.resize(K);
            for (std::size_t d = 0; d < D; ++d)
            {
                ca.failed_trials += slots[d].failed[a];
                if (slots[d].mean_rate[a].empty())
                {
                    ++ca.empty_drops;
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        ca.per_drop[k].push_back(std::numeric_limits<double>::quiet_NaN());
                        ca.ideal_per_drop[k].push_back(std::numeric_limits<double>::quiet_NaN());
                    }
                    continue;
                }
                for (std::size_t k = 0; k < K; ++k)
                {
                    ca.per_drop[k].push_back(slots[d].mean_rate[a][k]);
                    ca.ideal_per_drop[k].push_back(slots[d].mean_ideal[a][k]);
                }
            }
            if (ca.empty_drops == D)
                throw NumericalError("arm '" + ca.arm + "': precoding failed in every trial of every drop");
            ca.sorted.resize(K);
            for (std::size_t k = 0; k < K; ++k)
            {
                std::copy_if(ca.per_drop[k].begin(), ca.per_drop[k].end(), std::back_inserter(ca.sorted[k]),
                             [](double x) { return std::isfinite(x); });
                std::sort(ca.sorted[k].begin(), ca.sorted[k].end());
            }
            ca.throughput_user0 = {mean(ca.sorted[0]), standard_error(ca.sorted[0])};
            res.arms.push_back(std::move(ca));
        }
        return res;
    }
} // namespace mucomp

#endif
