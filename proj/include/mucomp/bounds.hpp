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


#ifndef MUCOMP_BOUNDS_HPP
#define MUCOMP_BOUNDS_HPP

#include "link.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <cmath>
#include <sstream>

namespace mucomp
{
    // Inputs of the closed-form rate-loss bound for one scheduled user set.
    struct RateLossParams
    {
        RMatrix beta;           // beta_{j,b} = alpha^2_{j,b} / sum_b alpha^2_{j,b}; rows sum to 1
        RMatrix gamma_sq;       // gamma^2_{k,b}, linear receive SNR
        std::size_t n_tx = 0;
        RMatrix expected_error; // E{sin^2 theta_{k,b}}

        std::vector<std::string> check() const
        {
            std::vector<std::string> e;
            if (n_tx < 2)
                e.emplace_back("n_tx: must be >= 2");
            if (beta.rows() < 2)
                e.emplace_back("beta: need at least two users");
            if (gamma_sq.rows() != beta.rows() || gamma_sq.cols() != beta.cols() ||
                expected_error.rows() != beta.rows() || expected_error.cols() != beta.cols())
                e.emplace_back("beta, gamma_sq and expected_error must have equal shape");
            if ((beta.array() < 0.0).any() || (beta.array() > 1.0).any())
                e.emplace_back("beta: entries must lie in [0, 1]");
            for (Eigen::Index j = 0; j < beta.rows(); ++j)
                if (std::abs(beta.row(j).sum() - 1.0) > 1e-12)
                    e.emplace_back("beta: row " + std::to_string(j) + " does not sum to 1");
            if ((gamma_sq.array() < 0.0).any())
                e.emplace_back("gamma_sq: entries must be nonnegative");
            if ((expected_error.array() < 0.0).any() || (expected_error.array() > 1.0).any())
                e.emplace_back("expected_error: entries must lie in [0, 1]");
            return e;
        }

        static RateLossParams from_large_scale(const LargeScaleMap &ls, std::size_t n_tx, const RMatrix &expected_error)
        {
            RateLossParams p;
            p.beta = ls.alpha_sq;
            for (Eigen::Index j = 0; j < p.beta.rows(); ++j)
            {
                const double s = ls.alpha_sq.row(j).sum();
                if (!(s > 0.0))
                    throw std::domain_error("RateLossParams: user " + std::to_string(j) + " has no channel energy");
                p.beta.row(j) /= s;
            }
            p.gamma_sq = ls.snr_gamma_sq;
            p.n_tx = n_tx;
            p.expected_error = expected_error;
            return p;
        }
    };

    struct BoundTerms
    {
        double value = 0.0;                // bits/s/Hz
        std::vector<double> interference;  // I_j per paired user j (0 at j == k)
    };

    // Delta R_k < log2[1 + nt/(nt-1) sum_{j != k} I_j],  I_j = sum_b beta_{j,b} gamma^2_{k,b} sin^2 theta_{k,b}
    inline BoundTerms rate_loss_bound_general(const RateLossParams &p, std::size_t k)
    {
        auto e = p.check();
        if (!e.empty())
            throw std::domain_error("rate_loss_bound_general: " + e.front());
        if (k >= static_cast<std::size_t>(p.beta.rows()))
            throw std::out_of_range("rate_loss_bound_general: user index out of range");
        const double nt = static_cast<double>(p.n_tx);
        const auto kk = static_cast<Eigen::Index>(k);
        BoundTerms t;
        t.interference.assign(static_cast<std::size_t>(p.beta.rows()), 0.0);
        double sum = 0.0;
        for (Eigen::Index j = 0; j < p.beta.rows(); ++j)
        {
            if (j == kk)
                continue;
            double ij = 0.0;
            for (Eigen::Index b = 0; b < p.beta.cols(); ++b)
                ij += p.beta(j, b) * p.gamma_sq(kk, b) * p.expected_error(kk, b);
            t.interference[static_cast<std::size_t>(j)] = ij;
            sum += ij;
        }
        t.value = std::log2(1.0 + nt / (nt - 1.0) * sum);
        return t;
    }

    // beta_{2,1} = 1 / (1 + alpha^2_{2,2} / alpha^2_{2,1}), and symmetrically beta_{2,2}.
    inline std::pair<double, double> twocell_beta(double alpha21_sq, double alpha22_sq)
    {
        if (!(alpha21_sq >= 0.0) || !(alpha22_sq >= 0.0) || !(alpha21_sq + alpha22_sq > 0.0))
            throw std::domain_error("twocell_beta: invalid channel energies");
        return {alpha21_sq / (alpha21_sq + alpha22_sq), alpha22_sq / (alpha21_sq + alpha22_sq)};
    }

    // Two-cell bound for MS 1 paired with MS 2.
    inline double rate_loss_bound_twocell(double beta21, double beta22, double gamma11_sq, double gamma12_sq,
                                          double err11, double err12, std::size_t n_tx)
    {
        if (n_tx < 2)
            throw std::domain_error("rate_loss_bound_twocell: n_tx must be >= 2");
        if (std::abs(beta21 + beta22 - 1.0) > 1e-9 || beta21 < 0.0 || beta22 < 0.0)
            throw std::domain_error("rate_loss_bound_twocell: beta_{2,1} + beta_{2,2} must equal 1");
        const double nt = static_cast<double>(n_tx);
        return std::log2(1.0 + nt / (nt - 1.0) * (beta21 * gamma11_sq * err11 + beta22 * gamma12_sq * err12));
    }

    // Paired user at the cell edge (beta = 1/2, 1/2).
    inline double rate_loss_bound_celledge(double gamma11_sq, double gamma12_sq, double err11, double err12,
                                           std::size_t n_tx)
    {
        const double nt = static_cast<double>(n_tx);
        return std::log2(1.0 + nt / (2.0 * (nt - 1.0)) * (gamma11_sq * err11 + gamma12_sq * err12));
    }

    // Synthetic orthogonal pairing on per-cell feedback. Users are processed in `order`; each later
    // user's quantized block directions are projected off the blocks of all earlier users and
    // renormalized, keeping rho_{j,b}, so hat g_k hat g_j^H = 0 block by block. A projection that
    // vanishes (same codeword) falls back to the user's next-best codeword.
    inline void orthogonalize_per_block(FeedbackReport &fb, const ChannelRealization &real, const LinkCodebooks &cbs,
                                        const std::vector<std::size_t> &order, bool phase_aligned = true,
                                        const Dither *dither = nullptr)
    {
        if (fb.kind != FeedbackKind::per_cell)
            throw ConfigError("orthogonal pairing requires per-cell feedback");
        if (order.size() > real.n_tx)
            throw ConfigError("orthogonal pairing: more users than antennas per BS");
        for (std::size_t pos = 1; pos < order.size(); ++pos)
        {
            const std::size_t j = order[pos];
            std::vector<CVector> blocks(real.cells());
            for (std::size_t b = 0; b < real.cells(); ++b)
            {
                auto project = [&](CVector x)
                {
                    for (std::size_t q = 0; q < pos; ++q)
                    {
                        const CVector &u = fb.directions[order[q]][b];
                        x -= inner(x, u) * u;
                    }
                    return x;
                };
                CVector x = project(fb.directions[j][b]);
                if (x.norm() < 1e-6)
                {
                    const Codebook &cb = *cbs[j][b];
                    const CMatrix *u = dither ? &(*dither).at(j).at(b) : nullptr;
                    const CVector h = u ? CVector(real.small_scale[j][b] * u->adjoint()) : real.small_scale[j][b];
                    for (std::size_t i : rank_codewords(h, cb))
                    {
                        x = project(u ? CVector(cb.codeword(i) * *u) : cb.codeword(i));
                        if (x.norm() >= 1e-6)
                            break;
                    }
                    if (x.norm() < 1e-6)
                        throw NumericalError("orthogonal pairing: codebook spans no direction orthogonal to the paired users");
                }
                x /= x.norm();
                const CVector hbar = unit(real.small_scale[j][b]);
                const cdouble proj = inner(hbar, x);
                if (phase_aligned && std::abs(proj) > 0.0)
                    x *= proj / std::abs(proj);
                const auto jj = static_cast<Eigen::Index>(j), bb = static_cast<Eigen::Index>(b);
                fb.directions[j][b] = x;
                fb.error(jj, bb) = std::clamp(1.0 - std::norm(proj), 0.0, 1.0);
                blocks[b] = fb.norms(jj, bb) * x;
            }
            fb.reconstructed[j] = concat(blocks);
        }
    }

    // Everything needed to simulate one fixed geometry.
    struct LinkModel
    {
        LargeScaleMap large_scale;
        std::size_t n_tx = 4;
        FeedbackSetup feedback;
        double condition_cap = default_condition_cap;
    };

    enum class PairingConstruction
    {
        zero_forcing,    // ZF on the reconstructed channels as fed back
        orthogonal,      // per-block Gram-Schmidt first (analysis assumption), dithered codebooks
    };

    namespace detail
    {
        // Independent Haar rotation of every link's codebook. Keeps each user's quantization error
        // distribution and makes different users' quantized directions statistically independent.
        inline Dither draw_dither(std::size_t users, std::size_t cells, std::size_t n_tx, Rng &rng)
        {
            Dither d(users, std::vector<CMatrix>(cells));
            for (auto &row : d)
                for (auto &u : row)
                    u = rng.haar_unitary(static_cast<Eigen::Index>(n_tx));
            return d;
        }
    } // namespace detail

    struct UserRateLoss
    {
        double delta_mean = 0.0;     // mean[ideal rate] - mean[quantized rate], common random numbers
        double delta_se = 0.0;
        double ideal_mean = 0.0;
        double quantized_mean = 0.0;
        double interference_mean = 0.0;
        double interference_bound = 0.0;      // log2(1 + mean(P sum |g_k v_j|^2) / noise)
        double interference_bound_se = 0.0;
        std::vector<double> delta_samples; // per successful trial
    };

    struct RateLossEstimate
    {
        std::vector<UserRateLoss> users;
        std::size_t trials = 0;
        std::size_t failures = 0;
    };

    inline RateLossEstimate rate_loss_montecarlo(const LinkModel &model, std::size_t trials, std::uint64_t seed,
                                                 PairingConstruction construction = PairingConstruction::zero_forcing,
                                                 std::size_t workers = 1)
    {
        if (trials < 1)
            throw ConfigError("rate_loss_montecarlo: trials must be >= 1");
        const auto K = static_cast<std::size_t>(model.large_scale.users());
        const auto N = static_cast<std::size_t>(model.large_scale.cells());
        struct Slot
        {
            TrialRates ideal, quant;
        };
        std::vector<Slot> slots(trials);
        std::vector<std::size_t> order(K);
        for (std::size_t k = 0; k < K; ++k)
            order[k] = k;
        parallel_for(trials, workers, [&](std::size_t t)
                     {
                         Rng rng(seed, StreamTag::small_scale, {t});
                         ChannelRealization real = sample_small_scale(K, N, model.n_tx, rng);
                         assemble_global(real, model.large_scale);
                         FeedbackReport fb;
                         if (construction == PairingConstruction::orthogonal)
                         {
                             if (model.feedback.kind != FeedbackKind::per_cell)
                                 throw ConfigError("orthogonal pairing requires per-cell feedback");
                             const Dither dither = detail::draw_dither(K, N, model.n_tx, rng);
                             fb = per_cell_feedback(real, model.large_scale, model.feedback.per_cell,
                                                    model.feedback.phase_aligned, &dither);
                             orthogonalize_per_block(fb, real, model.feedback.per_cell, order, model.feedback.phase_aligned,
                                                     &dither);
                         }
                         else
                             fb = make_feedback(model.feedback, real, model.large_scale);
                         const double P = model.large_scale.tx_power, n0 = model.large_scale.noise;
                         slots[t].ideal = transmit(real.global, real.global, P, n0, model.condition_cap);
                         slots[t].quant = transmit(real.global, fb.reconstructed, P, n0, model.condition_cap); });

        RateLossEstimate est;
        est.trials = trials;
        est.users.resize(K);
        std::vector<std::vector<double>> ideal(K), quant(K), interf(K);
        for (const auto &s : slots)
        {
            if (!s.ideal.ok || !s.quant.ok)
            {
                ++est.failures;
                continue;
            }
            for (std::size_t k = 0; k < K; ++k)
            {
                ideal[k].push_back(s.ideal.rate[k]);
                quant[k].push_back(s.quant.rate[k]);
                interf[k].push_back(s.quant.interference[k]);
                est.users[k].delta_samples.push_back(s.ideal.rate[k] - s.quant.rate[k]);
            }
        }
        if (est.failures == trials)
            throw NumericalError("rate_loss_montecarlo: precoding failed in every trial");
        const double n0 = model.large_scale.noise;
        for (std::size_t k = 0; k < K; ++k)
        {
            auto &u = est.users[k];
            u.ideal_mean = mean(ideal[k]);
            u.quantized_mean = mean(quant[k]);
            u.delta_mean = mean(u.delta_samples);
            u.delta_se = standard_error(u.delta_samples);
            u.interference_mean = mean(interf[k]);
            u.interference_bound = std::log2(1.0 + u.interference_mean / n0);
            u.interference_bound_se = standard_error(interf[k]) / n0 / ((1.0 + u.interference_mean / n0) * std::log(2.0));
        }
        return est;
    }

    // Fraction of bootstrap resamples whose mean is <= bound.
    inline double bootstrap_fraction_below(const std::vector<double> &samples, double bound, std::size_t resamples,
                                           std::uint64_t seed)
    {
        if (samples.empty() || resamples == 0)
            throw std::invalid_argument("bootstrap_fraction_below: empty input");
        Rng rng(seed, StreamTag::bootstrap, {samples.size()});
        std::size_t below = 0;
        for (std::size_t r = 0; r < resamples; ++r)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < samples.size(); ++i)
                s += samples[rng.uniform_index(samples.size())];
            if (s / static_cast<double>(samples.size()) <= bound)
                ++below;
        }
        return static_cast<double>(below) / static_cast<double>(resamples);
    }

    enum class CheckStatus
    {
        pass,
        fail,
        inconclusive,
    };

    inline std::string to_string(CheckStatus s)
    {
        switch (s)
        {
        case CheckStatus::pass:
            return "pass";
        case CheckStatus::fail:
            return "fail";
        case CheckStatus::inconclusive:
            return "inconclusive";
        }
        return "?";
    }

    struct AppendixCheck
    {
        std::string step;     // "norm_jensen", "decomposition", "null_projection", "interference"
        std::string relation; // human-readable form of the compared quantities
        double lhs = 0.0;
        double rhs = 0.0;
        double se = 0.0;
        CheckStatus status = CheckStatus::inconclusive;
        std::size_t samples = 0;
    };

    struct AppendixReport
    {
        std::vector<AppendixCheck> checks;
        const AppendixCheck &at(const std::string &step) const
        {
            for (const auto &c : checks)
                if (c.step == step)
                    return c;
            throw std::out_of_range("no appendix check named " + step);
        }
    };

    // Monte Carlo check of each step in the derivation of the per-cell bound, for user k paired with j.
    //  (i)   E{1/||hat g_j||^2}  <  1 / (nt sum_b alpha^2_{j,b})
    //  (ii)  hbar_{k,b} = cos(theta) hat h_{k,b} + sin(theta) s_{k,b}, ||s|| = 1, s hat h^H = 0
    //  (iii) E{|s_{k,b} hat h_{j,b}^H|^2} = 1/(nt - 1) with hat h_{j,b} orthogonalized against hat h_{k,b}
    //  (iv)  E{|g_k hat g_j^H|^2} <= nt^2/(nt-1) sum_b alpha^2_{k,b} alpha^2_{j,b} E{sin^2 theta_{k,b}}
    inline AppendixReport verify_appendix(const LinkModel &model, std::size_t trials, std::uint64_t seed,
                                          std::size_t k = 0, std::size_t j = 1, std::size_t workers = 1)
    {
        if (model.feedback.kind != FeedbackKind::per_cell)
            throw ConfigError("verify_appendix: requires per-cell feedback");
        const auto K = static_cast<std::size_t>(model.large_scale.users());
        const auto N = static_cast<std::size_t>(model.large_scale.cells());
        if (k >= K || j >= K || k == j)
            throw ConfigError("verify_appendix: need two distinct users");
        if (trials < 2)
            throw ConfigError("verify_appendix: need at least 2 trials");
        const double nt = static_cast<double>(model.n_tx);

        struct Slot
        {
            double inv_norm = 0.0;
            double decomposition_err = 0.0;
            std::size_t degenerate = 0;
            std::vector<double> null_proj; // per block
            double q_sq = 0.0;
            std::vector<double> sin_sq; // per block, user k
        };
        std::vector<Slot> slots(trials);
        parallel_for(trials, workers, [&](std::size_t t)
                     {
                         Rng rng(seed, StreamTag::appendix, {t});
                         ChannelRealization real = sample_small_scale(K, N, model.n_tx, rng);
                         assemble_global(real, model.large_scale);
                         const Dither dither = detail::draw_dither(K, N, model.n_tx, rng);
                         FeedbackReport fb = per_cell_feedback(real, model.large_scale, model.feedback.per_cell, true, &dither);
                         Slot &s = slots[t];
                         s.inv_norm = 1.0 / fb.reconstructed[j].squaredNorm();

                         std::vector<CVector> sdir(N);
                         for (std::size_t b = 0; b < N; ++b)
                         {
                             const CVector hbar = unit(real.small_scale[k][b]);
                             const CVector &hh = fb.directions[k][b];
                             const double sin2 = fb.error(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b));
                             s.sin_sq.push_back(sin2);
                             const double cs = std::abs(inner(hbar, hh));
                             const double sn = std::sqrt(sin2);
                             if (sn < 1e-6)
                             {
                                 ++s.degenerate;
                                 sdir[b] = CVector::Zero(hh.size());
                                 continue;
                             }
                             sdir[b] = (hbar - cs * hh) / sn;
                             const double e1 = std::abs(sdir[b].norm() - 1.0);
                             const double e2 = std::abs(inner(sdir[b], hh));
                             const double e3 = (hbar - (cs * hh + sn * sdir[b])).norm();
                             s.decomposition_err = std::max({s.decomposition_err, e1, e2, e3});
                         }

                         std::vector<std::size_t> order{k, j};
                         for (std::size_t u = 0; u < K; ++u)
                             if (u != k && u != j)
                                 order.push_back(u);
                         orthogonalize_per_block(fb, real, model.feedback.per_cell, order, true, &dither);
                         for (std::size_t b = 0; b < N; ++b)
                             if (sdir[b].norm() > 0.0)
                                 s.null_proj.push_back(std::norm(inner(sdir[b], fb.directions[j][b])));
                         s.q_sq = std::norm(inner(real.global[k], fb.reconstructed[j])); });

        std::vector<double> inv, nullp, qsq;
        std::vector<std::vector<double>> sin_sq(N);
        double decomposition = 0.0;
        std::size_t degenerate = 0;
        for (const auto &s : slots)
        {
            inv.push_back(s.inv_norm);
            decomposition = std::max(decomposition, s.decomposition_err);
            degenerate += s.degenerate;
            nullp.insert(nullp.end(), s.null_proj.begin(), s.null_proj.end());
            qsq.push_back(s.q_sq);
            for (std::size_t b = 0; b < N; ++b)
                sin_sq[b].push_back(s.sin_sq[b]);
        }

        const auto &a2 = model.large_scale.alpha_sq;
        const auto kk = static_cast<Eigen::Index>(k), jj = static_cast<Eigen::Index>(j);
        const double inconclusive_rel = 0.1;
        AppendixReport rep;

        {
            AppendixCheck c;
            c.step = "norm_jensen";
            c.relation = "E{1/||hat g_j||^2} < 1/(nt sum_b alpha^2_{j,b})";
            c.lhs = mean(inv);
            c.se = standard_error(inv);
            c.rhs = 1.0 / (nt * a2.row(jj).sum());
            c.samples = inv.size();
            if (c.se >= inconclusive_rel * c.rhs)
                c.status = CheckStatus::inconclusive;
            else
                c.status = c.lhs + 3.0 * c.se < c.rhs ? CheckStatus::pass : CheckStatus::fail;
            rep.checks.push_back(c);
        }
        {
            AppendixCheck c;
            c.step = "decomposition";
            c.relation = "max |hbar - (cos hat h + sin s)|, | ||s|| - 1 |, |s hat h^H|  < 1e-12";
            c.lhs = decomposition;
            c.rhs = 1e-12;
            c.samples = trials * N - degenerate;
            c.status = c.lhs < c.rhs ? CheckStatus::pass : CheckStatus::fail;
            rep.checks.push_back(c);
        }
        {
            AppendixCheck c;
            c.step = "null_projection";
            c.relation = "E{|s_{k,b} hat h_{j,b}^H|^2} = 1/(nt-1)";
            c.lhs = mean(nullp);
            c.se = standard_error(nullp);
            c.rhs = 1.0 / (nt - 1.0);
            c.samples = nullp.size();
            if (nullp.size() < 2 || c.se >= inconclusive_rel * c.rhs)
                c.status = CheckStatus::inconclusive;
            else
                c.status = std::abs(c.lhs - c.rhs) <= 3.0 * c.se ? CheckStatus::pass : CheckStatus::fail;
            rep.checks.push_back(c);
        }
        {
            AppendixCheck c;
            c.step = "interference";
            c.relation = "E{|g_k hat g_j^H|^2} <= nt^2/(nt-1) sum_b alpha^2_{k,b} alpha^2_{j,b} E{sin^2 theta_{k,b}}";
            c.lhs = mean(qsq);
            c.se = standard_error(qsq);
            double rhs = 0.0;
            for (std::size_t b = 0; b < N; ++b)
            {
                const auto bb = static_cast<Eigen::Index>(b);
                rhs += a2(kk, bb) * a2(jj, bb) * mean(sin_sq[b]);
            }
            c.rhs = nt * nt / (nt - 1.0) * rhs;
            c.samples = qsq.size();
            if (c.rhs > 0.0 && c.se >= inconclusive_rel * c.rhs)
                c.status = CheckStatus::inconclusive;
            else
                c.status = c.lhs <= c.rhs + 3.0 * c.se ? CheckStatus::pass : CheckStatus::fail;
            rep.checks.push_back(c);
        }
        return rep;
    }
} // namespace mucomp

#endif
