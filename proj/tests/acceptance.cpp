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


// Acceptance checks. Each criterion prints one PASS/FAIL line; exit status is nonzero if any fails.

#include <mucomp/mucomp.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace mucomp;

namespace
{
    struct Verdict
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof(buf), f, args...);
        return buf;
    }

    // Independent scalar evaluation of the bound, written from the closed form with plain loops.
    double hand_bound(const std::vector<std::vector<double>> &a2, const std::vector<std::vector<double>> &e,
                      std::size_t k, double nt)
    {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < a2.size(); ++j)
        {
            if (j == k)
                continue;
            long double tot = 0.0L;
            for (double x : a2[j])
                tot += x;
            for (std::size_t b = 0; b < a2[j].size(); ++b)
                acc += (a2[j][b] / tot) * a2[k][b] * e[k][b];
        }
        return static_cast<double>(std::log2(1.0L + nt / (nt - 1.0) * acc));
    }

    Verdict closed_form()
    {
        Rng rng(1001);
        double worst = 0.0;
        bool two_equal = true;
        for (int t = 0; t < 10; ++t)
        {
            const std::size_t K = t < 5 ? 2 : 3, nt = 2 + rng.uniform_index(7);
            std::vector<std::vector<double>> a2(K, std::vector<double>(K)), e = a2;
            RMatrix A(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K)), E(A.rows(), A.cols());
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t b = 0; b < K; ++b)
                {
                    a2[k][b] = std::pow(10.0, 3.0 * rng.uniform() - 0.5);
                    e[k][b] = 0.5 * rng.uniform();
                    A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)) = a2[k][b];
                    E(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)) = e[k][b];
                }
            const auto p = RateLossParams::from_large_scale(LargeScaleMap::from_alpha_sq(A), nt, E);
            for (std::size_t k = 0; k < K; ++k)
            {
                const double got = rate_loss_bound_general(p, k).value, want = hand_bound(a2, e, k, double(nt));
                worst = std::max(worst, std::abs(got - want) / want);
            }
            if (K == 2)
            {
                const auto [b21, b22] = twocell_beta(a2[1][0], a2[1][1]);
                two_equal = two_equal && rate_loss_bound_twocell(b21, b22, a2[0][0], a2[0][1], e[0][0], e[0][1], nt) ==
                                             rate_loss_bound_general(p, 0).value;
            }
        }
        return {worst <= 1e-12 && two_equal,
                fmt("max relative deviation %.3g over 10 parameter sets; two-cell form %s", worst,
                    two_equal ? "identical" : "differs")};
    }

    LinkModel per_cell_model(const std::vector<Point> &pos, CodebookStore &store)
    {
        Scenario s = preset_fig3();
        return link_model(s, s.arms[1], pos, store);
    }

    Verdict null_projection(CodebookStore &store)
    {
        const auto m = per_cell_model({{250, 0}, {250, 0}}, store);
        const auto c = verify_appendix(m, 100000, 20100301).at("null_projection");
        const bool ok = std::abs(c.lhs - 1.0 / 3.0) <= 3.0 * c.se;
        return {ok, fmt("E{|s h^H|^2} = %.6f +- %.6f (%zu samples), target 1/3, deviation %.2f SE", c.lhs, c.se,
                        c.samples, std::abs(c.lhs - 1.0 / 3.0) / c.se)};
    }

    Verdict jensen(CodebookStore &store)
    {
        const std::vector<std::vector<Point>> geoms = {
            {{250, 0}, {250, 0}}, {{125, 0}, {375, 0}}, {{50, 0}, {450, 0}}, {{200, 0}, {400, 0}}, {{100, 0}, {300, 0}}};
        bool ok = true;
        std::string d;
        for (std::size_t g = 0; g < geoms.size(); ++g)
        {
            const auto m = per_cell_model(geoms[g], store);
            const auto c = verify_appendix(m, 100000, 20100400 + g).at("norm_jensen");
            const bool pass = c.lhs + 3.0 * c.se < c.rhs;
            ok = ok && pass;
            d += fmt("%sgeometry %zu: %.6g vs %.6g (%+.1f SE)", g ? "; " : "", g + 1, c.lhs, c.rhs, (c.rhs - c.lhs) / c.se);
        }
        return {ok, d};
    }

    Verdict containment(CodebookStore &store)
    {
        Scenario s = preset_fig3();
        const auto grid = s.placement.sweep.values();
        std::size_t passed = 0, total = 0;
        std::string failures;
        for (std::size_t a = 1; a < s.arms.size(); a += 2)
            for (std::size_t p = 0; p < grid.size(); ++p)
            {
                const auto m = link_model(s, s.arms[a], positions_at(s, s.arms[a], grid[p]), store);
                const auto est = rate_loss_montecarlo(m, 10000, derive_seed(s.master_seed, StreamTag::small_scale, {a, p}),
                                                      PairingConstruction::orthogonal);
                const double bound = rate_loss_bounds(m)[0];
                const double frac = bootstrap_fraction_below(est.users[0].delta_samples, bound, 500, 97 + p);
                ++total;
                if (frac >= 0.99)
                    ++passed;
                else
                    failures += fmt(" [%s, ms1=%gm: %.3f +- %.3f > %.3f]", s.arms[a].label.c_str(), grid[p],
                                    est.users[0].delta_mean, est.users[0].delta_se, bound);
            }
        return {passed == total, fmt("%zu/%zu grid points contained", passed, total) + failures};
    }

    Verdict fig3_trends(CodebookStore &store)
    {
        Scenario s = preset_fig3();
        s.trials = 10000;
        RunOptions opt;
        opt.store = &store;
        const auto r = run(s, opt);
        const std::string edge = "per_cell_3+3@ms2=250m", centre = "per_cell_3+3@ms2=50m";
        bool mono = true;
        std::string d = "ms2 edge:";
        for (std::size_t p = 0; p < r.sweep_values.size(); ++p)
        {
            const Stat x = r.at(edge, p).rate_loss[0];
            d += fmt(" %.4f", x.mean);
            if (p > 0)
            {
                const Stat prev = r.at(edge, p - 1).rate_loss[0];
                mono = mono && x.mean - 2.0 * x.se > prev.mean + 2.0 * prev.se;
            }
        }
        const std::size_t last = r.sweep_values.size() - 1;
        const Stat at_edge = r.at(centre, 0).rate_loss[0], at_centre = r.at(centre, last).rate_loss[0];
        const bool falls = at_centre.mean + 2.0 * at_centre.se < at_edge.mean - 2.0 * at_edge.se;
        d += fmt("; ms2 centre: %.4f -> %.4f", at_edge.mean, at_centre.mean);
        return {mono && falls, d};
    }

    Verdict fig4_ordering(CodebookStore &store)
    {
        Scenario s = preset_fig4();
        s.placement.mode = PlacementMode::fixed;
        s.placement.positions = {{125, 0}, {250, 0}};
        s.trials = 10000;
        RunOptions opt;
        opt.store = &store;
        const auto r = run(s, opt);
        const Stat g = r.at("global_6", 0).throughput[0], a = r.at("per_cell_4+2", 0).throughput[0],
                   b = r.at("per_cell_3+3", 0).throughput[0];
        // A gap is either resolved in the stated direction or a tie; a resolved reversal fails.
        auto no_reversal = [](Stat hi, Stat lo) { return hi.mean + 2.0 * hi.se >= lo.mean - 2.0 * lo.se; };
        auto label = [](Stat hi, Stat lo)
        { return hi.mean - 2.0 * hi.se > lo.mean + 2.0 * lo.se ? ">" : (hi.mean >= lo.mean ? ">= (tie)" : "< (tie)"); };
        return {no_reversal(g, a) && no_reversal(a, b),
                fmt("MS1 at 125 m: global %.4f+-%.4f %s 4+2 %.4f+-%.4f %s 3+3 %.4f+-%.4f", g.mean, g.se, label(g, a), a.mean,
                    a.se, label(a, b), b.mean, b.se)};
    }

    // Median over both users' per-drop throughputs of the given drops.
    double pooled_median(const std::vector<std::vector<double>> &src, const std::vector<std::size_t> &drops)
    {
        std::vector<double> v;
        for (const auto &user : src)
            for (std::size_t d : drops)
                if (std::isfinite(user[d]))
                    v.push_back(user[d]);
        std::sort(v.begin(), v.end());
        const double pos = 0.5 * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[std::min(lo + 1, v.size() - 1)] - v[lo]);
    }

    Verdict fig5_ordering(CodebookStore &store)
    {
        const Scenario s = preset_fig5();
        RunOptions opt;
        opt.store = &store;
        const auto r = run_cdf(s, opt);
        const auto &ci = r.at("comp_ideal"), &cq = r.at("comp_per_cell_3+3"), &si = r.at("single_ideal"),
                   &sq = r.at("single_6bit");
        auto gap = [&](const std::vector<std::size_t> &d)
        {
            const double comp = pooled_median(ci.per_drop, d) - pooled_median(cq.per_drop, d);
            const double single = pooled_median(si.per_drop, d) - pooled_median(sq.per_drop, d);
            return std::pair{comp, single};
        };
        std::vector<std::size_t> all(s.drops);
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        const auto [comp, single] = gap(all);
        Rng rng(s.master_seed, StreamTag::bootstrap, {s.drops});
        std::vector<double> diffs;
        for (int b = 0; b < 1000; ++b)
        {
            std::vector<std::size_t> d(s.drops);
            for (auto &x : d)
                x = rng.uniform_index(s.drops);
            const auto [c, g] = gap(d);
            diffs.push_back(g - c);
        }
        std::sort(diffs.begin(), diffs.end());
        const double lower = diffs[static_cast<std::size_t>(0.05 * static_cast<double>(diffs.size()))];
        return {lower > 0.0, fmt("median gap single %.4f vs CoMP %.4f bit/s/Hz; bootstrap 5%% quantile of difference %.4f",
                                 single, comp, lower)};
    }

    Verdict zf_invariants(CodebookStore &store)
    {
        Scenario s = preset_fig3();
        Rng rng(8080);
        double worst_leak = 0.0, worst_norm = 0.0, worst_mf = 0.0;
        for (int t = 0; t < 1000; ++t)
        {
            const double d1 = 50.0 + 200.0 * rng.uniform(), d2 = 50.0 + 200.0 * rng.uniform();
            const std::vector<Point> pos{{d1, 0}, {500.0 - d2, 0}};
            const auto m = link_model(s, s.arms[1], pos, store);
            auto real = sample_small_scale(2, 2, 4, rng);
            assemble_global(real, m.large_scale);
            auto fb = make_feedback(m.feedback, real, m.large_scale);
            const Precoder p = zf_precoder(fb.reconstructed);
            for (Eigen::Index k = 0; k < 2; ++k)
            {
                worst_norm = std::max(worst_norm, std::abs(p.column(k).norm() - 1.0));
                const Eigen::Index j = 1 - k;
                const double leak = std::abs((fb.reconstructed[static_cast<std::size_t>(k)] * p.column(j))(0));
                worst_leak = std::max(worst_leak, leak);
            }
            orthogonalize_per_block(fb, real, m.feedback.per_cell, {0, 1});
            const Precoder q = zf_precoder(fb.reconstructed);
            for (Eigen::Index k = 0; k < 2; ++k)
            {
                const CVector &g = fb.reconstructed[static_cast<std::size_t>(k)];
                const CColumn mf = g.adjoint() / g.norm();
                worst_mf = std::max(worst_mf, (q.column(k) - mf).norm());
            }
        }
        return {worst_leak <= 1e-9 && worst_norm <= 1e-12 && worst_mf <= 1e-12,
                fmt("max |g_k v_j| %.2g, max | ||v_k|| - 1 | %.2g, max matched-filter deviation %.2g over 1000 instances",
                    worst_leak, worst_norm, worst_mf)};
    }

    std::size_t brute_force_index(const CVector &v, const Codebook &cb)
    {
        const CVector u = v / v.norm();
        std::size_t best = 0;
        double best_p = -1.0;
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            cdouble acc = 0.0;
            const CVector c = cb.codeword(i);
            for (Eigen::Index n = 0; n < u.size(); ++n)
                acc += u(n) * std::conj(c(n));
            const double pw = std::norm(acc);
            if (pw > best_p)
            {
                best_p = pw;
                best = i;
            }
        }
        return best;
    }

    Verdict quantizer_oracle()
    {
        std::size_t mismatches = 0, draws = 0, runs = 0, increases = 0;
        for (auto [dim, bits] : {std::pair<std::size_t, unsigned>{4, 3}, {4, 2}, {8, 6}, {8, 3}, {4, 6}})
        {
            const Codebook cb = train_isotropic_lloyd(dim, bits, 31 + bits);
            ++runs;
            const auto &h = cb.training_meta()->distortion_history;
            for (std::size_t i = 1; i < h.size(); ++i)
                increases += h[i] > h[i - 1] ? 1 : 0;
            Rng rng(77, StreamTag::error_estimate, {dim, bits});
            for (int t = 0; t < 100000 / 5; ++t, ++draws)
            {
                CVector v(static_cast<Eigen::Index>(dim));
                for (Eigen::Index n = 0; n < v.size(); ++n)
                    v(n) = rng.complex_normal();
                if (quantize_direction(v, cb).index != brute_force_index(v, cb))
                    ++mismatches;
            }
        }
        return {mismatches == 0 && increases == 0,
                fmt("%zu index mismatches over %zu draws; %zu distortion increases over %zu Lloyd runs", mismatches, draws,
                    increases, runs)};
    }

    std::string preset_csv(const Scenario &s, std::size_t workers)
    {
        RunOptions opt;
        opt.workers = workers;
        std::ostringstream os;
        if (s.placement.mode == PlacementMode::random_uniform)
            write_csv(os, to_rows(run_cdf(s, opt)));
        else
            write_csv(os, to_rows(run(s, opt)));
        return os.str();
    }

    Verdict reproducibility()
    {
        bool ok = true;
        std::string d;
        for (const auto &name : preset_names())
        {
            Scenario s = preset(name);
            const std::string one = preset_csv(s, 1), eight = preset_csv(s, 8);
            const bool same = one == eight;
            ok = ok && same;
            d += fmt("%s%s %s (%zu bytes)", d.empty() ? "" : "; ", name.c_str(), same ? "identical" : "DIFFERS", one.size());
        }
        return {ok, d};
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mucomp acceptance checks"};
    std::vector<int> which;
    app.add_option("--criterion", which, "criteria to run (default: all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);
    if (which.empty())
        for (int i = 1; i <= 10; ++i)
            which.push_back(i);

    CodebookStore store(CodebookConfig{});
    const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria = {
        {1, {"closed-form bound", closed_form}},
        {2, {"null-space projection identity", [&] { return null_projection(store); }}},
        {3, {"inverse-norm Jensen step", [&] { return jensen(store); }}},
        {4, {"bound containment under orthogonal pairing", [&] { return containment(store); }}},
        {5, {"rate-loss trends along the sweep", [&] { return fig3_trends(store); }}},
        {6, {"global vs per-cell ordering", [&] { return fig4_ordering(store); }}},
        {7, {"single-cell vs CoMP quantization gap", [&] { return fig5_ordering(store); }}},
        {8, {"zero-forcing invariants", [&] { return zf_invariants(store); }}},
        {9, {"quantizer oracle and Lloyd descent", quantizer_oracle}},
        {10, {"worker-count reproducibility", reproducibility}},
    };

    int failed = 0;
    for (int c : which)
    {
        const auto &[title, fn] = criteria.at(c);
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = fn();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << title << "): " << v.detail
                  << fmt(" [%.1f s]", secs) << std::endl;
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
