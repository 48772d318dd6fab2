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


// mucomp command-line front end: train-codebook, simulate, bound, show-config.

#include <mucomp/mucomp.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{
    using namespace mucomp;

    constexpr int exit_config = 2;
    constexpr int exit_runtime = 3;

    struct Common
    {
        std::string preset;
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials;
        std::size_t workers = 1;
        std::string out = "-";
        const CLI::Option *out_option = nullptr;
    };

    void add_common(CLI::App &cmd, Common &c)
    {
        cmd.add_option("--preset", c.preset, "Built-in scenario (fig3, fig4, fig5)");
        cmd.add_option("--config", c.config, "Scenario file (JSON)");
        cmd.add_option("--seed", c.seed, "Master seed, overrides file and MUCOMP_SEED");
        cmd.add_option("--trials", c.trials, "Trials per point (per drop for random placement)")->check(CLI::PositiveNumber);
        cmd.add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
        c.out_option = cmd.add_option("--out", c.out, "Output path, '-' for standard output");
    }

    std::string read_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot read config file " + path, {"config: cannot read " + path});
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    // Precedence: preset or file, then environment, then command-line flags.
    Scenario load(const Common &c)
    {
        if (c.preset.empty() == c.config.empty())
            throw ConfigError("exactly one of --preset and --config is required",
                              {"exactly one of --preset and --config is required"});
        Scenario s = c.preset.empty() ? parse_scenario(read_file(c.config)) : preset(c.preset);
        apply_environment(s);
        if (c.seed)
            s.master_seed = *c.seed;
        if (c.trials)
            s.trials = *c.trials;
        validate(s);
        return s;
    }

    template <class Write>
    void emit(const std::string &path, Write &&write)
    {
        if (path == "-")
        {
            write(std::cout);
            std::cout.flush();
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + path + " for writing");
        write(out);
        if (!out)
            throw std::runtime_error("write to " + path + " failed");
    }

    // ---------------------------------------------------------------------------------------------

    struct TrainArgs
    {
        Common common;
        std::optional<std::size_t> dimension;
        std::optional<unsigned> bits;
        std::string kind = "lloyd";
    };

    int cmd_train(const TrainArgs &a)
    {
        const CodebookKind kind = a.kind == "random" ? CodebookKind::random : CodebookKind::lloyd;
        if (a.dimension || a.bits)
        {
            if (!a.dimension || !a.bits)
                throw ConfigError("--dimension and --bits go together", {"--dimension and --bits go together"});
            if (!a.common.preset.empty() || !a.common.config.empty())
                throw ConfigError("--dimension/--bits cannot be combined with a scenario",
                                  {"--dimension/--bits cannot be combined with a scenario"});
            if (*a.dimension < 2)
                throw ConfigError("--dimension must be >= 2", {"--dimension must be >= 2"});
            if (*a.bits > 16)
                throw ConfigError("--bits must lie in [0, 16]", {"--bits must lie in [0, 16]"});
            if (a.common.out == "-")
                throw ConfigError("--out must name a codebook file", {"--out must name a codebook file"});
            CodebookConfig cfg;
            cfg.kind = kind;
            if (a.common.seed)
                cfg.seed = *a.common.seed;
            else if (const char *v = std::getenv("MUCOMP_SEED"); v && *v)
                cfg.seed = detail::env_integer<std::uint64_t>("MUCOMP_SEED", v, 0);
            CodebookStore store(cfg);
            const CodebookPtr cb = store.isotropic(*a.dimension, *a.bits);
            save_codebook(*cb, a.common.out);
            std::cerr << "wrote " << a.common.out << " (" << cb->size() << " codewords, E{sin^2}="
                      << format_double(cb->expected_error()->mean) << ")\n";
            return 0;
        }

        // Every per-cell codebook a scenario needs, one file per (dimension, bits).
        Scenario s = load(a.common);
        if (a.kind != "lloyd")
            s.codebooks.kind = kind;
        if (a.common.seed)
            s.codebooks.seed = *a.common.seed;
        const std::string dir = a.common.out == "-" ? "." : a.common.out;
        std::filesystem::create_directories(dir);
        std::set<std::pair<std::size_t, int>> needed;
        for (const Arm &arm : s.arms)
            if (arm.feedback.mode == FeedbackKind::per_cell)
                for (const auto &row : arm.feedback.bits)
                    for (int b : row)
                        needed.insert({arm_layout(s, arm).n_tx, b});
        if (needed.empty())
            std::cerr << "scenario uses no per-cell codebooks\n";
        CodebookStore store(s.codebooks);
        for (const auto &[dim, bits] : needed)
        {
            const CodebookPtr cb = store.isotropic(dim, static_cast<unsigned>(bits));
            const std::string path =
                (std::filesystem::path(dir) / ("codebook_" + std::to_string(dim) + "x" + std::to_string(bits) + ".bin")).string();
            save_codebook(*cb, path);
            std::cout << dim << ":" << bits << " " << path << "\n";
        }
        return 0;
    }

    // ---------------------------------------------------------------------------------------------

    int cmd_simulate(const Common &c)
    {
        const Scenario s = load(c);
        RunOptions opt;
        opt.workers = c.workers;
        std::cerr << "simulate " << s.name << ": " << s.arms.size() << " arm(s), " << s.trials << " trial(s), seed "
                  << s.master_seed << "\n";
        std::vector<MetricsRow> rows;
        if (s.placement.mode == PlacementMode::random_uniform)
            rows = to_rows(run_cdf(s, opt));
        else
            rows = to_rows(run(s, opt));
        const bool from_file = c.out_option->count() == 0 && !s.outputs.csv.empty();
        emit(from_file ? s.outputs.csv : c.out, [&](std::ostream &os) { write_csv(os, rows); });
        std::cerr << "wrote " << rows.size() << " row(s)\n";
        return 0;
    }

    // ---------------------------------------------------------------------------------------------

    struct BoundArgs
    {
        Common common;
        std::optional<double> at;
        bool zero_error = false;
        bool verify = false;
    };

    int cmd_bound(const BoundArgs &a)
    {
        Scenario s = load(a.common);
        if (s.placement.mode == PlacementMode::random_uniform)
            throw ConfigError("bound: needs fixed or line_sweep placement", {"placement.mode: bound needs fixed or line_sweep"});
        std::vector<std::optional<double>> points;
        if (a.at)
        {
            if (s.placement.mode != PlacementMode::line_sweep)
                throw ConfigError("--at needs a line_sweep scenario", {"--at needs a line_sweep scenario"});
            points.push_back(*a.at);
        }
        else if (s.placement.mode == PlacementMode::line_sweep)
            for (double v : s.placement.sweep.values())
                points.push_back(v);
        else
            points.push_back(std::nullopt);
        const std::string var = s.placement.mode == PlacementMode::line_sweep
                                    ? "ms" + std::to_string(s.placement.sweep.user + 1) + "_distance_m"
                                    : "none";

        CodebookStore store(s.codebooks);
        std::vector<MetricsRow> rows;
        std::ostream &text = a.common.out == "-" ? std::cerr : std::cout;
        const Arm *appendix_arm = nullptr;
        std::vector<Point> appendix_pos;
        for (const Arm &arm : s.arms)
        {
            if (arm.feedback.mode != FeedbackKind::per_cell)
                continue;
            for (const auto &pt : points)
            {
                const auto pos = positions_at(s, arm, pt);
                if (!appendix_arm)
                {
                    appendix_arm = &arm;
                    appendix_pos = pos;
                }
                const LinkModel m = link_model(s, arm, pos, store);
                RMatrix err = detail::expected_error_matrix(m.feedback);
                if (a.zero_error)
                    err.setZero();
                const auto p = RateLossParams::from_large_scale(m.large_scale, m.n_tx, err);
                const double sv = pt.value_or(0.0);
                text << arm.label << "  " << var << "=" << format_double(sv) << "\n";
                for (std::size_t k = 0; k < static_cast<std::size_t>(p.beta.rows()); ++k)
                {
                    const BoundTerms t = rate_loss_bound_general(p, k);
                    text << "  user " << k + 1 << ": bound " << format_double(t.value) << " bit/s/Hz";
                    rows.push_back({s.name, arm.label, var, sv, k + 1, "rate_loss_bound", t.value, 0, s.master_seed});
                    for (std::size_t j = 0; j < t.interference.size(); ++j)
                    {
                        if (j == k)
                            continue;
                        text << "  I_" << j + 1 << "=" << format_double(t.interference[j]);
                        rows.push_back({s.name, arm.label, var, sv, k + 1, "bound_interference:" + std::to_string(j + 1),
                                        t.interference[j], 0, s.master_seed});
                    }
                    text << "\n";
                }
            }
        }
        if (rows.empty())
            throw ConfigError("bound: scenario has no per-cell arm", {"arms: bound needs at least one per_cell arm"});

        if (a.verify)
        {
            const std::size_t trials = a.common.trials.value_or(100000);
            const LinkModel m = link_model(s, *appendix_arm, appendix_pos, store);
            const AppendixReport rep = verify_appendix(m, trials, s.master_seed, 0, 1, a.common.workers);
            text << "appendix checks (" << appendix_arm->label << ", " << trials << " trials)\n";
            for (const auto &c : rep.checks)
                text << "  " << c.step << ": " << c.relation << "  lhs=" << format_double(c.lhs)
                     << " rhs=" << format_double(c.rhs) << " se=" << format_double(c.se) << "  "
                     << to_string(c.status) << "\n";
            for (auto &r : to_rows(rep, s.name, trials, s.master_seed))
                rows.push_back(std::move(r));
        }
        if (a.common.out != "-")
            emit(a.common.out, [&](std::ostream &os) { write_csv(os, rows); });
        return 0;
    }

    // ---------------------------------------------------------------------------------------------

    int cmd_show(const Common &c)
    {
        const Scenario s = load(c);
        emit(c.out, [&](std::ostream &os) { os << serialize(s); });
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multicell MU-MIMO cooperative transmission with limited feedback"};
    app.require_subcommand(1);

    TrainArgs train;
    auto *t = app.add_subcommand("train-codebook", "Train codebooks for a scenario, or one isotropic codebook");
    add_common(*t, train.common);
    t->add_option("--dimension", train.dimension, "Codeword dimension (single-codebook mode)");
    t->add_option("--bits", train.bits, "Bits per index (single-codebook mode)");
    t->add_option("--kind", train.kind, "lloyd or random")->check(CLI::IsMember({"lloyd", "random"}));

    Common sim;
    auto *sc = app.add_subcommand("simulate", "Run a scenario and write metrics CSV");
    add_common(*sc, sim);

    BoundArgs bound;
    auto *b = app.add_subcommand("bound", "Tabulate the closed-form rate-loss bound");
    add_common(*b, bound.common);
    b->add_option("--at", bound.at, "Swept user's distance from its BS in metres");
    b->add_flag("--zero-error", bound.zero_error, "Evaluate with E{sin^2 theta} = 0");
    b->add_flag("--verify-appendix", bound.verify, "Monte Carlo check of each derivation step");

    Common show;
    auto *sh = app.add_subcommand("show-config", "Print the canonical scenario file");
    add_common(*sh, show);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try
    {
        if (t->parsed())
            return cmd_train(train);
        if (sc->parsed())
            return cmd_simulate(sim);
        if (b->parsed())
            return cmd_bound(bound);
        if (sh->parsed())
            return cmd_show(show);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        for (std::size_t i = 1; i < e.diagnostics().size(); ++i)
            std::cerr << "  " << e.diagnostics()[i] << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_config;
}
