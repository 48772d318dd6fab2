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


#ifndef MUCOMP_SCENARIO_HPP
#define MUCOMP_SCENARIO_HPP

// Declarative experiment description. The on-disk form is a JSON document; see docs/config-format.md.

#include "channel.hpp"
#include "codebook.hpp"
#include "feedback.hpp"
#include "numfmt.hpp"
#include "precoding.hpp"
#include "scheduling.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mucomp
{
    enum class PlacementMode
    {
        fixed,
        line_sweep,
        random_uniform,
    };

    // Moves one user along the segment from its own BS toward the neighbouring BS.
    struct LineSweep
    {
        std::size_t user = 0;
        double start_m = 250.0;
        double stop_m = 50.0;
        std::size_t steps = 5;

        bool operator==(const LineSweep &) const = default;

        std::vector<double> values() const
        {
            std::vector<double> v;
            if (steps == 1)
                return {start_m};
            for (std::size_t i = 0; i < steps; ++i)
                v.push_back(start_m + (stop_m - start_m) * static_cast<double>(i) / static_cast<double>(steps - 1));
            return v;
        }
    };

    struct Placement
    {
        PlacementMode mode = PlacementMode::fixed;
        std::vector<Point> positions; // one per user (fixed / non-swept users)
        LineSweep sweep;

        bool operator==(const Placement &) const = default;
    };

    struct FeedbackConfig
    {
        FeedbackKind mode = FeedbackKind::perfect;
        std::vector<std::vector<int>> bits; // per_cell: users x BSs
        int global_bits = 6;                // global
        bool phase_aligned = true;

        bool operator==(const FeedbackConfig &) const = default;
    };

    enum class Layout
    {
        comp,        // N cooperating BSs with n_tx antennas each
        single_cell, // one BS with N * n_tx antennas serving all users of its cell
    };

    struct Arm
    {
        std::string label;
        FeedbackConfig feedback;
        Layout layout = Layout::comp;
        std::optional<std::vector<Point>> positions; // overrides placement.positions
        double bs_power_scale = 1.0;                 // single_cell: BS power relative to one CoMP BS

        bool operator==(const Arm &) const = default;
    };

    struct CodebookConfig
    {
        CodebookKind kind = CodebookKind::lloyd;
        double training_factor = 200.0; // training samples per codeword
        std::size_t max_iters = 100;
        double tol = 1e-6;
        std::uint64_t seed = 1;
        std::size_t error_samples = 100000; // draws for the cached E{sin^2 theta}
        std::map<std::string, std::string> files; // "dim:bits" -> codebook file, per-cell only

        bool operator==(const CodebookConfig &) const = default;
    };

    struct Outputs
    {
        bool retain_samples = false;
        std::string csv;

        bool operator==(const Outputs &) const = default;
    };

    struct Scenario
    {
        std::string name = "custom";
        Geometry geometry;
        std::size_t n_tx = 4;
        double tx_power = 1.0;
        double noise = 1.0;
        Placement placement;
        std::vector<Arm> arms;
        PairingPolicy pairing;
        std::size_t trials = 1000; // per sweep point, or per drop in random_uniform mode
        std::size_t drops = 0;     // random_uniform only
        std::uint64_t master_seed = 1;
        double condition_cap = default_condition_cap;
        CodebookConfig codebooks;
        Outputs outputs;

        bool operator==(const Scenario &) const = default;
    };

    // Geometry, antenna count and per-user power seen by one arm.
    struct ArmLayout
    {
        Geometry geometry;
        std::size_t n_tx = 0;
        double user_power = 1.0;
    };

    inline ArmLayout arm_layout(const Scenario &s, const Arm &arm)
    {
        ArmLayout l;
        if (arm.layout == Layout::comp)
        {
            l.geometry = s.geometry;
            l.n_tx = s.n_tx;
            l.user_power = s.tx_power;
            return l;
        }
        l.geometry = s.geometry;
        l.geometry.n_cells = 1;
        l.geometry.users_per_cell = s.geometry.n_users();
        l.geometry.bs_positions = {s.geometry.bs_positions.front()};
        l.n_tx = s.geometry.n_cells * s.n_tx;
        // A CoMP BS radiates n_users * P / n_cells on average; the single BS radiates
        // bs_power_scale times that, split equally over its users.
        const double comp_bs_power = s.tx_power * static_cast<double>(s.geometry.n_users()) /
                                     static_cast<double>(s.geometry.n_cells);
        l.user_power = arm.bs_power_scale * comp_bs_power / static_cast<double>(l.geometry.n_users());
        return l;
    }

    inline std::vector<std::string> check(const Scenario &s)
    {
        std::vector<std::string> e;
        for (const auto &m : s.geometry.check())
            e.push_back("geometry." + m);
        const std::size_t K = s.geometry.n_users();
        if (s.n_tx < 2)
            e.emplace_back("n_tx: must be >= 2");
        if (!(s.tx_power > 0.0))
            e.emplace_back("tx_power: must be > 0");
        if (!(s.noise > 0.0))
            e.emplace_back("noise: must be > 0");
        if (s.trials < 1)
            e.emplace_back("trials: must be >= 1");
        if (!(s.condition_cap > 1.0))
            e.emplace_back("condition_cap: must be > 1");
        for (const auto &m : s.pairing.check())
            e.push_back("pairing." + m);
        if (s.pairing.mode == PairingMode::sus_threshold && s.geometry.users_per_cell != 1)
            e.emplace_back("pairing.mode: sus_threshold schedules one user per cell (users_per_cell must be 1)");
        if (!(s.codebooks.training_factor >= 100.0))
            e.emplace_back("codebooks.training_factor: must be >= 100");
        if (!(s.codebooks.tol >= 0.0))
            e.emplace_back("codebooks.tol: must be >= 0");
        if (s.codebooks.error_samples < 2)
            e.emplace_back("codebooks.error_samples: must be >= 2");

        const auto &pl = s.placement;
        if (pl.mode != PlacementMode::random_uniform && pl.positions.size() != K)
            e.push_back("placement.positions: expected " + std::to_string(K) + " entries, got " +
                        std::to_string(pl.positions.size()));
        if (pl.mode == PlacementMode::line_sweep)
        {
            if (pl.sweep.user >= K)
                e.emplace_back("placement.sweep.user: out of range");
            if (pl.sweep.steps < 1)
                e.emplace_back("placement.sweep.steps: must be >= 1");
            double span = 2.0 * s.geometry.cell_radius_m;
            if (s.geometry.n_cells >= 2 && s.geometry.bs_positions.size() == s.geometry.n_cells)
                span = distance(s.geometry.bs_positions[0], s.geometry.bs_positions[1]);
            for (const char *f : {"start_m", "stop_m"})
            {
                const double v = std::string(f) == "start_m" ? pl.sweep.start_m : pl.sweep.stop_m;
                if (!(v >= s.geometry.min_distance_m && v <= span - s.geometry.min_distance_m))
                    e.push_back(std::string("placement.sweep.") + f + ": must lie within [min_distance_m, BS spacing - min_distance_m]");
            }
        }
        if (pl.mode == PlacementMode::random_uniform && s.drops < 1)
            e.emplace_back("drops: must be >= 1 for random_uniform placement");

        if (s.arms.empty())
            e.emplace_back("arms: at least one arm is required");
        std::set<std::string> labels;
        for (std::size_t a = 0; a < s.arms.size(); ++a)
        {
            const Arm &arm = s.arms[a];
            const std::string p = "arms[" + std::to_string(a) + "].";
            if (arm.label.empty())
                e.push_back(p + "label: must not be empty");
            else if (!labels.insert(arm.label).second)
                e.push_back(p + "label: duplicate '" + arm.label + "'");
            if (arm.label.find_first_of(",\"\n") != std::string::npos)
                e.push_back(p + "label: must not contain commas, quotes or newlines");
            if (arm.positions && arm.positions->size() != K)
                e.push_back(p + "positions: expected " + std::to_string(K) + " entries");
            if (!(arm.bs_power_scale > 0.0))
                e.push_back(p + "bs_power_scale: must be > 0");
            const std::size_t n_bs = arm.layout == Layout::comp ? s.geometry.n_cells : 1;
            const auto &fb = arm.feedback;
            if (fb.mode == FeedbackKind::per_cell)
            {
                if (fb.bits.size() != K)
                    e.push_back(p + "feedback.bits: expected " + std::to_string(K) + " rows (one per user)");
                for (std::size_t k = 0; k < fb.bits.size(); ++k)
                {
                    if (fb.bits[k].size() != n_bs)
                        e.push_back(p + "feedback.bits[" + std::to_string(k) + "]: expected " + std::to_string(n_bs) +
                                    " entries (one per BS)");
                    for (std::size_t b = 0; b < fb.bits[k].size(); ++b)
                        if (fb.bits[k][b] < 0 || fb.bits[k][b] > 16)
                            e.push_back(p + "feedback.bits[" + std::to_string(k) + "][" + std::to_string(b) +
                                        "]: must lie in [0, 16]");
                }
            }
            if (fb.mode == FeedbackKind::global)
            {
                if (fb.global_bits < 0 || fb.global_bits > 16)
                    e.push_back(p + "feedback.global_bits: must lie in [0, 16]");
                if (arm.layout != Layout::comp || s.geometry.users_per_cell != 1)
                    e.push_back(p + "feedback.mode: global quantization needs the comp layout with one user per cell");
            }
            if (arm.layout == Layout::single_cell && s.pairing.mode == PairingMode::sus_threshold && K > 1)
                e.push_back(p + "layout: sus_threshold pairing needs one user per cell, single_cell has " +
                            std::to_string(K));
        }
        if (K > s.geometry.n_cells * s.n_tx)
            e.emplace_back("geometry: more users than cooperating antennas");
        return e;
    }

    inline void validate(const Scenario &s)
    {
        auto e = check(s);
        if (!e.empty())
            throw ConfigError("invalid scenario (" + std::to_string(e.size()) + " problem(s)): " + e.front(), e);
    }

    // ---------------------------------------------------------------------------------------------
    // JSON mapping

    namespace detail
    {
        using nlohmann::json;

        template <class E>
        struct EnumNames;

        template <>
        struct EnumNames<PlacementMode>
        {
            static constexpr std::pair<PlacementMode, const char *> names[] = {
                {PlacementMode::fixed, "fixed"},
                {PlacementMode::line_sweep, "line_sweep"},
                {PlacementMode::random_uniform, "random_uniform"}};
        };
        template <>
        struct EnumNames<FeedbackKind>
        {
            static constexpr std::pair<FeedbackKind, const char *> names[] = {
                {FeedbackKind::perfect, "perfect"}, {FeedbackKind::per_cell, "per_cell"}, {FeedbackKind::global, "global"}};
        };
        template <>
        struct EnumNames<Layout>
        {
            static constexpr std::pair<Layout, const char *> names[] = {{Layout::comp, "comp"},
                                                                        {Layout::single_cell, "single_cell"}};
        };
        template <>
        struct EnumNames<PairingMode>
        {
            static constexpr std::pair<PairingMode, const char *> names[] = {
                {PairingMode::fixed, "fixed"}, {PairingMode::sus_threshold, "sus_threshold"}, {PairingMode::always_pair, "always_pair"}};
        };
        template <>
        struct EnumNames<CodebookKind>
        {
            static constexpr std::pair<CodebookKind, const char *> names[] = {{CodebookKind::random, "random"},
                                                                              {CodebookKind::lloyd, "lloyd"}};
        };
        template <>
        struct EnumNames<PathlossSign>
        {
            static constexpr std::pair<PathlossSign, const char *> names[] = {{PathlossSign::corrected, "corrected"},
                                                                              {PathlossSign::as_printed, "as_printed"}};
        };

        template <class E>
        std::string enum_name(E v)
        {
            for (const auto &[e, n] : EnumNames<E>::names)
                if (e == v)
                    return n;
            return "?";
        }

        inline json point_json(const Point &p) { return json::array({p.x, p.y}); }
        inline json points_json(const std::vector<Point> &v)
        {
            json a = json::array();
            for (const auto &p : v)
                a.push_back(point_json(p));
            return a;
        }

        // Reads one JSON object, recording every problem with its path and rejecting unknown keys.
        class ObjectReader
        {
        public:
            ObjectReader(const json &j, std::string path, std::vector<std::string> &errors)
                : j_(j), path_(std::move(path)), errors_(errors)
            {
                if (!j_.is_object())
                {
                    error("", "expected an object");
                    valid_ = false;
                }
            }

            ObjectReader(const ObjectReader &) = delete;
            ObjectReader &operator=(const ObjectReader &) = delete;

            bool valid() const { return valid_; }
            const std::string &path() const { return path_; }

            const json *find(const std::string &key)
            {
                if (!valid_)
                    return nullptr;
                seen_.insert(key);
                auto it = j_.find(key);
                return it == j_.end() ? nullptr : &*it;
            }

            void error(const std::string &key, const std::string &msg)
            {
                errors_.push_back((key.empty() ? path_ : join(key)) + ": " + msg);
            }

            std::string join(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

            void read(const std::string &key, double &out)
            {
                if (auto *v = find(key))
                {
                    if (v->is_number())
                        out = v->get<double>();
                    else
                        error(key, "expected a number");
                }
            }
            void read(const std::string &key, bool &out)
            {
                if (auto *v = find(key))
                {
                    if (v->is_boolean())
                        out = v->get<bool>();
                    else
                        error(key, "expected true or false");
                }
            }
            void read(const std::string &key, std::string &out)
            {
                if (auto *v = find(key))
                {
                    if (v->is_string())
                        out = v->get<std::string>();
                    else
                        error(key, "expected a string");
                }
            }
            void read(const std::string &key, int &out)
            {
                if (auto *v = find(key))
                {
                    if (v->is_number_integer())
                        out = v->get<int>();
                    else
                        error(key, "expected an integer");
                }
            }
            template <class U>
                requires(std::is_unsigned_v<U> && !std::is_same_v<U, bool>)
            void read(const std::string &key, U &out)
            {
                if (auto *v = find(key))
                {
                    if (v->is_number_unsigned())
                        out = v->get<U>();
                    else
                        error(key, "expected a nonnegative integer");
                }
            }
            template <class E>
                requires std::is_enum_v<E>
            void read(const std::string &key, E &out)
            {
                if (auto *v = find(key))
                {
                    if (!v->is_string())
                    {
                        error(key, "expected a string");
                        return;
                    }
                    const auto s = v->get<std::string>();
                    std::string allowed;
                    for (const auto &[e, n] : EnumNames<E>::names)
                    {
                        if (s == n)
                        {
                            out = e;
                            return;
                        }
                        allowed += allowed.empty() ? n : std::string(", ") + n;
                    }
                    error(key, "unknown value '" + s + "' (expected one of: " + allowed + ")");
                }
            }
            void read(const std::string &key, std::vector<Point> &out)
            {
                if (auto *v = find(key))
                    out = parse_points(*v, join(key));
            }

            std::vector<Point> parse_points(const json &v, const std::string &where)
            {
                std::vector<Point> pts;
                if (!v.is_array())
                {
                    errors_.push_back(where + ": expected an array of [x, y] pairs");
                    return pts;
                }
                for (std::size_t i = 0; i < v.size(); ++i)
                {
                    const auto &p = v[i];
                    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                        errors_.push_back(where + "[" + std::to_string(i) + "]: expected [x, y]");
                    else
                        pts.push_back({p[0].get<double>(), p[1].get<double>()});
                }
                return pts;
            }

            void finish()
            {
                if (!valid_)
                    return;
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!seen_.count(it.key()))
                        errors_.push_back(join(it.key()) + ": unknown key");
            }

        private:
            const json &j_;
            std::string path_;
            std::vector<std::string> &errors_;
            std::set<std::string> seen_;
            bool valid_ = true;
        };
    } // namespace detail

    inline nlohmann::json to_json(const Scenario &s)
    {
        using detail::enum_name;
        using nlohmann::json;
        json j;
        j["name"] = s.name;
        const Geometry &g = s.geometry;
        j["geometry"] = {{"cell_radius_m", g.cell_radius_m},
                         {"n_cells", g.n_cells},
                         {"users_per_cell", g.users_per_cell},
                         {"bs_positions", detail::points_json(g.bs_positions)},
                         {"pathloss_exponent", g.pathloss_exponent},
                         {"edge_snr_db", g.edge_snr_db},
                         {"min_distance_m", g.min_distance_m},
                         {"pathloss_sign", enum_name(g.pathloss_sign)}};
        j["n_tx"] = s.n_tx;
        j["tx_power"] = s.tx_power;
        j["noise"] = s.noise;
        j["placement"] = {{"mode", enum_name(s.placement.mode)},
                          {"positions", detail::points_json(s.placement.positions)},
                          {"sweep",
                           {{"user", s.placement.sweep.user},
                            {"start_m", s.placement.sweep.start_m},
                            {"stop_m", s.placement.sweep.stop_m},
                            {"steps", s.placement.sweep.steps}}}};
        json arms = json::array();
        for (const Arm &a : s.arms)
        {
            json fb = {{"mode", enum_name(a.feedback.mode)},
                       {"bits", a.feedback.bits},
                       {"global_bits", a.feedback.global_bits},
                       {"phase_aligned", a.feedback.phase_aligned}};
            json ja = {{"label", a.label}, {"feedback", fb}, {"layout", enum_name(a.layout)}, {"bs_power_scale", a.bs_power_scale}};
            if (a.positions)
                ja["positions"] = detail::points_json(*a.positions);
            arms.push_back(std::move(ja));
        }
        j["arms"] = std::move(arms);
        j["pairing"] = {{"mode", enum_name(s.pairing.mode)},
                        {"threshold", s.pairing.threshold},
                        {"candidate_pool_size", s.pairing.candidate_pool_size}};
        j["trials"] = s.trials;
        j["drops"] = s.drops;
        j["master_seed"] = s.master_seed;
        j["condition_cap"] = s.condition_cap;
        j["codebooks"] = {{"kind", enum_name(s.codebooks.kind)},
                          {"training_factor", s.codebooks.training_factor},
                          {"max_iters", s.codebooks.max_iters},
                          {"tol", s.codebooks.tol},
                          {"seed", s.codebooks.seed},
                          {"error_samples", s.codebooks.error_samples},
                          {"files", s.codebooks.files}};
        j["outputs"] = {{"retain_samples", s.outputs.retain_samples}, {"csv", s.outputs.csv}};
        return j;
    }

    // Canonical text form: sorted keys, two-space indent, shortest round-trip numbers.
    inline std::string serialize(const Scenario &s) { return to_json(s).dump(2) + "\n"; }

    inline std::uint64_t fingerprint(const Scenario &s)
    {
        const std::string text = to_json(s).dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    // Parses a scenario. Missing keys keep their defaults; unknown keys and malformed values are
    // collected and reported together.
    inline Scenario parse_scenario(const std::string &text)
    {
        using nlohmann::json;
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("malformed JSON: ") + e.what(), {std::string("malformed JSON: ") + e.what()});
        }

        std::vector<std::string> errors;
        Scenario s;
        detail::ObjectReader root(j, "", errors);
        root.read("name", s.name);
        if (const auto *g = root.find("geometry"))
        {
            detail::ObjectReader r(*g, "geometry", errors);
            r.read("cell_radius_m", s.geometry.cell_radius_m);
            r.read("n_cells", s.geometry.n_cells);
            r.read("users_per_cell", s.geometry.users_per_cell);
            r.read("bs_positions", s.geometry.bs_positions);
            r.read("pathloss_exponent", s.geometry.pathloss_exponent);
            r.read("edge_snr_db", s.geometry.edge_snr_db);
            r.read("min_distance_m", s.geometry.min_distance_m);
            r.read("pathloss_sign", s.geometry.pathloss_sign);
            r.finish();
        }
        root.read("n_tx", s.n_tx);
        root.read("tx_power", s.tx_power);
        root.read("noise", s.noise);
        if (const auto *p = root.find("placement"))
        {
            detail::ObjectReader r(*p, "placement", errors);
            r.read("mode", s.placement.mode);
            r.read("positions", s.placement.positions);
            if (const auto *sw = r.find("sweep"))
            {
                detail::ObjectReader rs(*sw, "placement.sweep", errors);
                rs.read("user", s.placement.sweep.user);
                rs.read("start_m", s.placement.sweep.start_m);
                rs.read("stop_m", s.placement.sweep.stop_m);
                rs.read("steps", s.placement.sweep.steps);
                rs.finish();
            }
            r.finish();
        }
        if (const auto *arms = root.find("arms"))
        {
            if (!arms->is_array())
                errors.emplace_back("arms: expected an array");
            else
                for (std::size_t i = 0; i < arms->size(); ++i)
                {
                    const std::string path = "arms[" + std::to_string(i) + "]";
                    Arm a;
                    detail::ObjectReader r((*arms)[i], path, errors);
                    r.read("label", a.label);
                    r.read("layout", a.layout);
                    r.read("bs_power_scale", a.bs_power_scale);
                    if (const auto *pos = r.find("positions"))
                        a.positions = r.parse_points(*pos, path + ".positions");
                    if (const auto *fb = r.find("feedback"))
                    {
                        detail::ObjectReader rf(*fb, path + ".feedback", errors);
                        rf.read("mode", a.feedback.mode);
                        rf.read("global_bits", a.feedback.global_bits);
                        rf.read("phase_aligned", a.feedback.phase_aligned);
                        if (const auto *bits = rf.find("bits"))
                        {
                            bool ok = bits->is_array();
                            for (std::size_t k = 0; ok && k < bits->size(); ++k)
                            {
                                const auto &row = (*bits)[k];
                                ok = row.is_array();
                                for (std::size_t b = 0; ok && b < row.size(); ++b)
                                    ok = row[b].is_number_integer();
                            }
                            if (ok)
                                a.feedback.bits = bits->get<std::vector<std::vector<int>>>();
                            else
                                errors.push_back(path + ".feedback.bits: expected an array of integer arrays");
                        }
                        rf.finish();
                    }
                    r.finish();
                    s.arms.push_back(std::move(a));
                }
        }
        if (const auto *p = root.find("pairing"))
        {
            detail::ObjectReader r(*p, "pairing", errors);
            r.read("mode", s.pairing.mode);
            r.read("threshold", s.pairing.threshold);
            r.read("candidate_pool_size", s.pairing.candidate_pool_size);
            r.finish();
        }
        root.read("trials", s.trials);
        root.read("drops", s.drops);
        root.read("master_seed", s.master_seed);
        root.read("condition_cap", s.condition_cap);
        if (const auto *c = root.find("codebooks"))
        {
            detail::ObjectReader r(*c, "codebooks", errors);
            r.read("kind", s.codebooks.kind);
            r.read("training_factor", s.codebooks.training_factor);
            r.read("max_iters", s.codebooks.max_iters);
            r.read("tol", s.codebooks.tol);
            r.read("seed", s.codebooks.seed);
            r.read("error_samples", s.codebooks.error_samples);
            if (const auto *f = r.find("files"))
            {
                if (!f->is_object())
                    errors.emplace_back("codebooks.files: expected an object mapping \"dim:bits\" to a path");
                else
                    for (auto it = f->begin(); it != f->end(); ++it)
                    {
                        if (it.value().is_string())
                            s.codebooks.files[it.key()] = it.value().get<std::string>();
                        else
                            errors.push_back("codebooks.files." + it.key() + ": expected a path string");
                    }
            }
            r.finish();
        }
        if (const auto *o = root.find("outputs"))
        {
            detail::ObjectReader r(*o, "outputs", errors);
            r.read("retain_samples", s.outputs.retain_samples);
            r.read("csv", s.outputs.csv);
            r.finish();
        }
        root.finish();

        for (auto &e : check(s))
            if (std::find(errors.begin(), errors.end(), e) == errors.end())
                errors.push_back(std::move(e));
        if (!errors.empty())
            throw ConfigError("invalid scenario (" + std::to_string(errors.size()) + " problem(s)): " + errors.front(),
                              errors);
        return s;
    }

    // MUCOMP_SEED and MUCOMP_TRIALS take precedence over the file.
    namespace detail
    {
        template <class Int>
        Int env_integer(const char *name, const char *value, Int minimum)
        {
            try
            {
                const Int x = parse_int<Int>(value);
                if (x >= minimum)
                    return x;
            }
            catch (const std::invalid_argument &)
            {
            }
            const std::string msg = std::string(name) + ": expected an integer >= " + std::to_string(minimum) +
                                    ", got '" + value + "'";
            throw ConfigError(msg, {msg});
        }
    } // namespace detail

    inline void apply_environment(Scenario &s)
    {
        if (const char *v = std::getenv("MUCOMP_SEED"); v && *v)
            s.master_seed = detail::env_integer<std::uint64_t>("MUCOMP_SEED", v, 0);
        if (const char *v = std::getenv("MUCOMP_TRIALS"); v && *v)
            s.trials = detail::env_integer<std::size_t>("MUCOMP_TRIALS", v, 1);
    }

    // ---------------------------------------------------------------------------------------------
    // Presets

    namespace detail
    {
        inline Arm make_arm(std::string label, FeedbackConfig fb, std::optional<std::vector<Point>> pos = std::nullopt)
        {
            Arm a;
            a.label = std::move(label);
            a.feedback = std::move(fb);
            a.positions = std::move(pos);
            return a;
        }
        inline FeedbackConfig perfect() { return {}; }
        inline FeedbackConfig per_cell(int local, int cross)
        {
            FeedbackConfig f;
            f.mode = FeedbackKind::per_cell;
            f.bits = {{local, cross}, {cross, local}};
            return f;
        }
        inline FeedbackConfig global(int bits)
        {
            FeedbackConfig f;
            f.mode = FeedbackKind::global;
            f.global_bits = bits;
            return f;
        }
        inline std::string metres(double d)
        {
            std::string s = format_double(d);
            return s + "m";
        }
    } // namespace detail

    // Rate-loss sweep: MS1 moves from the cell edge toward BS1 for several MS2 distances.
    inline Scenario preset_fig3(const std::vector<double> &ms2_distances = {250.0, 150.0, 50.0})
    {
        Scenario s;
        s.name = "fig3";
        s.placement.mode = PlacementMode::line_sweep;
        s.placement.positions = {{250.0, 0.0}, {250.0, 0.0}};
        s.placement.sweep = {0, 250.0, 50.0, 5};
        s.trials = 1000;
        s.master_seed = 20100301;
        for (double d2 : ms2_distances)
        {
            const std::vector<Point> pos{{250.0, 0.0}, {500.0 - d2, 0.0}};
            const std::string tag = "@ms2=" + detail::metres(d2);
            s.arms.push_back(detail::make_arm("ideal" + tag, detail::perfect(), pos));
            s.arms.push_back(detail::make_arm("per_cell_3+3" + tag, detail::per_cell(3, 3), pos));
        }
        return s;
    }

    // Throughput sweep with MS2 at the cell edge: global vs per-cell bit splits.
    inline Scenario preset_fig4()
    {
        Scenario s;
        s.name = "fig4";
        s.placement.mode = PlacementMode::line_sweep;
        s.placement.positions = {{250.0, 0.0}, {250.0, 0.0}};
        s.placement.sweep = {0, 250.0, 50.0, 5};
        s.trials = 1000;
        s.master_seed = 20100302;
        s.arms.push_back(detail::make_arm("ideal", detail::perfect()));
        s.arms.push_back(detail::make_arm("global_6", detail::global(6)));
        s.arms.push_back(detail::make_arm("per_cell_4+2", detail::per_cell(4, 2)));
        s.arms.push_back(detail::make_arm("per_cell_3+3", detail::per_cell(3, 3)));
        return s;
    }

    // Throughput distribution over uniform drops: CoMP vs conventional single-cell MU-MIMO.
    inline Scenario preset_fig5()
    {
        Scenario s;
        s.name = "fig5";
        s.placement.mode = PlacementMode::random_uniform;
        s.drops = 1000;
        s.trials = 100;
        s.master_seed = 20100303;
        s.arms.push_back(detail::make_arm("comp_ideal", detail::perfect()));
        s.arms.push_back(detail::make_arm("comp_per_cell_3+3", detail::per_cell(3, 3)));
        Arm single = detail::make_arm("single_ideal", detail::perfect());
        single.layout = Layout::single_cell;
        single.bs_power_scale = 2.0;
        s.arms.push_back(single);
        FeedbackConfig six;
        six.mode = FeedbackKind::per_cell;
        six.bits = {{6}, {6}};
        single.label = "single_6bit";
        single.feedback = six;
        s.arms.push_back(single);
        return s;
    }

    inline std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5"}; }

    inline Scenario preset(const std::string &name)
    {
        if (name == "fig3")
            return preset_fig3();
        if (name == "fig4")
            return preset_fig4();
        if (name == "fig5")
            return preset_fig5();
        throw ConfigError("unknown preset '" + name + "' (expected fig3, fig4 or fig5)",
                          {"preset: unknown value '" + name + "'"});
    }
} // namespace mucomp

#endif
