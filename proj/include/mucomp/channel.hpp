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


#ifndef MUCOMP_CHANNEL_HPP
#define MUCOMP_CHANNEL_HPP

#include "linalg.hpp"
#include "random.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace mucomp
{
    struct Point
    {
        double x = 0.0;
        double y = 0.0;
        bool operator==(const Point &) const = default;
    };

    inline double distance(const Point &a, const Point &b) { return std::hypot(a.x - b.x, a.y - b.y); }

    // Sign convention of the distance term in the receive-SNR map.
    enum class PathlossSign
    {
        corrected,  // gamma(d) = gamma_edge - 10 eps log10(d / r); SNR falls with distance
        as_printed, // gamma(d) = gamma_edge + 10 eps log10(d / r); kept for auditing only
    };

    struct Geometry
    {
        double cell_radius_m = 250.0;
        std::size_t n_cells = 2;
        std::size_t users_per_cell = 1;
        std::vector<Point> bs_positions{{0.0, 0.0}, {500.0, 0.0}};
        double pathloss_exponent = 3.76;
        double edge_snr_db = 10.0;
        double min_distance_m = 1.0;
        PathlossSign pathloss_sign = PathlossSign::corrected;

        bool operator==(const Geometry &) const = default;

        std::size_t n_users() const { return n_cells * users_per_cell; }

        // Returns a list of violated invariants, empty when valid.
        std::vector<std::string> check() const
        {
            std::vector<std::string> e;
            if (n_cells < 1)
                e.emplace_back("n_cells: must be >= 1");
            if (users_per_cell < 1)
                e.emplace_back("users_per_cell: must be >= 1");
            if (!(cell_radius_m > 0.0))
                e.emplace_back("cell_radius_m: must be > 0");
            if (!(pathloss_exponent >= 0.0))
                e.emplace_back("pathloss_exponent: must be >= 0");
            if (!(min_distance_m > 0.0) || !(min_distance_m < cell_radius_m))
                e.emplace_back("min_distance_m: must lie in (0, cell_radius_m)");
            if (!std::isfinite(edge_snr_db))
                e.emplace_back("edge_snr_db: must be finite");
            if (bs_positions.size() != n_cells)
                e.emplace_back("bs_positions: expected " + std::to_string(n_cells) + " entries, got " +
                               std::to_string(bs_positions.size()));
            return e;
        }

        void validate() const
        {
            auto e = check();
            if (!e.empty())
                throw ConfigError("invalid geometry: " + e.front(), e);
        }

        // BSs on the x axis with spacing 2r, BS 1 at the origin.
        static Geometry line(std::size_t n_cells, double radius_m = 250.0)
        {
            Geometry g;
            g.n_cells = n_cells;
            g.cell_radius_m = radius_m;
            g.bs_positions.clear();
            for (std::size_t b = 0; b < n_cells; ++b)
                g.bs_positions.push_back({2.0 * radius_m * static_cast<double>(b), 0.0});
            return g;
        }
    };

    // Receive SNR in dB of a link of length d. Distances below min_distance_m are clamped.
    inline double receive_snr_db(double d, const Geometry &geom)
    {
        if (!(d > 0.0))
            throw std::domain_error("receive_snr_db: distance must be positive");
        const double dc = std::max(d, geom.min_distance_m);
        const double term = 10.0 * geom.pathloss_exponent * std::log10(dc / geom.cell_radius_m);
        return geom.pathloss_sign == PathlossSign::corrected ? geom.edge_snr_db - term : geom.edge_snr_db + term;
    }

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    // Large-scale state of every (user, BS) link. gamma^2 = P alpha^2 / noise.
    struct LargeScaleMap
    {
        RMatrix alpha_sq;     // users x BSs
        RMatrix snr_gamma_sq; // users x BSs, linear
        double tx_power = 1.0;
        double noise = 1.0;

        Eigen::Index users() const { return alpha_sq.rows(); }
        Eigen::Index cells() const { return alpha_sq.cols(); }

        static LargeScaleMap from_alpha_sq(const RMatrix &alpha_sq, double tx_power = 1.0, double noise = 1.0)
        {
            if ((alpha_sq.array() < 0.0).any())
                throw std::invalid_argument("LargeScaleMap: alpha^2 entries must be nonnegative");
            LargeScaleMap m;
            m.alpha_sq = alpha_sq;
            m.snr_gamma_sq = alpha_sq * (tx_power / noise);
            m.tx_power = tx_power;
            m.noise = noise;
            return m;
        }
    };

    // alpha^2 and gamma^2 from pairwise MS-BS distances.
    inline LargeScaleMap build_large_scale(const std::vector<Point> &ms_positions, const Geometry &geom,
                                           double tx_power = 1.0, double noise = 1.0)
    {
        geom.validate();
        if (ms_positions.size() != geom.n_users())
            throw ConfigError("build_large_scale: expected " + std::to_string(geom.n_users()) +
                              " MS positions, got " + std::to_string(ms_positions.size()));
        if (!(tx_power > 0.0) || !(noise > 0.0))
            throw ConfigError("build_large_scale: tx_power and noise must be positive");
        const auto K = static_cast<Eigen::Index>(ms_positions.size());
        const auto N = static_cast<Eigen::Index>(geom.n_cells);
        LargeScaleMap m;
        m.tx_power = tx_power;
        m.noise = noise;
        m.snr_gamma_sq.resize(K, N);
        m.alpha_sq.resize(K, N);
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index b = 0; b < N; ++b)
            {
                const double d = distance(ms_positions[static_cast<std::size_t>(k)],
                                          geom.bs_positions[static_cast<std::size_t>(b)]);
                const double g2 = db_to_linear(receive_snr_db(std::max(d, geom.min_distance_m), geom));
                m.snr_gamma_sq(k, b) = g2;
                m.alpha_sq(k, b) = g2 * noise / tx_power;
            }
        return m;
    }

    struct ChannelRealization
    {
        std::size_t n_tx = 0;
        std::vector<std::vector<CVector>> small_scale; // [user][bs], each 1 x n_tx
        std::vector<CVector> global;                   // [user], 1 x (N n_tx)

        std::size_t users() const { return small_scale.size(); }
        std::size_t cells() const { return small_scale.empty() ? 0 : small_scale.front().size(); }
    };

    // i.i.d. CN(0, 1) entries, one 1 x n_tx vector per (user, BS).
    inline ChannelRealization sample_small_scale(std::size_t n_users, std::size_t n_cells, std::size_t n_tx, Rng &rng)
    {
        if (n_users < 1 || n_cells < 1)
            throw ConfigError("sample_small_scale: need at least one user and one cell");
        if (n_tx < 2)
            throw ConfigError("sample_small_scale: n_tx must be >= 2");
        ChannelRealization r;
        r.n_tx = n_tx;
        r.small_scale.assign(n_users, std::vector<CVector>(n_cells));
        for (auto &user : r.small_scale)
            for (auto &h : user)
                h = rng.complex_normal_vector(static_cast<Eigen::Index>(n_tx));
        return r;
    }

    // g_k = [alpha_{k,1} h_{k,1}, ..., alpha_{k,N} h_{k,N}]
    inline CVector global_channel(const ChannelRealization &real, const LargeScaleMap &ls, std::size_t k)
    {
        std::vector<CVector> blocks;
        blocks.reserve(real.cells());
        for (std::size_t b = 0; b < real.cells(); ++b)
            blocks.push_back(std::sqrt(ls.alpha_sq(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b))) *
                             real.small_scale[k][b]);
        return concat(blocks);
    }

    inline void assemble_global(ChannelRealization &real, const LargeScaleMap &ls)
    {
        if (static_cast<Eigen::Index>(real.users()) != ls.users() ||
            static_cast<Eigen::Index>(real.cells()) != ls.cells())
            throw std::invalid_argument("assemble_global: large-scale map does not match realization");
        real.global.resize(real.users());
        for (std::size_t k = 0; k < real.users(); ++k)
            real.global[k] = global_channel(real, ls, k);
    }

    inline CMatrix global_matrix(const ChannelRealization &real) { return stack_rows(real.global); }

    // MS at distance d from BS `cell`, on the segment toward the next BS (cyclic); +x for one cell.
    inline Point point_toward_neighbour(const Geometry &geom, std::size_t cell, double d)
    {
        const Point &a = geom.bs_positions.at(cell);
        if (geom.n_cells < 2)
            return {a.x + d, a.y};
        const Point &b = geom.bs_positions[(cell + 1) % geom.n_cells];
        const double len = distance(a, b);
        return {a.x + d * (b.x - a.x) / len, a.y + d * (b.y - a.y) / len};
    }

    // Uniform over the disc of radius r around `centre`, excluding the disc of radius d_min.
    inline Point uniform_drop(const Point &centre, double radius, double d_min, Rng &rng)
    {
        const double u = rng.uniform();
        const double rr = std::sqrt(d_min * d_min + u * (radius * radius - d_min * d_min));
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        return {centre.x + rr * std::cos(phi), centre.y + rr * std::sin(phi)};
    }
} // namespace mucomp

#endif
