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


#ifndef MUCOMP_RANDOM_HPP
#define MUCOMP_RANDOM_HPP

#include "linalg.hpp"

#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace mucomp
{
    // Stream tags keep substreams for different purposes disjoint.
    enum class StreamTag : std::uint64_t
    {
        small_scale = 1,
        placement = 2,
        candidate_pool = 3,
        codebook_init = 4,
        codebook_training = 5,
        error_estimate = 6,
        bootstrap = 7,
        appendix = 8,
        generic = 9,
    };

    inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Counter-based seed derivation: the seed of a substream is a pure function of
    // (master, tag, counters), so results do not depend on which worker draws it.
    inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                     std::initializer_list<std::uint64_t> counters = {}) noexcept
    {
        std::uint64_t h = splitmix64(master ^ 0x6D75636F6D70ULL);
        h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
        for (std::uint64_t c : counters)
            h = splitmix64(h ^ splitmix64(c + 0x1234567ULL));
        return h;
    }

    // Random stream with distributions implemented on top of the raw 64-bit engine output,
    // which the standard fixes bit-exactly (std::normal_distribution is implementation-defined).
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}
        Rng(std::uint64_t master, StreamTag tag, std::initializer_list<std::uint64_t> counters = {})
            : engine_(derive_seed(master, tag, counters)) {}

        std::uint64_t next_u64() { return engine_(); }

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        // Uniform on (0, 1].
        double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

        std::size_t uniform_index(std::size_t n)
        {
            if (n == 0)
                throw std::invalid_argument("uniform_index: empty range");
            return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
        }

        // Standard normal via Box-Muller; one pair of uniforms per call pair.
        double normal()
        {
            if (has_spare_)
            {
                has_spare_ = false;
                return spare_;
            }
            const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
            const double phi = 2.0 * std::numbers::pi * uniform();
            spare_ = r * std::sin(phi);
            has_spare_ = true;
            return r * std::cos(phi);
        }

        // Circularly-symmetric complex Gaussian, zero mean, unit variance.
        cdouble complex_normal()
        {
            const double re = normal();
            const double im = normal();
            return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
        }

        CVector complex_normal_vector(Eigen::Index n)
        {
            CVector v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = complex_normal();
            return v;
        }

        // Isotropic unit vector in C^n.
        CVector isotropic_unit(Eigen::Index n)
        {
            CVector v = complex_normal_vector(n);
            while (v.norm() == 0.0)
                v = complex_normal_vector(n);
            return v / v.norm();
        }

        // Haar-distributed n x n unitary (QR of a Gaussian matrix with the phases of diag(R) removed).
        CMatrix haar_unitary(Eigen::Index n)
        {
            CMatrix a(n, n);
            for (Eigen::Index r = 0; r < n; ++r)
                for (Eigen::Index c = 0; c < n; ++c)
                    a(r, c) = complex_normal();
            Eigen::HouseholderQR<CMatrix> qr(a);
            CMatrix q = qr.householderQ();
            const CMatrix &rr = qr.matrixQR();
            for (Eigen::Index c = 0; c < n; ++c)
            {
                const cdouble d = rr(c, c);
                if (std::abs(d) > 0.0)
                    q.col(c) *= d / std::abs(d);
            }
            return q;
        }

    private:
        std::mt19937_64 engine_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };
} // namespace mucomp

#endif
