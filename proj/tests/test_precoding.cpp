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


#include <mucomp/link.hpp>

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace mucomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    std::vector<CVector> random_rows(Rng &rng, std::size_t k, Eigen::Index m)
    {
        std::vector<CVector> r;
        for (std::size_t i = 0; i < k; ++i)
            r.push_back(rng.complex_normal_vector(m));
        return r;
    }
} // namespace

TEST_CASE("ZF invariants on random quantized instances", "[precoding]")
{
    Rng rng(10);
    const auto cb = std::make_shared<const Codebook>(train_isotropic_lloyd(4, 3, 2));
    const auto ls = build_large_scale({{70, 0}, {330, 40}}, Geometry{});
    for (int i = 0; i < 1000; ++i)
    {
        auto real = sample_small_scale(2, 2, 4, rng);
        assemble_global(real, ls);
        const auto fb = per_cell_feedback(real, ls, LinkCodebooks(2, {cb, cb}));
        const Precoder p = zf_precoder(fb.reconstructed);
        for (Eigen::Index k = 0; k < 2; ++k)
        {
            CHECK_THAT(p.column(k).norm(), WithinAbs(1.0, 1e-12));
            for (Eigen::Index j = 0; j < 2; ++j)
                if (j != k)
                    CHECK(std::abs((fb.reconstructed[static_cast<std::size_t>(k)] * p.column(j))(0, 0)) <=
                          1e-9 * fb.reconstructed[static_cast<std::size_t>(k)].norm());
        }
        CHECK(p.source_channel_hash == channel_hash(fb.reconstructed));
    }
}

TEST_CASE("unnormalized pseudo-inverse satisfies H V = I", "[precoding]")
{
    Rng rng(1);
    const auto rows = random_rows(rng, 2, 8);
    const Precoder p = zf_precoder(rows);
    const CMatrix H = stack_rows(rows);
    CMatrix HV = H * p.columns;
    for (Eigen::Index k = 0; k < 2; ++k)
        HV.col(k) /= HV(k, k);
    CHECK((HV - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("orthogonal channels give matched-filter columns", "[precoding]")
{
    Rng rng(2);
    for (int i = 0; i < 100; ++i)
    {
        CVector a = rng.complex_normal_vector(8), b = rng.complex_normal_vector(8);
        b -= inner(b, a) / a.squaredNorm() * a;
        const Precoder p = zf_precoder({a, b});
        CHECK((p.column(0) - a.adjoint() / a.norm()).norm() < 1e-12);
        CHECK((p.column(1) - b.adjoint() / b.norm()).norm() < 1e-12);
    }
    const CVector one = rng.complex_normal_vector(4);
    CHECK((zf_precoder({one}).column(0) - one.adjoint() / one.norm()).norm() < 1e-12);
}

TEST_CASE("rank-deficient and oversized channel sets are rejected", "[precoding]")
{
    Rng rng(3);
    const CVector a = rng.complex_normal_vector(4);
    CHECK_THROWS_AS(zf_precoder({a, CVector(cdouble(2, 1) * a)}), PrecodingError);
    CHECK_THROWS_AS(zf_precoder(random_rows(rng, 5, 4)), PrecodingError);
    CVector b = a;
    b(0) += 1e-10;
    CHECK_THROWS_AS(zf_precoder({a, b}), PrecodingError);
    const auto t = transmit({a, b}, {a, b}, 1.0, 1.0);
    CHECK_FALSE(t.ok);
    CHECK_FALSE(t.failure.empty());
}

TEST_CASE("SINR evaluation", "[precoding]")
{
    Rng rng(4);
    SECTION("perfect CSI has no interference")
    {
        const auto g = random_rows(rng, 2, 8);
        const Precoder p = zf_precoder(g);
        const auto s = sinr(g, p, 2.0, 0.5);
        for (Eigen::Index k = 0; k < 2; ++k)
            CHECK_THAT(s[static_cast<std::size_t>(k)], WithinRel(2.0 * std::norm((g[static_cast<std::size_t>(k)] * p.column(k))(0, 0)) / 0.5, 1e-12));
        for (double i : interference_power(g, p, 2.0))
            CHECK(i < 1e-20);
    }
    SECTION("scalar re-evaluation and column swap")
    {
        for (int n = 0; n < 200; ++n)
        {
            const auto g = random_rows(rng, 2, 8);
            const auto ghat = random_rows(rng, 2, 8);
            Precoder p = zf_precoder(ghat);
            const auto s = sinr(g, p, 1.5, 1.0);
            for (std::size_t k = 0; k < 2; ++k)
            {
                double sig = 0.0, intf = 0.0;
                for (std::size_t j = 0; j < 2; ++j)
                {
                    cdouble acc = 0.0;
                    for (Eigen::Index m = 0; m < 8; ++m)
                        acc += g[k](m) * p.columns(m, static_cast<Eigen::Index>(j));
                    (j == k ? sig : intf) += 1.5 * std::norm(acc);
                }
                CHECK_THAT(s[k], WithinRel(sig / (1.0 + intf), 1e-12));
            }
            Precoder swapped = p;
            swapped.columns.col(0) = p.columns.col(1);
            swapped.columns.col(1) = p.columns.col(0);
            const auto t = sinr({g[1], g[0]}, swapped, 1.5, 1.0);
            CHECK_THAT(t[0], WithinRel(s[1], 1e-12));
            CHECK_THAT(t[1], WithinRel(s[0], 1e-12));
        }
    }
    SECTION("interference is invariant to per-user phase rotations")
    {
        const auto g = random_rows(rng, 2, 8);
        const Precoder p = zf_precoder(random_rows(rng, 2, 8));
        const auto base = interference_power(g, p, 1.0);
        const auto rot = interference_power({std::polar(1.0, 0.7) * g[0], std::polar(1.0, -2.1) * g[1]}, p, 1.0);
        CHECK_THAT(rot[0], WithinRel(base[0], 1e-12));
        CHECK_THAT(rot[1], WithinRel(base[1], 1e-12));
    }
}

TEST_CASE("instantaneous rate", "[precoding]")
{
    const auto r = instantaneous_rate({0.0, 1.0, 3.0});
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 1.0);
    CHECK(r[2] == 2.0);
    CHECK_THROWS(instantaneous_rate({-0.5}));
}
