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


#include <mucomp/channel.hpp>
#include <mucomp/scheduling.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace mucomp;
using Catch::Matchers::WithinAbs;

TEST_CASE("quantized correlation", "[scheduling]")
{
    CVector a = CVector::Zero(8), b = CVector::Zero(8);
    a(0) = 1.0;
    b(0) = b(1) = 1.0 / std::sqrt(2.0);
    CHECK_THAT(quantized_correlation(a, a), WithinAbs(1.0, 1e-15));
    CHECK_THAT(quantized_correlation(a, b), WithinAbs(std::sqrt(0.5), 1e-15));
    CHECK(quantized_correlation(a, b) == quantized_correlation(b, a));
    CVector c = CVector::Zero(8);
    c(3) = cdouble(0, 2);
    CHECK(quantized_correlation(a, c) == 0.0);
    CHECK_THROWS_AS(quantized_correlation(a, CVector::Zero(8)), std::domain_error);
}

TEST_CASE("selection policies", "[scheduling]")
{
    Rng rng(1);
    auto pools = [&](std::size_t n)
    {
        std::vector<std::vector<CVector>> c(2);
        for (auto &cell : c)
            for (std::size_t i = 0; i < n; ++i)
                cell.push_back(rng.complex_normal_vector(8));
        return c;
    };
    SECTION("threshold 1 is first-by-norm and never rejects")
    {
        for (int t = 0; t < 100; ++t)
        {
            const auto c = pools(5);
            const auto s = select_pairing(c, {PairingMode::sus_threshold, 1.0, 5});
            REQUIRE(s.accepted);
            for (std::size_t cell = 0; cell < 2; ++cell)
                for (const auto &g : c[cell])
                    CHECK(g.norm() <= c[cell][s.chosen[cell]].norm());
        }
    }
    SECTION("threshold 0 rejects generic channels")
    {
        for (int t = 0; t < 100; ++t)
            CHECK_FALSE(select_pairing(pools(5), {PairingMode::sus_threshold, 0.0, 5}).accepted);
    }
    SECTION("fixed and always_pair are unconditional")
    {
        const auto c = pools(3);
        CHECK(select_pairing(c, {PairingMode::always_pair, 0.0, 3}).chosen == std::vector<std::size_t>{0, 0});
        CHECK(select_pairing(c, {PairingMode::fixed, 0.0, 3}, {2, 1}).chosen == std::vector<std::size_t>{2, 1});
        CHECK_THROWS_AS(select_pairing(c, {PairingMode::fixed, 0.0, 3}, {3, 0}), ConfigError);
    }
    SECTION("empty candidate list")
    {
        CHECK_THROWS_AS(select_pairing({{}, {CVector::Ones(8)}}, {}), ConfigError);
        CHECK_THROWS_AS(select_pairing({}, {}), ConfigError);
    }
    SECTION("50 candidates, threshold 0.3: brute-force constraint oracle")
    {
        for (int t = 0; t < 50; ++t)
        {
            const auto c = pools(50);
            const PairingPolicy pol{PairingMode::sus_threshold, 0.3, 50};
            const auto s = select_pairing(c, pol);
            REQUIRE(s.accepted);
            const CVector &g0 = c[0][s.chosen[0]], &g1 = c[1][s.chosen[1]];
            // Oracle: cell 0 takes the strongest; cell 1 the strongest among those with correlation < 0.3.
            std::size_t best0 = 0;
            for (std::size_t i = 1; i < 50; ++i)
                if (c[0][i].norm() > c[0][best0].norm())
                    best0 = i;
            CHECK(s.chosen[0] == best0);
            double best_norm = -1.0;
            std::size_t best1 = 99;
            for (std::size_t i = 0; i < 50; ++i)
            {
                const double corr = std::abs(inner(g0, c[1][i])) / (g0.norm() * c[1][i].norm());
                if (corr < 0.3 && c[1][i].norm() > best_norm)
                {
                    best_norm = c[1][i].norm();
                    best1 = i;
                }
            }
            CHECK(s.chosen[1] == best1);
            CHECK(quantized_correlation(g0, g1) < 0.3);
        }
    }
    SECTION("deterministic")
    {
        const auto c = pools(20);
        const PairingPolicy pol{PairingMode::sus_threshold, 0.5, 20};
        CHECK(select_pairing(c, pol).chosen == select_pairing(c, pol).chosen);
    }
    SECTION("policy validation")
    {
        CHECK_FALSE(PairingPolicy{PairingMode::sus_threshold, 1.5, 1}.check().empty());
        CHECK_FALSE(PairingPolicy{PairingMode::sus_threshold, 0.3, 0}.check().empty());
    }
}
