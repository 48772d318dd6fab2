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


#include <mucomp/codebook.hpp>
#include <mucomp/codebook_io.hpp>

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace mucomp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Independent exhaustive search: scalar loops only, lowest index wins ties.
    std::pair<std::size_t, double> brute_force(const CVector &v, const Codebook &cb)
    {
        double vn = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            vn += std::norm(v(i));
        std::size_t best = 0;
        double best_g = -1.0;
        for (std::size_t c = 0; c < cb.size(); ++c)
        {
            cdouble acc = 0.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                acc += v(i) * std::conj(cb.matrix()(static_cast<Eigen::Index>(c), i));
            const double g = std::norm(acc) / vn;
            if (g > best_g)
            {
                best_g = g;
                best = c;
            }
        }
        return {best, 1.0 - best_g};
    }

    std::string tmp_path(const std::string &name)
    {
        return (std::filesystem::temp_directory_path() / ("mucomp_test_" + name)).string();
    }

    std::string slurp(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    }
} // namespace

TEST_CASE("codebook invariants are enforced", "[quantization]")
{
    const auto cb = random_codebook(4, 3, 11);
    CHECK(cb.size() == 8);
    for (std::size_t i = 0; i < cb.size(); ++i)
        CHECK_THAT(cb.codeword(i).norm(), WithinAbs(1.0, 1e-12));
    CVector e1 = CVector::Zero(2);
    e1(0) = 1.0;
    CHECK_THROWS_AS(Codebook(2, 1, CodebookKind::random, {e1, e1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(Codebook(2, 1, CodebookKind::random, {e1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(Codebook(2, 0, CodebookKind::random, {CVector(2 * e1)}, 0), std::invalid_argument);
    // Phase-collinear pair is allowed but flagged.
    const Codebook flagged(2, 1, CodebookKind::random, {e1, CVector(cdouble(0, 1) * e1)}, 0);
    CHECK(flagged.has_phase_collinear_pair());
    CHECK_FALSE(cb.has_phase_collinear_pair());
}

TEST_CASE("quantize_direction examples", "[quantization]")
{
    const auto cb = random_codebook(4, 3, 5);
    SECTION("scaled codeword is recovered exactly")
    {
        for (std::size_t j = 0; j < cb.size(); ++j)
        {
            const CVector v = cdouble(-2.0, 0.7) * cb.codeword(j);
            const auto q = quantize_direction(v, cb);
            CHECK(q.index == j);
            CHECK_THAT(q.error, WithinAbs(0.0, 1e-12));
        }
    }
    SECTION("orthogonal to every codeword")
    {
        CVector a = CVector::Zero(4), b = CVector::Zero(4);
        a(0) = 1.0;
        b(1) = 1.0;
        const Codebook two(4, 1, CodebookKind::random, {a, b}, 0);
        CVector v = CVector::Zero(4);
        v(2) = cdouble(0.3, 0.4);
        v(3) = 1.0;
        const auto q = quantize_direction(v, two);
        CHECK(q.error == 1.0);
        CHECK(q.index == 0);
    }
    SECTION("zero vector and dimension mismatch")
    {
        CHECK_THROWS_AS(quantize_direction(CVector::Zero(4), cb), std::domain_error);
        CHECK_THROWS(quantize_direction(CVector::Ones(3), cb));
    }
}

TEST_CASE("quantizer matches exhaustive search on 1e5 draws", "[quantization][oracle]")
{
    const auto rvq = random_codebook(4, 3, 17);
    const auto lloyd = train_isotropic_lloyd(4, 3, 17);
    Rng rng(2024);
    std::size_t mismatches = 0;
    double sum = 0.0, sum_oracle = 0.0;
    for (int i = 0; i < 100000; ++i)
    {
        const CVector v = rng.complex_normal_vector(4);
        for (const Codebook *cb : {&rvq, &lloyd})
        {
            const auto q = quantize_direction(v, *cb);
            const auto [idx, err] = brute_force(v, *cb);
            mismatches += q.index != idx;
            CHECK(std::abs(q.error - err) < 1e-12);
            if (cb == &rvq)
            {
                sum += q.error;
                sum_oracle += err;
            }
        }
    }
    CHECK(mismatches == 0);
    CHECK_THAT(sum, WithinRel(sum_oracle, 1e-12));
}

TEST_CASE("phase invariance and error range", "[quantization]")
{
    const auto cb = train_isotropic_lloyd(4, 3, 3);
    Rng rng(1);
    for (int i = 0; i < 2000; ++i)
    {
        const CVector v = rng.complex_normal_vector(4);
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const auto a = quantize_direction(v, cb);
        const auto b = quantize_direction(std::polar(1.0, phi) * v, cb);
        CHECK(a.index == b.index);
        CHECK_THAT(a.error, WithinAbs(b.error, 1e-12));
        CHECK(a.error >= 0.0);
        CHECK(a.error <= 1.0);
    }
}

TEST_CASE("nested codebooks never increase the error", "[quantization]")
{
    const auto small = random_codebook(4, 2, 8);
    const auto extra = random_codebook(4, 2, 9);
    std::vector<CVector> cw;
    for (std::size_t i = 0; i < 4; ++i)
        cw.push_back(small.codeword(i));
    for (std::size_t i = 0; i < 4; ++i)
        cw.push_back(extra.codeword(i));
    const Codebook big(4, 3, CodebookKind::random, cw, 0);
    Rng rng(4);
    for (int i = 0; i < 5000; ++i)
    {
        const CVector v = rng.complex_normal_vector(4);
        CHECK(quantize_direction(v, big).error <= quantize_direction(v, small).error);
    }
}

TEST_CASE("RVQ mean error agrees with the random-codebook closed form", "[quantization][oracle]")
{
    // Averaged over codebooks, E{sin^2} = 2^B Beta(2^B, M/(M-1)).
    const int M = 4, B = 3;
    const double n = std::pow(2.0, B), a = static_cast<double>(M) / (M - 1);
    const double expect = n * std::exp(std::lgamma(n) + std::lgamma(a) - std::lgamma(n + a));
    std::vector<double> per_codebook;
    for (std::uint64_t s = 0; s < 400; ++s)
        per_codebook.push_back(estimate_expected_error(random_codebook(M, B, 1000 + s), 500, s).mean);
    const double m = mean(per_codebook), se = standard_error(per_codebook);
    CHECK(std::abs(m - expect) < 3.0 * se);
}

TEST_CASE("cached expected error matches a fresh brute-force estimate", "[quantization][oracle]")
{
    const auto cb = random_codebook(4, 3, 21);
    const auto est = estimate_expected_error(cb, 100000, 1);
    Rng rng(77);
    std::vector<double> o;
    for (int i = 0; i < 100000; ++i)
        o.push_back(brute_force(rng.complex_normal_vector(4), cb).second);
    const double se = std::hypot(est.se, standard_error(o));
    CHECK(std::abs(est.mean - mean(o)) < 3.0 * se);
}

TEST_CASE("Lloyd training", "[quantization][lloyd]")
{
    SECTION("distortion is non-increasing per iteration")
    {
        for (unsigned bits : {1u, 2u, 3u, 4u})
        {
            const auto cb = train_isotropic_lloyd(4, bits, 100 + bits);
            const auto &h = cb.training_meta()->distortion_history;
            REQUIRE(h.size() >= 2);
            for (std::size_t i = 1; i < h.size(); ++i)
                CHECK(h[i] <= h[i - 1] + 1e-12);
            CHECK(cb.training_meta()->training_size == 200u << bits);
        }
    }
    SECTION("bits = 0 gives the dominant eigenvector")
    {
        Rng rng(5);
        std::vector<CVector> xs;
        CVector skew(3);
        skew << 3.0, 1.0, 0.5;
        for (int i = 0; i < 400; ++i)
        {
            CVector v = rng.complex_normal_vector(3).cwiseProduct(skew);
            xs.push_back(v / v.norm());
        }
        const auto cb = train_lloyd(3, 0, xs, {}, 1);
        CMatrix R = CMatrix::Zero(3, 3);
        for (const auto &x : xs)
            R += x.adjoint() * x;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
        const double lmax = es.eigenvalues()(2);
        const CVector u = es.eigenvectors().col(2).adjoint();
        CHECK_THAT(std::abs((cb.codeword(0) * u.adjoint())(0, 0)), WithinAbs(1.0, 1e-10));
        CHECK_THAT(cb.training_meta()->distortion_history.back(), WithinAbs(1.0 - lmax / 400.0, 1e-12));
    }
    SECTION("perfectly clusterable data reaches zero distortion")
    {
        std::vector<CVector> xs;
        for (int rep = 0; rep < 200; ++rep)
            for (int d = 0; d < 4; ++d)
            {
                CVector e = CVector::Zero(4);
                e(d) = std::polar(1.0, 0.1 * rep);
                xs.push_back(e);
            }
        const auto cb = train_lloyd(4, 2, xs, {}, 3);
        CHECK_THAT(cb.training_meta()->distortion_history.back(), WithinAbs(0.0, 1e-12));
        CHECK_THROWS_WITH(train_lloyd(4, 3, xs, {}, 3), Catch::Matchers::ContainsSubstring("distinct directions"));
    }
    SECTION("Lloyd beats RVQ on held-out isotropic data (measured gap)")
    {
        const auto lloyd = train_isotropic_lloyd(4, 3, 9);
        const auto rvq = random_codebook(4, 3, 9);
        Rng rng(31337);
        std::vector<double> diff;
        for (int i = 0; i < 100000; ++i)
        {
            const CVector v = rng.complex_normal_vector(4);
            diff.push_back(quantize_direction(v, rvq).error - quantize_direction(v, lloyd).error);
        }
        CHECK(mean(diff) > 0.0);
        UNSCOPED_INFO("Lloyd gain over RVQ: " << mean(diff) << " +/- " << standard_error(diff));
    }
    SECTION("too few samples are rejected")
    {
        const auto xs = isotropic_training_set(4, 799, 1);
        CHECK_THROWS_AS(train_lloyd(4, 3, xs, {}, 1), std::invalid_argument);
    }
    SECTION("max_iters reached without convergence is flagged")
    {
        LloydOptions o;
        o.max_iters = 1;
        o.tol = 0.0;
        const auto cb = train_lloyd(4, 3, isotropic_training_set(4, 1600, 2), o, 2);
        CHECK_FALSE(cb.training_meta()->converged);
        CHECK(cb.training_meta()->iterations == 1);
    }
}

TEST_CASE("codebook files round-trip", "[quantization][io]")
{
    auto cb = train_isotropic_lloyd(4, 3, 12);
    cb.set_expected_error(estimate_expected_error(cb, 1000, 3));
    for (const std::string name : {"cb.bin", "cb.txt"})
    {
        const std::string path = tmp_path(name);
        save_codebook(cb, path);
        const Codebook back = load_codebook(path);
        CHECK(back.matrix() == cb.matrix());
        CHECK(back.bits() == 3);
        CHECK(back.dimension() == 4);
        CHECK(back.kind() == CodebookKind::lloyd);
        CHECK(back.seed() == 12);
        REQUIRE(back.expected_error());
        CHECK(back.expected_error()->mean == cb.expected_error()->mean);
        CHECK(back.training_meta()->distortion_history == cb.training_meta()->distortion_history);
        save_codebook(back, path + ".again" + (name == "cb.txt" ? ".txt" : ""));
        CHECK(slurp(path) == slurp(path + ".again" + (name == "cb.txt" ? ".txt" : "")));
    }
    CHECK_THROWS(from_binary("MUCOMPCB\x02"));
    CHECK_THROWS(from_text("not a codebook\n"));
}

TEST_CASE("training is deterministic given the seed", "[quantization][io]")
{
    CHECK(to_binary(train_isotropic_lloyd(4, 3, 6)) == to_binary(train_isotropic_lloyd(4, 3, 6)));
    CHECK(to_binary(train_isotropic_lloyd(4, 3, 6)) != to_binary(train_isotropic_lloyd(4, 3, 7)));
    const auto one = train_isotropic_lloyd(4, 0, 6);
    CHECK(one.size() == 1);
    CHECK(from_binary(to_binary(one)).size() == 1);
}
