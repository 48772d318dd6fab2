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


#ifndef MUCOMP_CODEBOOK_HPP
#define MUCOMP_CODEBOOK_HPP

#include "linalg.hpp"
#include "random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mucomp
{
    enum class CodebookKind
    {
        random,
        lloyd,
    };

    inline std::string to_string(CodebookKind k) { return k == CodebookKind::random ? "random" : "lloyd"; }

    struct TrainingMeta
    {
        std::size_t training_size = 0;
        std::size_t iterations = 0;
        bool converged = false;
        double final_delta = 0.0;              // relative improvement of the last iteration
        std::vector<double> distortion_history; // [0] = initial codebook, then one entry per iteration

        bool operator==(const TrainingMeta &) const = default;
    };

    // Monte Carlo estimate of E{sin^2 theta} for isotropic input directions.
    struct ErrorEstimate
    {
        double mean = 0.0;
        double se = 0.0;
        std::size_t samples = 0;

        bool operator==(const ErrorEstimate &) const = default;
    };

    struct Quantized
    {
        std::size_t index = 0;
        double error = 1.0;  // sin^2 theta = 1 - |vbar c^H|^2, clamped to [0, 1]
        cdouble projection;  // vbar c_index^H
    };

    // 2^bits unit-norm row vectors of a fixed dimension. Immutable after construction.
    class Codebook
    {
    public:
        Codebook() = default;

        Codebook(std::size_t dimension, unsigned bits, CodebookKind kind, std::vector<CVector> codewords,
                 std::uint64_t seed = 0, std::optional<TrainingMeta> meta = std::nullopt)
            : dimension_(dimension), bits_(bits), kind_(kind), seed_(seed), meta_(std::move(meta))
        {
            if (dimension < 1)
                throw std::invalid_argument("Codebook: dimension must be >= 1");
            if (bits > 24)
                throw std::invalid_argument("Codebook: more than 24 bits is not supported");
            const std::size_t n = std::size_t{1} << bits;
            if (codewords.size() != n)
                throw std::invalid_argument("Codebook: expected " + std::to_string(n) + " codewords, got " +
                                            std::to_string(codewords.size()));
            rows_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dimension));
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto &c = codewords[i];
                if (c.size() != static_cast<Eigen::Index>(dimension))
                    throw std::invalid_argument("Codebook: codeword " + std::to_string(i) + " has wrong dimension");
                if (std::abs(c.norm() - 1.0) > 1e-12)
                    throw std::invalid_argument("Codebook: codeword " + std::to_string(i) + " is not unit norm");
                rows_.row(static_cast<Eigen::Index>(i)) = c;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                {
                    const auto ci = rows_.row(static_cast<Eigen::Index>(i));
                    const auto cj = rows_.row(static_cast<Eigen::Index>(j));
                    if ((ci - cj).norm() == 0.0)
                        throw std::invalid_argument("Codebook: codewords " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " are identical");
                    if (std::abs((ci * cj.adjoint())(0, 0)) > 1.0 - 1e-12)
                        collinear_ = true;
                }
        }

        std::size_t dimension() const { return dimension_; }
        unsigned bits() const { return bits_; }
        std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
        CodebookKind kind() const { return kind_; }
        std::uint64_t seed() const { return seed_; }
        const std::optional<TrainingMeta> &training_meta() const { return meta_; }
        const std::optional<ErrorEstimate> &expected_error() const { return expected_error_; }
        bool has_phase_collinear_pair() const { return collinear_; }

        CVector codeword(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }
        const CMatrix &matrix() const { return rows_; }

        void set_expected_error(const ErrorEstimate &e) { expected_error_ = e; }

    private:
        std::size_t dimension_ = 0;
        unsigned bits_ = 0;
        CodebookKind kind_ = CodebookKind::random;
        std::uint64_t seed_ = 0;
        CMatrix rows_;
        std::optional<TrainingMeta> meta_;
        std::optional<ErrorEstimate> expected_error_;
        bool collinear_ = false;
    };

    // Nearest codeword in chordal distance: argmax_j |vbar c_j^H|^2, lowest index on ties.
    inline Quantized quantize_direction(const CVector &v, const Codebook &cb)
    {
        if (v.size() != static_cast<Eigen::Index>(cb.dimension()))
            throw std::invalid_argument("quantize_direction: vector length " + std::to_string(v.size()) +
                                        " does not match codebook dimension " + std::to_string(cb.dimension()));
        const double n = v.norm();
        if (!(n > 0.0))
            throw std::domain_error("quantize_direction: zero vector has no direction");
        const Eigen::RowVectorXcd ip = (v / n) * cb.matrix().adjoint();
        Eigen::Index best = 0;
        double best_val = std::norm(ip(0));
        for (Eigen::Index j = 1; j < ip.size(); ++j)
        {
            const double val = std::norm(ip(j));
            if (val > best_val)
            {
                best_val = val;
                best = j;
            }
        }
        Quantized q;
        q.index = static_cast<std::size_t>(best);
        q.error = std::clamp(1.0 - best_val, 0.0, 1.0);
        q.projection = ip(best);
        return q;
    }

    // Codewords sorted by decreasing |vbar c^H|^2 (stable, so ties keep index order).
    inline std::vector<std::size_t> rank_codewords(const CVector &v, const Codebook &cb)
    {
        const Eigen::RowVectorXcd ip = unit(v) * cb.matrix().adjoint();
        std::vector<std::size_t> order(cb.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return std::norm(ip(static_cast<Eigen::Index>(a))) > std::norm(ip(static_cast<Eigen::Index>(b))); });
        return order;
    }

    // Rotate so the largest-magnitude entry is real and positive. Keeps stored codebooks canonical.
    inline CVector canonical_phase(const CVector &c)
    {
        Eigen::Index imax = 0;
        c.cwiseAbs().maxCoeff(&imax);
        const double a = std::abs(c(imax));
        if (a == 0.0)
            return c;
        return c * (std::conj(c(imax)) / a);
    }

    // Random vector quantization: 2^bits i.i.d. isotropic unit vectors.
    inline Codebook random_codebook(std::size_t dimension, unsigned bits, std::uint64_t seed)
    {
        Rng rng(seed, StreamTag::codebook_init, {dimension, bits});
        std::vector<CVector> cw;
        const std::size_t n = std::size_t{1} << bits;
        cw.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            CVector c = canonical_phase(rng.isotropic_unit(static_cast<Eigen::Index>(dimension)));
            cw.push_back(c / c.norm());
        }
        return Codebook(dimension, bits, CodebookKind::random, std::move(cw), seed);
    }

    struct LloydOptions
    {
        std::size_t max_iters = 100;
        double tol = 1e-6; // relative distortion improvement that ends training
    };

    namespace detail
    {
        // rows of X against rows of C: |X C^H|^2, best index (lowest on ties) and error per row
        inline double partition(const CMatrix &X, const CMatrix &C, std::vector<std::size_t> &idx,
                                std::vector<double> &err)
        {
            const CMatrix ip = X * C.adjoint();
            const auto n = static_cast<std::size_t>(X.rows());
            idx.resize(n);
            err.resize(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto r = static_cast<Eigen::Index>(i);
                Eigen::Index best = 0;
                double best_val = std::norm(ip(r, 0));
                for (Eigen::Index j = 1; j < ip.cols(); ++j)
                {
                    const double val = std::norm(ip(r, j));
                    if (val > best_val)
                    {
                        best_val = val;
                        best = j;
                    }
                }
                idx[i] = static_cast<std::size_t>(best);
                err[i] = std::clamp(1.0 - best_val, 0.0, 1.0);
                total += err[i];
            }
            return total / static_cast<double>(n);
        }

        // Unit w maximising w^H R w, returned as the row codeword c = w^H.
        inline CVector dominant_direction(const CMatrix &R)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(R);
            if (es.info() != Eigen::Success)
                throw NumericalError("lloyd: eigen decomposition failed");
            const CColumn w = es.eigenvectors().col(R.rows() - 1);
            CVector c = canonical_phase(w.adjoint());
            return c / c.norm();
        }
    } // namespace detail

    // Generalized Lloyd training under chordal distortion d^2(x, c) = 1 - |x c^H|^2.
    // Centroid of a cell = dominant eigenvector of sum x^H x over its members.
    inline Codebook train_lloyd(std::size_t dimension, unsigned bits, const std::vector<CVector> &samples,
                                const LloydOptions &opt, std::uint64_t seed)
    {
        const std::size_t n_codes = std::size_t{1} << bits;
        if (samples.size() < 100 * n_codes)
            throw std::invalid_argument("train_lloyd: need at least 100 * 2^bits = " + std::to_string(100 * n_codes) +
                                        " training samples, got " + std::to_string(samples.size()));
        CMatrix X(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(dimension));
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            if (samples[i].size() != static_cast<Eigen::Index>(dimension))
                throw std::invalid_argument("train_lloyd: sample " + std::to_string(i) + " has wrong dimension");
            if (std::abs(samples[i].norm() - 1.0) > 1e-9)
                throw std::invalid_argument("train_lloyd: sample " + std::to_string(i) + " is not unit norm");
            X.row(static_cast<Eigen::Index>(i)) = samples[i];
        }

        // Initial codebook: training samples in partial Fisher-Yates order, skipping any sample
        // that coincides (up to phase) with one already chosen.
        Rng rng(seed, StreamTag::codebook_init, {dimension, bits});
        std::vector<std::size_t> perm(samples.size());
        for (std::size_t i = 0; i < perm.size(); ++i)
            perm[i] = i;
        CMatrix C(static_cast<Eigen::Index>(n_codes), static_cast<Eigen::Index>(dimension));
        std::size_t chosen = 0;
        for (std::size_t i = 0; i < perm.size() && chosen < n_codes; ++i)
        {
            const std::size_t j = i + rng.uniform_index(perm.size() - i);
            std::swap(perm[i], perm[j]);
            const CVector c = canonical_phase(samples[perm[i]]);
            bool fresh = true;
            for (std::size_t q = 0; q < chosen && fresh; ++q)
                fresh = std::abs(inner(c, C.row(static_cast<Eigen::Index>(q)))) < 1.0 - 1e-12;
            if (fresh)
                C.row(static_cast<Eigen::Index>(chosen++)) = c;
        }
        if (chosen < n_codes)
            throw std::invalid_argument("train_lloyd: training set has " + std::to_string(chosen) +
                                        " distinct directions, fewer than " + std::to_string(n_codes) + " codewords");

        TrainingMeta meta;
        meta.training_size = samples.size();
        std::vector<std::size_t> idx;
        std::vector<double> err;
        double distortion = detail::partition(X, C, idx, err);
        meta.distortion_history.push_back(distortion);

        for (std::size_t it = 0; it < opt.max_iters; ++it)
        {
            std::vector<CMatrix> R(n_codes, CMatrix::Zero(static_cast<Eigen::Index>(dimension),
                                                          static_cast<Eigen::Index>(dimension)));
            std::vector<std::size_t> count(n_codes, 0);
            for (std::size_t i = 0; i < samples.size(); ++i)
            {
                const auto x = X.row(static_cast<Eigen::Index>(i));
                R[idx[i]].noalias() += x.adjoint() * x;
                ++count[idx[i]];
            }
            std::vector<bool> taken(samples.size(), false);
            for (std::size_t c = 0; c < n_codes; ++c)
            {
                if (count[c] > 0)
                {
                    C.row(static_cast<Eigen::Index>(c)) = detail::dominant_direction(R[c]);
                    continue;
                }
                // Empty cell: re-seed with the worst-quantized sample not used yet; keep the old
                // codeword if every sample is already quantized exactly.
                std::size_t worst = 0;
                double worst_err = 1e-12;
                bool found = false;
                for (std::size_t i = 0; i < samples.size(); ++i)
                    if (!taken[i] && err[i] > worst_err)
                    {
                        worst_err = err[i];
                        worst = i;
                        found = true;
                    }
                if (!found)
                    continue;
                taken[worst] = true;
                C.row(static_cast<Eigen::Index>(c)) = canonical_phase(samples[worst]);
            }

            const double next = detail::partition(X, C, idx, err);
            if (next > distortion + 1e-12)
                throw NumericalError("train_lloyd: distortion increased from " + std::to_string(distortion) + " to " +
                                     std::to_string(next));
            meta.distortion_history.push_back(next);
            meta.iterations = it + 1;
            meta.final_delta = distortion > 0.0 ? (distortion - next) / distortion : 0.0;
            distortion = next;
            if (meta.final_delta < opt.tol)
            {
                meta.converged = true;
                break;
            }
        }

        std::vector<CVector> cw;
        cw.reserve(n_codes);
        for (std::size_t c = 0; c < n_codes; ++c)
            cw.emplace_back(C.row(static_cast<Eigen::Index>(c)));
        return Codebook(dimension, bits, CodebookKind::lloyd, std::move(cw), seed, std::move(meta));
    }

    // Training set of isotropic unit vectors (the CDI distribution of i.i.d. Rayleigh blocks).
    inline std::vector<CVector> isotropic_training_set(std::size_t dimension, std::size_t n, std::uint64_t seed)
    {
        Rng rng(seed, StreamTag::codebook_training, {dimension, n});
        std::vector<CVector> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(rng.isotropic_unit(static_cast<Eigen::Index>(dimension)));
        return out;
    }

    inline Codebook train_isotropic_lloyd(std::size_t dimension, unsigned bits, std::uint64_t seed,
                                          double training_factor = 200.0, const LloydOptions &opt = {})
    {
        const auto n = static_cast<std::size_t>(std::ceil(training_factor * static_cast<double>(std::size_t{1} << bits)));
        return train_lloyd(dimension, bits, isotropic_training_set(dimension, n, seed), opt, seed);
    }

    // E{sin^2 theta} over isotropic directions.
    inline ErrorEstimate estimate_expected_error(const Codebook &cb, std::size_t samples, std::uint64_t seed)
    {
        if (samples < 2)
            throw std::invalid_argument("estimate_expected_error: need at least 2 samples");
        Rng rng(seed, StreamTag::error_estimate, {cb.dimension(), cb.bits()});
        std::vector<double> e;
        e.reserve(samples);
        for (std::size_t i = 0; i < samples; ++i)
            e.push_back(quantize_direction(rng.complex_normal_vector(static_cast<Eigen::Index>(cb.dimension())), cb).error);
        return {mean(e), standard_error(e), samples};
    }
} // namespace mucomp

#endif
