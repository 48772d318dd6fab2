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


#ifndef MUCOMP_CODEBOOK_IO_HPP
#define MUCOMP_CODEBOOK_IO_HPP

// Codebook container formats.
//
// Binary (".cbk"): little-endian, fields in this order
//   char[8] "MUCOMPCB", u32 version (1), u32 dimension, u32 bits, u32 kind (0 random, 1 lloyd), u64 seed,
//   u8 has_meta [u64 training_size, u64 iterations, u8 converged, f64 final_delta,
//                u64 history_len, f64 history[history_len]],
//   u8 has_error [f64 mean, f64 se, u64 samples],
//   f64 (re, im) x dimension for each of the 2^bits codewords, row-major.
//
// Text (canonical, for diffing): one "key value..." line per header field, then one
// "c <index> re im re im ..." line per codeword, reals printed with 17 significant digits.

#include "codebook.hpp"
#include "numfmt.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mucomp
{
    namespace detail
    {
        inline void put_u64(std::string &out, std::uint64_t v)
        {
            for (int i = 0; i < 8; ++i)
                out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
        inline void put_u32(std::string &out, std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
                out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
        inline void put_f64(std::string &out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

        class ByteReader
        {
        public:
            explicit ByteReader(std::string_view data) : data_(data) {}
            std::uint64_t u64() { return get(8); }
            std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
            std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
            double f64() { return std::bit_cast<double>(get(8)); }
            std::string_view bytes(std::size_t n)
            {
                need(n);
                auto s = data_.substr(pos_, n);
                pos_ += n;
                return s;
            }
            bool done() const { return pos_ == data_.size(); }

        private:
            void need(std::size_t n) const
            {
                if (pos_ + n > data_.size())
                    throw std::runtime_error("codebook file truncated");
            }
            std::uint64_t get(std::size_t n)
            {
                need(n);
                std::uint64_t v = 0;
                for (std::size_t i = 0; i < n; ++i)
                    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
                pos_ += n;
                return v;
            }
            std::string_view data_;
            std::size_t pos_ = 0;
        };
    } // namespace detail

    inline std::string to_binary(const Codebook &cb)
    {
        std::string out("MUCOMPCB", 8);
        detail::put_u32(out, 1);
        detail::put_u32(out, static_cast<std::uint32_t>(cb.dimension()));
        detail::put_u32(out, cb.bits());
        detail::put_u32(out, cb.kind() == CodebookKind::random ? 0 : 1);
        detail::put_u64(out, cb.seed());
        const auto &meta = cb.training_meta();
        out.push_back(meta ? 1 : 0);
        if (meta)
        {
            detail::put_u64(out, meta->training_size);
            detail::put_u64(out, meta->iterations);
            out.push_back(meta->converged ? 1 : 0);
            detail::put_f64(out, meta->final_delta);
            detail::put_u64(out, meta->distortion_history.size());
            for (double d : meta->distortion_history)
                detail::put_f64(out, d);
        }
        const auto &err = cb.expected_error();
        out.push_back(err ? 1 : 0);
        if (err)
        {
            detail::put_f64(out, err->mean);
            detail::put_f64(out, err->se);
            detail::put_u64(out, err->samples);
        }
        for (std::size_t i = 0; i < cb.size(); ++i)
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(cb.dimension()); ++j)
            {
                const cdouble z = cb.matrix()(static_cast<Eigen::Index>(i), j);
                detail::put_f64(out, z.real());
                detail::put_f64(out, z.imag());
            }
        return out;
    }

    inline Codebook from_binary(std::string_view data)
    {
        detail::ByteReader rd(data);
        if (rd.bytes(8) != "MUCOMPCB")
            throw std::runtime_error("not a codebook file (bad magic)");
        if (rd.u32() != 1)
            throw std::runtime_error("unsupported codebook file version");
        const std::size_t dim = rd.u32();
        const unsigned bits = rd.u32();
        const std::uint32_t kind = rd.u32();
        if (kind > 1)
            throw std::runtime_error("codebook file: unknown kind");
        const std::uint64_t seed = rd.u64();
        std::optional<TrainingMeta> meta;
        if (rd.u8())
        {
            TrainingMeta m;
            m.training_size = rd.u64();
            m.iterations = rd.u64();
            m.converged = rd.u8() != 0;
            m.final_delta = rd.f64();
            const std::uint64_t n = rd.u64();
            if (n > data.size())
                throw std::runtime_error("codebook file: corrupt history length");
            for (std::uint64_t i = 0; i < n; ++i)
                m.distortion_history.push_back(rd.f64());
            meta = std::move(m);
        }
        std::optional<ErrorEstimate> err;
        if (rd.u8())
        {
            ErrorEstimate e;
            e.mean = rd.f64();
            e.se = rd.f64();
            e.samples = rd.u64();
            err = e;
        }
        if (bits > 24 || dim == 0)
            throw std::runtime_error("codebook file: implausible header");
        std::vector<CVector> cw(std::size_t{1} << bits, CVector(static_cast<Eigen::Index>(dim)));
        for (auto &c : cw)
            for (Eigen::Index j = 0; j < c.size(); ++j)
            {
                const double re = rd.f64();
                const double im = rd.f64();
                c(j) = {re, im};
            }
        if (!rd.done())
            throw std::runtime_error("codebook file: trailing bytes");
        Codebook cb(dim, bits, kind == 0 ? CodebookKind::random : CodebookKind::lloyd, std::move(cw), seed, meta);
        if (err)
            cb.set_expected_error(*err);
        return cb;
    }

    inline std::string to_text(const Codebook &cb)
    {
        std::ostringstream os;
        os << "mucomp-codebook v1\n";
        os << "dimension " << cb.dimension() << "\n";
        os << "bits " << cb.bits() << "\n";
        os << "kind " << to_string(cb.kind()) << "\n";
        os << "seed " << cb.seed() << "\n";
        if (const auto &m = cb.training_meta())
        {
            os << "training_size " << m->training_size << "\n";
            os << "iterations " << m->iterations << "\n";
            os << "converged " << (m->converged ? 1 : 0) << "\n";
            os << "final_delta " << format_double(m->final_delta) << "\n";
            os << "distortion_history " << m->distortion_history.size();
            for (double d : m->distortion_history)
                os << ' ' << format_double(d);
            os << "\n";
        }
        if (const auto &e = cb.expected_error())
            os << "expected_error " << format_double(e->mean) << ' ' << format_double(e->se) << ' ' << e->samples
               << "\n";
        for (std::size_t i = 0; i < cb.size(); ++i)
        {
            os << "c " << i;
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(cb.dimension()); ++j)
            {
                const cdouble z = cb.matrix()(static_cast<Eigen::Index>(i), j);
                os << ' ' << format_double(z.real()) << ' ' << format_double(z.imag());
            }
            os << "\n";
        }
        return os.str();
    }

    inline Codebook from_text(const std::string &text)
    {
        std::istringstream is(text);
        std::string line;
        if (!std::getline(is, line) || line != "mucomp-codebook v1")
            throw std::runtime_error("not a text codebook (bad first line)");
        std::size_t dim = 0;
        unsigned bits = 0;
        CodebookKind kind = CodebookKind::random;
        std::uint64_t seed = 0;
        std::optional<TrainingMeta> meta;
        std::optional<ErrorEstimate> err;
        std::vector<CVector> cw;
        auto need_meta = [&]() -> TrainingMeta &
        {
            if (!meta)
                meta.emplace();
            return *meta;
        };
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::istringstream ls(line);
            std::string key;
            ls >> key;
            std::vector<std::string> tok;
            for (std::string t; ls >> t;)
                tok.push_back(t);
            auto one = [&]() -> const std::string &
            {
                if (tok.size() != 1)
                    throw std::runtime_error("text codebook: '" + key + "' expects one value");
                return tok[0];
            };
            if (key == "dimension")
                dim = parse_int<std::size_t>(one());
            else if (key == "bits")
                bits = parse_int<unsigned>(one());
            else if (key == "kind")
            {
                if (one() == "random")
                    kind = CodebookKind::random;
                else if (one() == "lloyd")
                    kind = CodebookKind::lloyd;
                else
                    throw std::runtime_error("text codebook: unknown kind '" + one() + "'");
            }
            else if (key == "seed")
                seed = parse_int<std::uint64_t>(one());
            else if (key == "training_size")
                need_meta().training_size = parse_int<std::size_t>(one());
            else if (key == "iterations")
                need_meta().iterations = parse_int<std::size_t>(one());
            else if (key == "converged")
                need_meta().converged = parse_int<int>(one()) != 0;
            else if (key == "final_delta")
                need_meta().final_delta = parse_double(one());
            else if (key == "distortion_history")
            {
                if (tok.empty() || parse_int<std::size_t>(tok[0]) != tok.size() - 1)
                    throw std::runtime_error("text codebook: distortion_history length mismatch");
                for (std::size_t i = 1; i < tok.size(); ++i)
                    need_meta().distortion_history.push_back(parse_double(tok[i]));
            }
            else if (key == "expected_error")
            {
                if (tok.size() != 3)
                    throw std::runtime_error("text codebook: expected_error expects mean se samples");
                err = ErrorEstimate{parse_double(tok[0]), parse_double(tok[1]), parse_int<std::size_t>(tok[2])};
            }
            else if (key == "c")
            {
                if (tok.size() != 1 + 2 * dim || parse_int<std::size_t>(tok[0]) != cw.size())
                    throw std::runtime_error("text codebook: malformed codeword line " + std::to_string(cw.size()));
                CVector c(static_cast<Eigen::Index>(dim));
                for (std::size_t j = 0; j < dim; ++j)
                    c(static_cast<Eigen::Index>(j)) = {parse_double(tok[1 + 2 * j]), parse_double(tok[2 + 2 * j])};
                cw.push_back(c);
            }
            else
                throw std::runtime_error("text codebook: unknown key '" + key + "'");
        }
        Codebook cb(dim, bits, kind, std::move(cw), seed, meta);
        if (err)
            cb.set_expected_error(*err);
        return cb;
    }

    inline bool is_text_path(const std::string &path)
    {
        return path.size() >= 4 && path.compare(path.size() - 4, 4, ".txt") == 0;
    }

    inline void save_codebook(const Codebook &cb, const std::string &path)
    {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        const std::string data = is_text_path(path) ? to_text(cb) : to_binary(cb);
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!f)
            throw std::runtime_error("write to '" + path + "' failed");
    }

    inline Codebook load_codebook(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open codebook '" + path + "'");
        std::ostringstream ss;
        ss << f.rdbuf();
        const std::string data = ss.str();
        if (data.rfind("MUCOMPCB", 0) == 0)
            return from_binary(data);
        return from_text(data);
    }
} // namespace mucomp

#endif
