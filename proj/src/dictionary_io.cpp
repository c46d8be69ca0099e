// SPDX-License-Identifier: Apache-2.0
//
// nfbpd: near-field wideband channel estimation for extremely large arrays
// Copyright (C) 2026 The nfbpd authors
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

#include "nfbpd/dictionary_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace nfbpd::io
{

namespace
{

void put_u32(unsigned char *dst, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        dst[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
}

std::uint32_t get_u32(const unsigned char *src)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(src[i]) << (8 * i);
    return v;
}

void put_f32(unsigned char *dst, float f)
{
    put_u32(dst, std::bit_cast<std::uint32_t>(f));
}

float get_f32(const unsigned char *src)
{
    return std::bit_cast<float>(get_u32(src));
}

} // namespace

void write_pdic(std::ostream &out, const CMatrix<double> &matrix)
{
    constexpr auto limit = std::numeric_limits<std::uint32_t>::max();
    if (std::uint64_t(matrix.rows()) > limit || std::uint64_t(matrix.cols()) > limit)
        throw std::runtime_error("matrix too large for the PDIC format");

    std::array<unsigned char, pdic_header_bytes> header{};
    std::memcpy(header.data(), pdic_magic, 4);
    put_u32(header.data() + 4, std::uint32_t(matrix.rows()));
    put_u32(header.data() + 8, std::uint32_t(matrix.cols()));
    out.write(reinterpret_cast<const char *>(header.data()), std::streamsize(header.size()));

    std::vector<unsigned char> row(std::size_t(matrix.cols()) * 8);
    for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
        {
            put_f32(row.data() + 8 * j, float(matrix(i, j).real()));
            put_f32(row.data() + 8 * j + 4, float(matrix(i, j).imag()));
        }
        out.write(reinterpret_cast<const char *>(row.data()), std::streamsize(row.size()));
    }
    if (!out)
        throw std::runtime_error("failed to write PDIC data");
}

CMatrix<double> read_pdic(std::istream &in)
{
    std::array<unsigned char, pdic_header_bytes> header{};
    if (!in.read(reinterpret_cast<char *>(header.data()), std::streamsize(header.size())))
        throw std::runtime_error("truncated PDIC header");
    if (std::memcmp(header.data(), pdic_magic, 4) != 0)
        throw std::runtime_error("not a PDIC file (bad magic)");
    const auto rows = get_u32(header.data() + 4);
    const auto cols = get_u32(header.data() + 8);

    CMatrix<double> matrix(rows, cols);
    std::vector<unsigned char> row(std::size_t(cols) * 8);
    for (std::uint32_t i = 0; i < rows; ++i)
    {
        if (!in.read(reinterpret_cast<char *>(row.data()), std::streamsize(row.size())))
            throw std::runtime_error("truncated PDIC payload");
        for (std::uint32_t j = 0; j < cols; ++j)
            matrix(i, j) = {get_f32(row.data() + 8 * j), get_f32(row.data() + 8 * j + 4)};
    }
    return matrix;
}

void write_pdic(const std::filesystem::path &path, const CMatrix<double> &matrix)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_pdic(out, matrix);
}

CMatrix<double> read_pdic(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return read_pdic(in);
}

} // namespace nfbpd::io
