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

#pragma once

// Binary dictionary export for cross-implementation comparison.
//
// Layout (little-endian):
//   bytes 0..3   magic "PDIC"
//   bytes 4..7   u32 rows
//   bytes 8..11  u32 cols
//   bytes 12..15 reserved, zero
//   then rows * cols complex64 entries in row-major order, each as
//   (float32 real, float32 imag).

#include "nfbpd/common.hpp"

#include <filesystem>
#include <iosfwd>

namespace nfbpd::io
{

inline constexpr char pdic_magic[4] = {'P', 'D', 'I', 'C'};
inline constexpr std::size_t pdic_header_bytes = 16;

void write_pdic(std::ostream &out, const CMatrix<double> &matrix);
CMatrix<double> read_pdic(std::istream &in);

void write_pdic(const std::filesystem::path &path, const CMatrix<double> &matrix);
CMatrix<double> read_pdic(const std::filesystem::path &path);

} // namespace nfbpd::io
