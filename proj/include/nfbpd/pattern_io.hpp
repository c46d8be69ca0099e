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

// CSV dumps of the drift tables and of the coherence function.
//
// Tables:  index,m,mapped_index   grid indices are 1-based, m is the
//                                 0-based subcarrier (f_m as in the channel model)
// Heatmap: gamma,zeta,value

#include "nfbpd/beam_split_pattern.hpp"

#include <iosfwd>
#include <vector>

namespace nfbpd::io
{

void write_table_csv(std::ostream &out, const IndexMatrix &table);
void write_xi_csv(std::ostream &out, const std::vector<double> &gammas, const std::vector<double> &zetas);

// Evenly spaced values first, first + step, ... up to and including last.
std::vector<double> linear_range(double first, double last, double step);

} // namespace nfbpd::io
