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

#include "nfbpd/pattern_io.hpp"
#include "nfbpd/results_io.hpp"

#include <cmath>
#include <ostream>

namespace nfbpd::io
{

void write_table_csv(std::ostream &out, const IndexMatrix &table)
{
    out << "index,m,mapped_index\n";
    for (Eigen::Index i = 0; i < table.rows(); ++i)
        for (Eigen::Index m = 0; m < table.cols(); ++m)
            out << (i + 1) << ',' << m << ',' << (table(i, m) + 1) << '\n';
}

void write_xi_csv(std::ostream &out, const std::vector<double> &gammas, const std::vector<double> &zetas)
{
    out << "gamma,zeta,value\n";
    for (double g : gammas)
        for (double z : zetas)
            out << format_number(g) << ',' << format_number(z) << ',' << format_number(xi(g, z)) << '\n';
}

std::vector<double> linear_range(double first, double last, double step)
{
    require(step > 0, "range step must be positive");
    require(last >= first, "range end must not precede its start");
    const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
    std::vector<double> values;
    values.reserve(std::size_t(count));
    for (long i = 0; i < count; ++i)
        values.push_back(first + double(i) * step);
    return values;
}

} // namespace nfbpd::io
