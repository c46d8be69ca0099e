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

// Sweep result files. CSV columns are fixed:
//   sweep_axis,sweep_value,estimator,nmse_db_mean,nmse_db_std,trials,walltime_ms_mean
// JSON is an array of objects with the same keys. Numbers are written in
// shortest round-trip form, so parsing an emitted file restores every value
// bit for bit. Output is UTF-8 with LF line endings.

#include "nfbpd/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nfbpd::io
{

enum class ResultFormat
{
    csv,
    json,
};

ResultFormat parse_format(std::string_view name);

inline constexpr std::string_view csv_header =
    "sweep_axis,sweep_value,estimator,nmse_db_mean,nmse_db_std,trials,walltime_ms_mean";

inline constexpr std::string_view per_trial_header = "sweep_axis,sweep_value,trial,estimator,nmse_linear,nmse_db,"
                                                     "walltime_ms,residual_growth,orthogonality,ridge_fallbacks";

std::string format_number(double value);

void write_csv(std::ostream &out, const std::vector<harness::ResultRow> &rows);
void write_json(std::ostream &out, const std::vector<harness::ResultRow> &rows);
void write_per_trial_csv(std::ostream &out, const std::vector<harness::PerTrialRecord> &records);

std::vector<harness::ResultRow> parse_csv(std::istream &in);
std::vector<harness::ResultRow> parse_json(std::istream &in);
std::vector<harness::PerTrialRecord> parse_per_trial_csv(std::istream &in);

// Writes `rows` to `path`; I/O failures raise std::runtime_error naming the path.
void emit_results(const std::vector<harness::ResultRow> &rows, ResultFormat format, const std::filesystem::path &path);
void emit_per_trial(const std::vector<harness::PerTrialRecord> &records, const std::filesystem::path &path);

} // namespace nfbpd::io
