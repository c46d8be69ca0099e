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

#include "nfbpd/results_io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nfbpd::io
{

ResultFormat parse_format(std::string_view name)
{
    if (name == "csv")
        return ResultFormat::csv;
    if (name == "json")
        return ResultFormat::json;
    throw ConfigError("unknown result format '" + std::string(name) + "'");
}

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace
{

double parse_number(std::string_view text)
{
    double value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error("malformed number '" + std::string(text) + "'");
    return value;
}

int parse_int(std::string_view text)
{
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error("malformed integer '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, std::size_t expected)
{
    std::vector<std::string_view> fields;
    while (true)
    {
        const auto comma = line.find(',');
        fields.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos)
            break;
        line.remove_prefix(comma + 1);
    }
    if (fields.size() != expected)
        throw std::runtime_error("expected " + std::to_string(expected) + " CSV fields, got " +
                                 std::to_string(fields.size()));
    return fields;
}

template <typename Row, typename ParseRow>
std::vector<Row> parse_table(std::istream &in, std::string_view header, ParseRow &&parse_row)
{
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw std::runtime_error("unexpected CSV header");
    std::vector<Row> rows;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        rows.push_back(parse_row(line));
    }
    return rows;
}

void check_stream(const std::ostream &out, const std::filesystem::path &path)
{
    if (!out)
        throw std::runtime_error("failed to write results to '" + path.string() + "'");
}

} // namespace

void write_csv(std::ostream &out, const std::vector<harness::ResultRow> &rows)
{
    out << csv_header << '\n';
    for (const auto &r : rows)
        out << r.sweep_axis << ',' << format_number(r.sweep_value) << ',' << r.estimator << ','
            << format_number(r.nmse_db_mean) << ',' << format_number(r.nmse_db_std) << ',' << r.trials << ','
            << format_number(r.walltime_ms_mean) << '\n';
}

void write_json(std::ostream &out, const std::vector<harness::ResultRow> &rows)
{
    auto doc = nlohmann::ordered_json::array();
    for (const auto &r : rows)
        doc.push_back({{"sweep_axis", r.sweep_axis},
                       {"sweep_value", r.sweep_value},
                       {"estimator", r.estimator},
                       {"nmse_db_mean", r.nmse_db_mean},
                       {"nmse_db_std", r.nmse_db_std},
                       {"trials", r.trials},
                       {"walltime_ms_mean", r.walltime_ms_mean}});
    out << doc.dump(2) << '\n';
}

void write_per_trial_csv(std::ostream &out, const std::vector<harness::PerTrialRecord> &records)
{
    out << per_trial_header << '\n';
    for (const auto &r : records)
        out << r.sweep_axis << ',' << format_number(r.sweep_value) << ',' << r.trial << ',' << r.estimator << ','
            << format_number(r.nmse_linear) << ',' << format_number(r.nmse_db) << ','
            << format_number(r.walltime_ms) << ',' << format_number(r.residual_growth) << ','
            << format_number(r.orthogonality) << ',' << r.ridge_fallbacks << '\n';
}

std::vector<harness::ResultRow> parse_csv(std::istream &in)
{
    return parse_table<harness::ResultRow>(in, csv_header, [](std::string_view line) {
        const auto f = split(line, 7);
        return harness::ResultRow{std::string(f[0]), parse_number(f[1]), std::string(f[2]), parse_number(f[3]),
                                  parse_number(f[4]),  parse_int(f[5]),    parse_number(f[6])};
    });
}

std::vector<harness::PerTrialRecord> parse_per_trial_csv(std::istream &in)
{
    return parse_table<harness::PerTrialRecord>(in, per_trial_header, [](std::string_view line) {
        const auto f = split(line, 10);
        return harness::PerTrialRecord{std::string(f[0]), parse_number(f[1]), parse_int(f[2]),
                                       std::string(f[3]), parse_number(f[4]), parse_number(f[5]),
                                       parse_number(f[6]), parse_number(f[7]), parse_number(f[8]),
                                       parse_int(f[9])};
    });
}

std::vector<harness::ResultRow> parse_json(std::istream &in)
{
    const auto doc = nlohmann::json::parse(in);
    std::vector<harness::ResultRow> rows;
    for (const auto &item : doc)
        rows.push_back({item.at("sweep_axis").get<std::string>(), item.at("sweep_value").get<double>(),
                        item.at("estimator").get<std::string>(), item.at("nmse_db_mean").get<double>(),
                        item.at("nmse_db_std").get<double>(), item.at("trials").get<int>(),
                        item.at("walltime_ms_mean").get<double>()});
    return rows;
}

void emit_results(const std::vector<harness::ResultRow> &rows, ResultFormat format, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    if (format == ResultFormat::csv)
        write_csv(out, rows);
    else
        write_json(out, rows);
    out.flush();
    check_stream(out, path);
}

void emit_per_trial(const std::vector<harness::PerTrialRecord> &records, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_per_trial_csv(out, records);
    out.flush();
    check_stream(out, path);
}

} // namespace nfbpd::io
