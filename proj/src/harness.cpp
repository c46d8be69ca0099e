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

#include "nfbpd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace nfbpd::harness
{

namespace
{

struct EstimatorName
{
    Estimator estimator;
    std::string_view name;
};

constexpr EstimatorName estimator_names[] = {
    {Estimator::ls, "ls"},
    {Estimator::angle_omp, "angle_omp"},
    {Estimator::angle_somp, "angle_somp"},
    {Estimator::bspd, "bspd"},
    {Estimator::polar_omp, "polar_omp"},
    {Estimator::polar_somp, "polar_somp"},
    {Estimator::bpd, "bpd"},
};

} // namespace

std::string_view to_string(Estimator e)
{
    for (const auto &entry : estimator_names)
        if (entry.estimator == e)
            return entry.name;
    return "unknown";
}

Estimator parse_estimator(std::string_view name)
{
    for (const auto &entry : estimator_names)
        if (entry.name == name)
            return entry.estimator;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::vector<Estimator> parse_estimator_list(std::string_view text)
{
    std::vector<Estimator> out;
    while (!text.empty())
    {
        const auto comma = text.find(',');
        const auto token = text.substr(0, comma);
        if (!token.empty())
        {
            const auto e = parse_estimator(token);
            if (std::find(out.begin(), out.end(), e) == out.end())
                out.push_back(e);
        }
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty())
        throw ConfigError("estimator list is empty");
    return out;
}

const std::vector<Estimator> &all_estimators()
{
    static const std::vector<Estimator> all = {Estimator::ls,        Estimator::angle_omp,  Estimator::angle_somp,
                                               Estimator::bspd,      Estimator::polar_omp,  Estimator::polar_somp,
                                               Estimator::bpd};
    return all;
}

std::string_view to_string(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::distance:
        return "distance";
    case SweepAxis::bandwidth:
        return "bandwidth";
    case SweepAxis::snr:
        return "snr";
    case SweepAxis::pilots:
        return "pilots";
    }
    return "unknown";
}

SweepAxis parse_axis(std::string_view name)
{
    for (auto axis : {SweepAxis::distance, SweepAxis::bandwidth, SweepAxis::snr, SweepAxis::pilots})
        if (to_string(axis) == name)
            return axis;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

Preset parse_preset(std::string_view name)
{
    if (name == "fig4")
        return Preset::fig4;
    if (name == "fig5")
        return Preset::fig5;
    if (name == "fig6")
        return Preset::fig6;
    if (name == "fig7")
        return Preset::fig7;
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::paper_scale()
{
    return {};
}

ExperimentConfig ExperimentConfig::desk_scale()
{
    ExperimentConfig cfg;
    cfg.num_antennas = 128;
    cfg.num_subcarriers = 64;
    cfg.num_angles = 128;
    cfg.num_rings = 8;
    cfg.pilot_slots = 16;
    cfg.trials = 50;
    return cfg;
}

SystemConfig<double> ExperimentConfig::system() const
{
    return SystemConfig<double>::make(num_antennas, num_subcarriers, carrier_freq, bandwidth);
}

void ExperimentConfig::validate() const
{
    system();
    require(num_angles >= 2, "num_angles must be at least 2");
    require(num_rings >= 1, "num_rings must be positive");
    require(beta > 0, "beta must be positive");
    require(num_paths >= 1, "num_paths must be positive");
    require(paths_to_detect >= 1, "paths_to_detect must be positive");
    require(r_min > 0 && r_min <= r_max, "distance range must satisfy 0 < r_min <= r_max");
    require(std::isfinite(snr_db), "snr_db must be finite");
    require(pilot_slots >= 1 && rf_chains >= 1, "pilot_slots and rf_chains must be positive");
    require(pilot_slots * rf_chains <= num_antennas, "pilot_slots * rf_chains must not exceed num_antennas");
    require(trials >= 1, "trials must be positive");
    require(!estimators.empty(), "at least one estimator is required");
    require(threads >= 0, "threads must be non-negative");
}

ExperimentConfig ExperimentConfig::at(SweepAxis sweep, double value) const
{
    ExperimentConfig cfg = *this;
    switch (sweep)
    {
    case SweepAxis::distance:
        cfg.r_min = cfg.r_max = value;
        break;
    case SweepAxis::bandwidth:
        cfg.bandwidth = value;
        break;
    case SweepAxis::snr:
        cfg.snr_db = value;
        break;
    case SweepAxis::pilots:
        require(value >= 1 && value == std::floor(value), "pilot sweep values must be positive integers");
        cfg.pilot_slots = int(value);
        break;
    }
    return cfg;
}

void apply_preset(ExperimentConfig &cfg, Preset preset)
{
    const bool full = cfg.num_antennas >= 256;
    cfg.snr_db = 5;
    cfg.bandwidth = 10e9;
    cfg.pilot_slots = 32;
    cfg.r_min = 10;
    cfg.r_max = 30;
    switch (preset)
    {
    case Preset::fig4:
        cfg.axis = SweepAxis::distance;
        cfg.axis_values = full ? std::vector<double>{5, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}
                               : std::vector<double>{5, 10, 20, 50, 100};
        break;
    case Preset::fig5:
        cfg.axis = SweepAxis::bandwidth;
        cfg.axis_values = full ? std::vector<double>{0.1e9, 1e9, 2e9, 4e9, 6e9, 8e9, 10e9}
                               : std::vector<double>{0.1e9, 1e9, 5e9, 10e9};
        break;
    case Preset::fig6:
        cfg.axis = SweepAxis::snr;
        cfg.axis_values = {-5, 0, 5, 7, 10, 15};
        break;
    case Preset::fig7:
        cfg.axis = SweepAxis::pilots;
        cfg.axis_values = {4, 8, 12, 16, 20, 24, 28, 32};
        break;
    }
}

TrialSetup prepare(const ExperimentConfig &cfg)
{
    cfg.validate();
    TrialSetup setup{cfg, cfg.system(), {}, {}, {}};
    const auto grid = build_grid(setup.system, cfg.num_angles, cfg.num_rings, cfg.beta);
    setup.polar = build_dictionary(setup.system, grid);
    setup.far_field = far_field_dictionary(setup.system, grid);
    setup.tables = build_pattern_tables(setup.system, grid);
    return setup;
}

const EstimatorOutcome &TrialResult::operator[](Estimator e) const
{
    for (const auto &o : outcomes)
        if (o.estimator == e)
            return o;
    throw ConfigError("estimator '" + std::string(to_string(e)) + "' was not run in this trial");
}

TrialResult run_trial(const TrialSetup &setup, std::uint64_t trial_seed)
{
    const auto &cfg = setup.config;
    const auto &sys = setup.system;
    std::mt19937_64 rng(trial_seed);

    const auto paths = sample_paths(sys, cfg.num_paths, cfg.r_min, cfg.r_max, rng,
                                    PathSampling{cfg.per_subcarrier_gains});
    const auto H = generate_channel(sys, paths);
    const auto ens = sample_combiners(sys, cfg.pilot_slots, cfg.rf_chains, rng, cfg.combiner);

    TrialResult result;
    result.channel_energy = H.squaredNorm();
    result.sigma = sigma_for_snr(ens, H, cfg.snr_db, cfg.snr_reference);
    auto obs = observe(ens, H, result.sigma, rng);

    const auto whitened = prewhiten(ens, obs, setup.polar.atoms);
    const SparseModel<double> polar{setup.polar.atoms, whitened.sensing, setup.polar.grid.num_angles};
    const bool needs_far = std::any_of(cfg.estimators.begin(), cfg.estimators.end(), [](Estimator e) {
        return e == Estimator::angle_omp || e == Estimator::angle_somp || e == Estimator::bspd;
    });
    const CMatrix<double> far_sensing =
        needs_far ? sensing_matrix(whitened.whitener, ens, setup.far_field) : CMatrix<double>();
    const SparseModel<double> far{setup.far_field, far_sensing, setup.polar.grid.num_angles};

    for (const auto e : cfg.estimators)
    {
        EstimateReport<double> report;
        switch (e)
        {
        case Estimator::ls:
            report = estimate_ls(ens, obs);
            break;
        case Estimator::angle_omp:
            report = estimate_angle_omp(far, obs, cfg.paths_to_detect);
            break;
        case Estimator::angle_somp:
            report = estimate_angle_somp(far, obs, cfg.paths_to_detect);
            break;
        case Estimator::bspd:
            report = estimate_bspd(far, obs, setup.tables, cfg.paths_to_detect);
            break;
        case Estimator::polar_omp:
            report = estimate_polar_omp(polar, obs, cfg.paths_to_detect);
            break;
        case Estimator::polar_somp:
            report = estimate_polar_somp(polar, obs, cfg.paths_to_detect);
            break;
        case Estimator::bpd:
            report = estimate_bpd(polar, obs, setup.tables, cfg.paths_to_detect);
            break;
        }
        result.outcomes.push_back(
            {e, nmse_linear(H, report.channel), cfg.record_walltime ? report.walltime_ms : 0.0,
             std::move(report.diagnostics)});
    }
    return result;
}

TrialResult run_trial(const ExperimentConfig &cfg, std::uint64_t trial_seed)
{
    return run_trial(prepare(cfg), trial_seed);
}

std::uint64_t derive_trial_seed(std::uint64_t seed, int axis_index, int trial_index)
{
    std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32), std::uint32_t(axis_index),
                      std::uint32_t(trial_index)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (std::uint64_t(words[0]) << 32) | words[1];
}

ResultRow aggregate(std::string_view axis, double value, std::string_view estimator,
                    const std::vector<PerTrialRecord> &records)
{
    ResultRow row{std::string(axis), value, std::string(estimator), 0, 0, 0, 0};
    double lin = 0, db = 0, wall = 0;
    for (const auto &r : records)
    {
        lin += r.nmse_linear;
        db += r.nmse_db;
        wall += r.walltime_ms;
        ++row.trials;
    }
    require(row.trials > 0, "cannot aggregate zero trials");
    const double n = row.trials;
    row.nmse_db_mean = to_db(lin / n);
    row.walltime_ms_mean = wall / n;
    if (row.trials > 1)
    {
        const double mean_db = db / n;
        double ss = 0;
        for (const auto &r : records)
            ss += (r.nmse_db - mean_db) * (r.nmse_db - mean_db);
        row.nmse_db_std = std::sqrt(ss / (n - 1));
    }
    return row;
}

namespace
{

double residual_growth(const std::vector<double> &norms)
{
    double worst = -1;
    const double ref = norms.empty() ? 0.0 : norms.front();
    for (std::size_t i = 1; i < norms.size(); ++i)
        worst = std::max(worst, ref > 0 ? (norms[i] - norms[i - 1]) / ref : 0.0);
    return norms.size() > 1 ? worst : 0.0;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers stop.
template <typename Fn>
void parallel_for(int n, int threads, Fn &&fn)
{
    const int workers = std::max(1, std::min(n, threads));
    if (workers == 1)
    {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

SweepResult run_sweep(const ExperimentConfig &cfg, const ProgressCallback &progress)
{
    require(!cfg.axis_values.empty(), "sweep axis values must not be empty");
    cfg.validate();
    const int threads = cfg.threads > 0 ? cfg.threads : int(std::max(1u, std::thread::hardware_concurrency()));
    const auto axis_name = std::string(to_string(cfg.axis));

    SweepResult out;
    const int points = int(cfg.axis_values.size());
    for (int point = 0; point < points; ++point)
    {
        const double value = cfg.axis_values[std::size_t(point)];
        const TrialSetup setup = prepare(cfg.at(cfg.axis, value));

        std::vector<TrialResult> trials(std::size_t(cfg.trials));
        parallel_for(cfg.trials, threads, [&](int t) {
            try
            {
                trials[std::size_t(t)] = run_trial(setup, derive_trial_seed(cfg.seed, point, t));
            }
            catch (const NumericalError &e)
            {
                throw NumericalError(axis_name + "=" + std::to_string(value) + ", trial " + std::to_string(t) +
                                     ": " + e.what());
            }
        });

        for (const auto e : cfg.estimators)
        {
            std::vector<PerTrialRecord> records;
            records.reserve(trials.size());
            for (int t = 0; t < cfg.trials; ++t)
            {
                const auto &o = trials[std::size_t(t)][e];
                records.push_back({axis_name, value, t, std::string(to_string(e)), o.nmse_linear,
                                   to_db(o.nmse_linear), o.walltime_ms, residual_growth(o.diagnostics.residual_norms),
                                   o.diagnostics.max_orthogonality, o.diagnostics.ridge_fallbacks});
            }
            out.rows.push_back(aggregate(axis_name, value, to_string(e), records));
            out.per_trial.insert(out.per_trial.end(), records.begin(), records.end());
        }
        if (progress)
            progress(point + 1, points);
    }
    return out;
}

} // namespace nfbpd::harness
