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

// Monte Carlo NMSE experiments: one trial draws paths, builds the channel,
// samples combiners, adds noise at the target SNR, pre-whitens and runs every
// requested estimator on that identical realisation.

#include "nfbpd/estimators.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nfbpd::harness
{

enum class Estimator
{
    ls,
    angle_omp,
    angle_somp,
    bspd,
    polar_omp,
    polar_somp,
    bpd,
};

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);
std::vector<Estimator> parse_estimator_list(std::string_view comma_separated);
const std::vector<Estimator> &all_estimators();

enum class SweepAxis
{
    distance,  // meters; sets R_min = R_max
    bandwidth, // Hz
    snr,       // dB
    pilots,    // pilot slots P
};

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

enum class Preset
{
    fig4, // NMSE vs distance
    fig5, // NMSE vs bandwidth
    fig6, // NMSE vs SNR
    fig7, // NMSE vs pilot slots
};

Preset parse_preset(std::string_view name);

struct ExperimentConfig
{
    // Array and OFDM geometry.
    int num_antennas = 256;
    int num_subcarriers = 256;
    double carrier_freq = 100e9;
    double bandwidth = 10e9;

    // Polar grid.
    int num_angles = 256;
    int num_rings = 14;
    double beta = 0.8;

    // Scattering.
    int num_paths = 6;
    int paths_to_detect = 12;
    double r_min = 10;
    double r_max = 30;
    bool per_subcarrier_gains = false;

    // Observation.
    double snr_db = 5;
    int pilot_slots = 32;
    int rf_chains = 4;
    CombinerKind combiner = CombinerKind::rademacher;
    SnrReference snr_reference = SnrReference::whitened;

    // Experiment.
    int trials = 300;
    std::uint64_t seed = 42;
    std::vector<Estimator> estimators = all_estimators();
    SweepAxis axis = SweepAxis::snr;
    std::vector<double> axis_values;
    bool record_walltime = true;
    int threads = 1;

    // The full-size configuration used for the published curves.
    static ExperimentConfig paper_scale();
    // Reduced size that keeps every trend but runs in seconds per point.
    static ExperimentConfig desk_scale();

    SystemConfig<double> system() const;
    void validate() const;
    // Copy with the swept parameter set to `value`.
    ExperimentConfig at(SweepAxis axis, double value) const;
};

// Pins the non-swept parameters and the axis values for one preset sweep.
// P = 32 for every sweep except the pilot sweep; at N = 128 with four RF
// chains that is full observation.
void apply_preset(ExperimentConfig &cfg, Preset preset);

// Geometry shared by all trials of one configuration.
struct TrialSetup
{
    ExperimentConfig config;
    SystemConfig<double> system;
    PolarDictionary<double> polar;
    CMatrix<double> far_field;
    PatternTables tables;
};

TrialSetup prepare(const ExperimentConfig &cfg);

struct EstimatorOutcome
{
    Estimator estimator;
    double nmse_linear = 0;
    double walltime_ms = 0;
    GreedyDiagnostics diagnostics;
};

struct TrialResult
{
    double channel_energy = 0;
    double sigma = 0;
    std::vector<EstimatorOutcome> outcomes; // in config.estimators order

    const EstimatorOutcome &operator[](Estimator e) const;
};

TrialResult run_trial(const TrialSetup &setup, std::uint64_t trial_seed);
TrialResult run_trial(const ExperimentConfig &cfg, std::uint64_t trial_seed);

// Deterministic per-trial seed from (seed, sweep point, trial).
std::uint64_t derive_trial_seed(std::uint64_t seed, int axis_index, int trial_index);

struct ResultRow
{
    std::string sweep_axis;
    double sweep_value = 0;
    std::string estimator;
    double nmse_db_mean = 0;
    double nmse_db_std = 0;
    int trials = 0;
    double walltime_ms_mean = 0;

    friend bool operator==(const ResultRow &, const ResultRow &) = default;
};

struct PerTrialRecord
{
    std::string sweep_axis;
    double sweep_value = 0;
    int trial = 0;
    std::string estimator;
    double nmse_linear = 0;
    double nmse_db = 0;
    double walltime_ms = 0;
    // Largest relative growth of ||R||_F between greedy iterations (<= 0 when monotone).
    double residual_growth = 0;
    double orthogonality = 0;
    int ridge_fallbacks = 0;
};

struct SweepResult
{
    std::vector<ResultRow> rows;
    std::vector<PerTrialRecord> per_trial;
};

using ProgressCallback = std::function<void(int point, int num_points)>;

// Runs `cfg.trials` trials at every value of `cfg.axis_values` along `cfg.axis`.
SweepResult run_sweep(const ExperimentConfig &cfg, const ProgressCallback &progress = {});

// mean in dB of the linear average, sample std of the per-trial dB values.
ResultRow aggregate(std::string_view axis, double value, std::string_view estimator,
                    const std::vector<PerTrialRecord> &records);

} // namespace nfbpd::harness
