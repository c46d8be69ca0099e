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

// Small fixtures and brute-force oracles shared by the unit tests. The
// oracles deliberately avoid the library's own loops so they can catch
// indexing and tie-breaking mistakes.

#include "nfbpd/estimators.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace nfbpd::testing
{

inline SystemConfig<double> desk_system(double bandwidth = 10e9, int M = 64)
{
    return SystemConfig<double>::make(128, M, 100e9, bandwidth);
}

// A noiseless or noisy trial with everything the estimators need.
struct Scenario
{
    SystemConfig<double> cfg;
    PolarDictionary<double> polar;
    CMatrix<double> far;
    PatternTables tables;
    MeasurementEnsemble<double> ens;
    WidebandChannel<double> H;
    ObservationSet<double> obs;
    CMatrix<double> psi_polar;
    CMatrix<double> psi_far;

    SparseModel<double> polar_model() const { return {polar.atoms, psi_polar, polar.grid.num_angles}; }
    SparseModel<double> far_model() const { return {far, psi_far, polar.grid.num_angles}; }
};

inline Scenario make_scenario(const SystemConfig<double> &cfg, int num_angles, int num_rings,
                              const std::vector<PathComponent<double>> &paths, int pilot_slots, int rf_chains,
                              double snr_db, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Scenario s{cfg, {}, {}, {}, {}, {}, {}, {}, {}};
    const auto grid = build_grid(cfg, num_angles, num_rings, 0.8);
    s.polar = build_dictionary(cfg, grid);
    s.far = far_field_dictionary(cfg, grid);
    s.tables = build_pattern_tables(cfg, grid);
    s.ens = sample_combiners(cfg, pilot_slots, rf_chains, rng);
    s.H = generate_channel(cfg, paths);
    const double sigma = snr_db == std::numeric_limits<double>::infinity() ? 0.0 : sigma_for_snr(s.ens, s.H, snr_db);
    s.obs = observe(s.ens, s.H, sigma, rng);
    const auto sys = prewhiten(s.ens, s.obs, s.polar.atoms);
    s.psi_polar = sys.sensing;
    s.psi_far = sensing_matrix(sys.whitener, s.ens, s.far);
    return s;
}

inline constexpr double noiseless = std::numeric_limits<double>::infinity();

// A unit-gain path sitting exactly on grid point (angle, ring).
inline PathComponent<double> on_grid_path(const PolarGrid<double> &grid, int angle, int ring)
{
    PathComponent<double> p;
    p.angle = grid.angle_rad(angle);
    p.distance = grid.sampled_distance(angle, ring);
    p.gain = {0.8, -0.6};
    return p;
}

// Selection objective for every flat grid index, evaluated entry by entry.
inline std::vector<double> brute_force_objective(const CMatrix<double> &psi, const CMatrix<double> &residue,
                                                 const PatternTables &tables)
{
    const int Na = tables.num_angles();
    const int Nd = tables.num_rings();
    std::vector<double> objective(std::size_t(Na * Nd), 0.0);
    for (int q = 0; q < Nd; ++q)
        for (int k = 0; k < Na; ++k)
            for (int m = 0; m < int(residue.cols()); ++m)
            {
                const int col = tables.ring_map(q, m) * Na + tables.angle_map(k, m);
                std::complex<double> u = 0;
                for (Eigen::Index i = 0; i < psi.rows(); ++i)
                    u += std::conj(psi(i, col)) * residue(i, m);
                objective[std::size_t(q * Na + k)] += std::norm(u);
            }
    return objective;
}

// First index of the largest entry among those not excluded.
inline int brute_force_argmax(const std::vector<double> &objective, const std::vector<int> &excluded = {})
{
    int best = -1;
    for (int i = 0; i < int(objective.size()); ++i)
    {
        if (std::find(excluded.begin(), excluded.end(), i) != excluded.end())
            continue;
        if (best < 0 || objective[std::size_t(i)] > objective[std::size_t(best)])
            best = i;
    }
    return best;
}

} // namespace nfbpd::testing
