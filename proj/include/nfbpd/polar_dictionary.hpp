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

// Joint angle-distance (polar-domain) sampling grid and synthesis dictionary.
//
// Angle samples: theta_k = (2k - N_a) / N_a for k = 0..N_a-1 (i.e. -1 .. 1 - 2/N_a).
// Ring samples:  alpha_q = beta^2 * lambda_c * (q + 1) / D^2 for q = 0..N_d-1.
// The sampled distance of atom (k, q) is D^2 cos^2(theta_k) / (2 beta^2 lambda_c (q + 1)),
// so cos^2 / (2 r) is the same alpha_q on every angle of a ring.
//
// Indices are zero based throughout the library. Dictionary column
// q * N_a + k holds the atom for angle k on ring q (distance-major).

#include "nfbpd/channel_model.hpp"

#include <algorithm>
#include <cmath>

namespace nfbpd
{

struct GridIndex
{
    int angle = 0;
    int ring = 0;

    friend bool operator==(const GridIndex &, const GridIndex &) = default;
};

template <typename Real = double>
struct PolarGrid
{
    int num_angles = 0;
    int num_rings = 0;
    Real beta = 0;
    Real aperture = 0;
    Real wavelength = 0;
    RVector<Real> theta; // strictly increasing, in [-1, 1)
    RVector<Real> alpha; // strictly increasing, > 0

    int num_atoms() const { return num_angles * num_rings; }
    int column_index(int angle, int ring) const { return ring * num_angles + angle; }
    GridIndex grid_index(int column) const { return {column % num_angles, column / num_angles}; }

    Real cos2(int angle) const { return Real(1) - theta(angle) * theta(angle); }
    Real angle_rad(int angle) const { return std::asin(theta(angle)); }

    Real sampled_distance(int angle, int ring) const
    {
        return aperture * aperture * cos2(angle) / (Real(2) * beta * beta * wavelength * Real(ring + 1));
    }
};

template <typename Real>
PolarGrid<Real> build_grid(const SystemConfig<Real> &cfg, int num_angles, int num_rings, Scalar<Real> beta)
{
    require(num_angles >= 2, "polar grid needs at least two angle samples");
    require(num_rings >= 1, "polar grid needs at least one distance ring");
    require(beta > 0, "grid oversampling parameter must be positive");

    PolarGrid<Real> grid;
    grid.num_angles = num_angles;
    grid.num_rings = num_rings;
    grid.beta = beta;
    grid.aperture = cfg.aperture();
    grid.wavelength = cfg.wavelength();
    grid.theta.resize(num_angles);
    for (int k = 0; k < num_angles; ++k)
        grid.theta(k) = (Real(2 * k) - Real(num_angles)) / Real(num_angles);
    grid.alpha.resize(num_rings);
    const Real step = beta * beta * grid.wavelength / (grid.aperture * grid.aperture);
    for (int q = 0; q < num_rings; ++q)
        grid.alpha(q) = step * Real(q + 1);
    return grid;
}

// Index of the sample nearest to `value` in a strictly increasing sequence.
// Ties go to the lower index; values outside the range clamp to the ends.
template <typename Real>
int nearest_sample(const RVector<Real> &samples, Scalar<Real> value)
{
    const Real *first = samples.data();
    const Real *last = first + samples.size();
    const Real *it = std::lower_bound(first, last, value);
    if (it == first)
        return 0;
    if (it == last)
        return int(samples.size()) - 1;
    const int hi = int(it - first);
    const int lo = hi - 1;
    return std::abs(samples(lo) - value) <= std::abs(samples(hi) - value) ? lo : hi;
}

template <typename Real>
GridIndex locate_on_grid(const PolarGrid<Real> &grid, Scalar<Real> theta, Scalar<Real> alpha)
{
    return {nearest_sample(grid.theta, theta), nearest_sample(grid.alpha, alpha)};
}

template <typename Real = double>
struct PolarDictionary
{
    PolarGrid<Real> grid;
    CMatrix<Real> atoms; // N x (N_a * N_d)
};

// Atom for grid point (angle, ring) at the carrier. On the endfire sample
// theta = -1 the sampled distance collapses to zero and the exact response is
// undefined; that column falls back to the second-order response.
template <typename Real>
CVector<Real> polar_atom(const SystemConfig<Real> &cfg, const PolarGrid<Real> &grid, int angle, int ring)
{
    if (grid.cos2(angle) > 0)
        return array_response(cfg, grid.angle_rad(angle), grid.sampled_distance(angle, ring), cfg.carrier_freq);
    return approx_array_response(cfg, grid.theta(angle), grid.alpha(ring), cfg.carrier_freq);
}

template <typename Real>
PolarDictionary<Real> build_dictionary(const SystemConfig<Real> &cfg, const PolarGrid<Real> &grid)
{
    PolarDictionary<Real> dict{grid, CMatrix<Real>(cfg.num_antennas, grid.num_atoms())};
    for (int q = 0; q < grid.num_rings; ++q)
        for (int k = 0; k < grid.num_angles; ++k)
            dict.atoms.col(grid.column_index(k, q)) = polar_atom(cfg, grid, k, q);
    return dict;
}

// Angle-only dictionary used by the far-field baselines: one planar steering
// vector per angle sample, at the carrier.
template <typename Real>
CMatrix<Real> far_field_dictionary(const SystemConfig<Real> &cfg, const PolarGrid<Real> &grid)
{
    CMatrix<Real> W(cfg.num_antennas, grid.num_angles);
    for (int k = 0; k < grid.num_angles; ++k)
        W.col(k) = far_field_response(cfg, grid.theta(k), cfg.carrier_freq);
    return W;
}

} // namespace nfbpd
