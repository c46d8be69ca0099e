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

// Spherical-wave wideband channel model for a uniform linear array.
//
// Antennas are indexed n = 0..N-1 with symmetric offset delta_n = n - (N-1)/2
// from the array centre. Subcarrier m = 0..M-1 sits at
//     f_m = f_c + (2m - M) / (2M) * B,
// so f_{M/2} == f_c exactly for even M. All distances are in meters,
// frequencies in Hz and angles in radians.

#include "nfbpd/common.hpp"

#include <cmath>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

namespace nfbpd
{

template <typename Real = double>
struct SystemConfig
{
    int num_antennas = 256;
    int num_subcarriers = 256;
    Real carrier_freq = Real(100e9);
    Real bandwidth = Real(10e9);
    Real antenna_spacing = speed_of_light<Real> / Real(100e9) / Real(2);

    // Half-wavelength array at the carrier.
    static SystemConfig make(int num_antennas, int num_subcarriers, Real carrier_freq, Real bandwidth)
    {
        SystemConfig cfg;
        cfg.num_antennas = num_antennas;
        cfg.num_subcarriers = num_subcarriers;
        cfg.carrier_freq = carrier_freq;
        cfg.bandwidth = bandwidth;
        cfg.antenna_spacing = speed_of_light<Real> / carrier_freq / Real(2);
        cfg.validate();
        return cfg;
    }

    Real wavelength() const { return speed_of_light<Real> / carrier_freq; }
    Real aperture() const { return Real(num_antennas) * antenna_spacing; }

    Real subcarrier_freq(int m) const
    {
        return carrier_freq + Real(2 * m - num_subcarriers) / Real(2 * num_subcarriers) * bandwidth;
    }

    RVector<Real> subcarrier_freqs() const
    {
        RVector<Real> f(num_subcarriers);
        for (int m = 0; m < num_subcarriers; ++m)
            f(m) = subcarrier_freq(m);
        return f;
    }

    Real antenna_offset(int n) const { return Real(n) - Real(num_antennas - 1) / Real(2); }

    void validate() const
    {
        require(num_antennas >= 1, "number of antennas must be positive");
        require(num_subcarriers >= 1, "number of subcarriers must be positive");
        require(carrier_freq > 0, "carrier frequency must be positive");
        require(bandwidth >= 0, "bandwidth must be non-negative");
        require(bandwidth < Real(2) * carrier_freq, "bandwidth must be below twice the carrier frequency");
        require(std::abs(antenna_spacing - wavelength() / Real(2)) <= Real(1e-6) * wavelength(),
                "antenna spacing must be half the carrier wavelength");
    }
};

// One last-hop scatterer.
template <typename Real = double>
struct PathComponent
{
    Real angle = 0;       // radians, in (-pi/2, pi/2)
    Real distance = 1;    // meters from the array centre
    Complex<Real> gain{1, 0};
    // Optional per-subcarrier gains; when non-empty it overrides `gain` and
    // must hold one entry per subcarrier.
    std::vector<Complex<Real>> subcarrier_gains;

    Real theta() const { return std::sin(angle); }
    Real alpha() const
    {
        const Real c = std::cos(angle);
        return c * c / (Real(2) * distance);
    }
    Complex<Real> gain_at(int m) const { return subcarrier_gains.empty() ? gain : subcarrier_gains[std::size_t(m)]; }
};

template <typename Real>
using WidebandChannel = CMatrix<Real>;

template <typename Real>
using Scalar = std::type_identity_t<Real>;

// Distance from a scatterer at (angle, distance) to antenna n.
template <typename Real>
Real element_distance(const SystemConfig<Real> &cfg, Scalar<Real> angle, Scalar<Real> distance, int n)
{
    require(distance > 0, "scatterer distance must be positive");
    require(n >= 0 && n < cfg.num_antennas, "antenna index out of range");
    const Real x = cfg.antenna_offset(n) * cfg.antenna_spacing;
    return std::sqrt(distance * distance + x * x - Real(2) * distance * x * std::sin(angle));
}

namespace detail
{
// r^(n) - r evaluated without cancellation for r >> aperture.
template <typename Real>
Real path_difference(Real x, Real distance, Real sin_angle)
{
    const Real num = x * x - Real(2) * distance * x * sin_angle;
    const Real rn = std::sqrt(distance * distance + num);
    return num / (rn + distance);
}
} // namespace detail

// Exact spherical-wave array response; unit norm.
template <typename Real>
CVector<Real> array_response(const SystemConfig<Real> &cfg, Scalar<Real> angle, Scalar<Real> distance,
                             Scalar<Real> freq)
{
    require(distance > 0, "scatterer distance must be positive");
    require(freq > 0, "frequency must be positive");
    const int N = cfg.num_antennas;
    const Real scale = Real(1) / std::sqrt(Real(N));
    const Real k = two_pi<Real> * freq / speed_of_light<Real>;
    const Real s = std::sin(angle);
    CVector<Real> a(N);
    for (int n = 0; n < N; ++n)
    {
        const Real x = cfg.antenna_offset(n) * cfg.antenna_spacing;
        a(n) = scale * phasor(-k * detail::path_difference(x, distance, s));
    }
    return a;
}

// Second-order (Fresnel) response in the (theta, alpha) = (sin, cos^2/(2r)) parametrisation.
template <typename Real>
CVector<Real> approx_array_response(const SystemConfig<Real> &cfg, Scalar<Real> theta, Scalar<Real> alpha,
                                    Scalar<Real> freq)
{
    const int N = cfg.num_antennas;
    const Real scale = Real(1) / std::sqrt(Real(N));
    const Real k = two_pi<Real> * freq / speed_of_light<Real>;
    CVector<Real> a(N);
    for (int n = 0; n < N; ++n)
    {
        const Real x = cfg.antenna_offset(n) * cfg.antenna_spacing;
        a(n) = scale * phasor(k * (x * theta - x * x * alpha));
    }
    return a;
}

// Planar-wave steering vector; alpha = 0 special case of approx_array_response.
template <typename Real>
CVector<Real> far_field_response(const SystemConfig<Real> &cfg, Scalar<Real> theta, Scalar<Real> freq)
{
    return approx_array_response(cfg, theta, Real(0), freq);
}

// N x M channel matrix; column m is the channel at subcarrier m.
template <typename Real>
WidebandChannel<Real> generate_channel(const SystemConfig<Real> &cfg, std::span<const PathComponent<Real>> paths)
{
    require(!paths.empty(), "at least one path is required");
    const int N = cfg.num_antennas;
    const int M = cfg.num_subcarriers;
    const Real path_scale = std::sqrt(Real(N) / Real(paths.size()));
    const Real element_scale = Real(1) / std::sqrt(Real(N));

    WidebandChannel<Real> H = WidebandChannel<Real>::Zero(N, M);
    RVector<Real> diff(N);
    for (const auto &path : paths)
    {
        require(path.distance > 0, "scatterer distance must be positive");
        require(path.subcarrier_gains.empty() || int(path.subcarrier_gains.size()) == M,
                "per-subcarrier gains must have one entry per subcarrier");
        const Real s = std::sin(path.angle);
        for (int n = 0; n < N; ++n)
            diff(n) = detail::path_difference(cfg.antenna_offset(n) * cfg.antenna_spacing, path.distance, s);

        for (int m = 0; m < M; ++m)
        {
            const Real k = two_pi<Real> * cfg.subcarrier_freq(m) / speed_of_light<Real>;
            const Complex<Real> coeff = path_scale * path.gain_at(m) * phasor(-k * path.distance);
            for (int n = 0; n < N; ++n)
                H(n, m) += coeff * element_scale * phasor(-k * diff(n));
        }
    }
    return H;
}

template <typename Real>
WidebandChannel<Real> generate_channel(const SystemConfig<Real> &cfg, const std::vector<PathComponent<Real>> &paths)
{
    return generate_channel(cfg, std::span<const PathComponent<Real>>(paths));
}

struct PathSampling
{
    // Redraw an independent CN(0,1) gain on every subcarrier instead of one per path.
    bool per_subcarrier_gains = false;
};

// Angles ~ U(-pi/2, pi/2) (endpoints excluded), distances ~ U(r_min, r_max), gains ~ CN(0, 1).
template <typename Real, typename Rng>
std::vector<PathComponent<Real>> sample_paths(const SystemConfig<Real> &cfg, int num_paths, Scalar<Real> r_min,
                                              Scalar<Real> r_max, Rng &rng, PathSampling options = {})
{
    require(num_paths >= 1, "at least one path is required");
    require(r_min > 0, "minimum distance must be positive");
    require(r_min <= r_max, "minimum distance must not exceed maximum distance");

    const Real half_pi = std::numbers::pi_v<Real> / Real(2);
    std::uniform_real_distribution<Real> angle_dist(-half_pi, half_pi);
    std::uniform_real_distribution<Real> distance_dist(r_min, r_max);
    std::normal_distribution<Real> gauss(Real(0), std::sqrt(Real(0.5)));

    std::vector<PathComponent<Real>> paths(static_cast<std::size_t>(num_paths));
    for (auto &path : paths)
    {
        do
            path.angle = angle_dist(rng);
        while (path.angle <= -half_pi || path.angle >= half_pi);
        path.distance = r_min == r_max ? r_min : distance_dist(rng);
        const Real re = gauss(rng);
        path.gain = {re, gauss(rng)};
        if (options.per_subcarrier_gains)
        {
            path.subcarrier_gains.resize(std::size_t(cfg.num_subcarriers));
            for (auto &g : path.subcarrier_gains)
            {
                const Real gr = gauss(rng);
                g = {gr, gauss(rng)};
            }
        }
    }
    return paths;
}

} // namespace nfbpd
