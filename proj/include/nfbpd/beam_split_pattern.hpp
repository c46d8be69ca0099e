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

// Near-field beam split: the large-array coherence function
//
//     Xi(gamma, zeta) = | integral_{-1/2}^{1/2} exp(j 2 pi x gamma - j 2 pi x^2 zeta) dx |
//
// and the frequency-drift tables that map a carrier-frequency grid point to
// its support index on every subcarrier. A point with parameters (theta, alpha)
// at f_c appears at (f_m / f_c) * (theta, alpha) on subcarrier m, so both the
// angle index and the ring index drift linearly with frequency.

#include "nfbpd/polar_dictionary.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace nfbpd
{

namespace quadrature
{

struct GaussLegendreRule
{
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Nodes by Newton iteration on P_n starting from the Chebyshev-like guess.
inline GaussLegendreRule gauss_legendre(int order)
{
    GaussLegendreRule rule{std::vector<double>(std::size_t(order)), std::vector<double>(std::size_t(order))};
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter)
        {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= order; ++k)
            {
                const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (order == 1)
                p0 = 1;
            dp = order * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1, p1 = x;
        for (int k = 2; k <= order; ++k)
        {
            const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = order * (x * p1 - p0) / (x * x - 1);
        const double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[std::size_t(i)] = -x;
        rule.nodes[std::size_t(order - 1 - i)] = x;
        rule.weights[std::size_t(i)] = w;
        rule.weights[std::size_t(order - 1 - i)] = w;
    }
    return rule;
}

inline const GaussLegendreRule &panel_rule()
{
    static const GaussLegendreRule rule = gauss_legendre(16);
    return rule;
}

inline const GaussLegendreRule &fallback_rule()
{
    static const GaussLegendreRule rule = gauss_legendre(257);
    return rule;
}

template <typename F>
std::complex<double> apply(const GaussLegendreRule &rule, F &&f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::complex<double> sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

template <typename F>
std::complex<double> adaptive(F &&f, double a, double b, std::complex<double> whole, double tol, int depth)
{
    const double mid = 0.5 * (a + b);
    const auto left = apply(panel_rule(), f, a, mid);
    const auto right = apply(panel_rule(), f, mid, b);
    if (std::abs(left + right - whole) <= tol)
        return left + right;
    if (depth == 0)
        return apply(fallback_rule(), f, a, b);
    return adaptive(f, a, mid, left, 0.5 * tol, depth - 1) + adaptive(f, mid, b, right, 0.5 * tol, depth - 1);
}

} // namespace quadrature

inline constexpr double xi_tolerance = 1e-8;

// Complex value of the chirp integral, no sign folding.
inline std::complex<double> xi_integral(double gamma, double zeta)
{
    const auto f = [=](double x) {
        return std::polar(1.0, two_pi<double> * (x * gamma - x * x * zeta));
    };
    const auto whole = quadrature::apply(quadrature::panel_rule(), f, -0.5, 0.5);
    return quadrature::adaptive(f, -0.5, 0.5, whole, xi_tolerance, 24);
}

// Xi is even in both arguments; signs are folded before integrating so the
// symmetry holds exactly.
inline double xi(double gamma, double zeta)
{
    return std::min(1.0, std::abs(xi_integral(std::abs(gamma), std::abs(zeta))));
}

struct CoherenceQuery
{
    double gamma = 0;
    double zeta = 0;
};

// (gamma, zeta) for the pair (theta1, alpha1, f1) vs (theta2, alpha2, f2).
template <typename Real>
CoherenceQuery coherence_query(const SystemConfig<Real> &cfg, Scalar<Real> theta1, Scalar<Real> alpha1,
                               Scalar<Real> f1, Scalar<Real> theta2, Scalar<Real> alpha2, Scalar<Real> f2)
{
    const Real lambda1 = speed_of_light<Real> / f1;
    const Real D = cfg.aperture();
    const Real ratio = f2 / f1;
    return {double(D / lambda1 * (theta1 - ratio * theta2)), double(D * D / lambda1 * (alpha1 - ratio * alpha2))};
}

// Finite-array coherence |a_bar^H(theta1, alpha1, f1) a_bar(theta2, alpha2, f2)|,
// summed element by element.
template <typename Real>
Real exact_coherence(const SystemConfig<Real> &cfg, Scalar<Real> theta1, Scalar<Real> alpha1, Scalar<Real> f1,
                     Scalar<Real> theta2, Scalar<Real> alpha2, Scalar<Real> f2)
{
    const Real lambda1 = speed_of_light<Real> / f1;
    const Real ratio = f2 / f1;
    const Real dtheta = theta1 - ratio * theta2;
    const Real dalpha = alpha1 - ratio * alpha2;
    const Real d = cfg.antenna_spacing;
    Complex<Real> sum = 0;
    for (int n = 0; n < cfg.num_antennas; ++n)
    {
        const Real x = cfg.antenna_offset(n) * d;
        sum += phasor(two_pi<Real> / lambda1 * (x * dtheta - x * x * dalpha));
    }
    return std::abs(sum) / Real(cfg.num_antennas);
}

// Drift tables. angle_map(k, m) is the angle index that grid angle k occupies
// on subcarrier m; ring_map(q, m) likewise for distance rings.
struct PatternTables
{
    IndexMatrix angle_map; // N_a x M
    IndexMatrix ring_map;  // N_d x M

    int num_angles() const { return int(angle_map.rows()); }
    int num_rings() const { return int(ring_map.rows()); }
    int num_subcarriers() const { return int(angle_map.cols()); }

    // Flat dictionary column of carrier point (angle, ring) at subcarrier m.
    int column(int angle, int ring, int m) const
    {
        return ring_map(ring, m) * num_angles() + angle_map(angle, m);
    }
};

template <typename Real>
PatternTables build_pattern_tables(const SystemConfig<Real> &cfg, const PolarGrid<Real> &grid)
{
    const int M = cfg.num_subcarriers;
    PatternTables t{IndexMatrix(grid.num_angles, M), IndexMatrix(grid.num_rings, M)};
    for (int m = 0; m < M; ++m)
    {
        const Real ratio = cfg.subcarrier_freq(m) / cfg.carrier_freq;
        for (int k = 0; k < grid.num_angles; ++k)
            t.angle_map(k, m) = nearest_sample(grid.theta, ratio * grid.theta(k));
        for (int q = 0; q < grid.num_rings; ++q)
            t.ring_map(q, m) = nearest_sample(grid.alpha, ratio * grid.alpha(q));
    }
    return t;
}

// Common-support tables (no frequency drift).
inline PatternTables identity_tables(int num_angles, int num_rings, int num_subcarriers)
{
    PatternTables t{IndexMatrix(num_angles, num_subcarriers), IndexMatrix(num_rings, num_subcarriers)};
    for (int m = 0; m < num_subcarriers; ++m)
    {
        for (int k = 0; k < num_angles; ++k)
            t.angle_map(k, m) = k;
        for (int q = 0; q < num_rings; ++q)
            t.ring_map(q, m) = q;
    }
    return t;
}

// Keeps the angle drift and collapses the distance axis to a single ring,
// for angle-only dictionaries.
inline PatternTables angle_only(const PatternTables &tables)
{
    return {tables.angle_map, IndexMatrix::Zero(1, tables.num_subcarriers())};
}

} // namespace nfbpd
