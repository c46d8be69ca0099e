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

#include "nfbpd/beam_split_pattern.hpp"
#include "nfbpd/pattern_io.hpp"

#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

using namespace nfbpd;
using Catch::Approx;

namespace
{

// exact_coherence configured so that its (gamma, zeta) equal the arguments.
double finite_sum_xi(const SystemConfig<double> &cfg, double gamma, double zeta)
{
    const double lambda = cfg.wavelength();
    const double D = cfg.aperture();
    return exact_coherence(cfg, gamma * lambda / D, zeta * lambda / (D * D), cfg.carrier_freq, 0.0, 0.0,
                           cfg.carrier_freq);
}

int scan_nearest(const RVector<double> &samples, double value)
{
    int best = 0;
    for (int i = 1; i < samples.size(); ++i)
        if (std::abs(samples(i) - value) < std::abs(samples(best) - value))
            best = i;
    return best;
}

} // namespace

TEST_CASE("Gauss-Legendre rules", "[pattern][quadrature]")
{
    for (int order : {1, 2, 5, 16, 257})
    {
        const auto rule = quadrature::gauss_legendre(order);
        double wsum = 0;
        for (double w : rule.weights)
            wsum += w;
        CHECK(wsum == Approx(2.0).epsilon(1e-13));
        for (std::size_t i = 1; i < rule.nodes.size(); ++i)
            CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    }
    // Exact for polynomials up to degree 2n - 1.
    const auto &rule = quadrature::panel_rule();
    const auto x30 = quadrature::apply(rule, [](double x) { return std::complex<double>(std::pow(x, 30), 0); }, -1, 1);
    CHECK(x30.real() == Approx(2.0 / 31).epsilon(1e-12));
    const auto cubic = quadrature::apply(rule, [](double x) { return std::complex<double>(x * x * x + x * x, 0); }, 0, 2);
    CHECK(cubic.real() == Approx(4.0 + 8.0 / 3).epsilon(1e-13));
}

TEST_CASE("coherence function special values", "[pattern][xi]")
{
    CHECK(std::abs(xi(0, 0) - 1) <= 1e-8);
    CHECK(xi(1, 0) <= 1e-6);
    CHECK(xi(2, 0) <= 1e-6);
    for (double g : {0.1, 0.25, 0.5, 0.8, 1.5, 3.3})
        CHECK(xi(g, 0) == Approx(std::abs(std::sin(std::numbers::pi * g) / (std::numbers::pi * g))).margin(1e-9));
    for (double g : {0.0, 0.4, 2.0})
        for (double z : {0.0, 1.0, 7.5, 60.0})
        {
            const double v = xi(g, z);
            CHECK(v >= 0);
            CHECK(v <= 1);
        }
}

TEST_CASE("coherence function is even in both arguments", "[pattern][xi]")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 50; ++i)
    {
        const double g = u(rng), z = u(rng);
        const double v = xi(g, z);
        CHECK(xi(-g, z) == v);
        CHECK(xi(g, -z) == v);
        CHECK(xi(-g, -z) == v);
        // Unfolded integration agrees to quadrature tolerance.
        CHECK(std::abs(std::abs(xi_integral(g, z)) - v) <= 1e-8);
        CHECK(std::abs(std::abs(xi_integral(-g, -z)) - v) <= 1e-8);
    }
}

TEST_CASE("coherence function matches a very large finite array", "[pattern][xi]")
{
    const auto cfg = SystemConfig<double>::make(4096, 1, 100e9, 0);
    CHECK(xi(0.5, 2.0) == Approx(finite_sum_xi(cfg, 0.5, 2.0)).margin(1e-3));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
        {
            const double g = 0.08 * i, z = 0.3 * j;
            CHECK(xi(g, z) == Approx(finite_sum_xi(cfg, g, z)).margin(1e-3));
        }
}

TEST_CASE("coherence function matches a 256-element array in the main lobe", "[pattern][xi]")
{
    const auto cfg = SystemConfig<double>::make(256, 1, 100e9, 0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
        {
            const double g = 0.08 * i, z = 0.3 * j;
            CHECK(xi(g, z) == Approx(finite_sum_xi(cfg, g, z)).margin(1e-2));
        }
}

TEST_CASE("coherence function decreases across the main lobe", "[pattern][xi]")
{
    double previous = 2;
    for (int i = 0; i <= 16; ++i)
    {
        const double v = xi(0.05 * i, 0);
        CHECK(v <= previous);
        previous = v;
    }
    // The zeta cut reaches its first minimum near 3.65 and rises after it.
    previous = 2;
    for (int i = 0; i <= 72; ++i)
    {
        const double v = xi(0, 0.05 * i);
        CHECK(v <= previous);
        previous = v;
    }
    CHECK(xi(0, 4.0) > xi(0, 3.65));
}

TEST_CASE("finite-array coherence", "[pattern]")
{
    const auto cfg = SystemConfig<double>::make(64, 1, 100e9, 0);
    CHECK(exact_coherence(cfg, 0.3, 0.01, 101e9, 0.3, 0.01, 101e9) == Approx(1.0).epsilon(1e-14));
    const auto q = coherence_query(cfg, 0.3, 0.02, 100e9, 0.2, 0.01, 105e9);
    const double lambda = speed_of_light<double> / 100e9;
    CHECK(q.gamma == Approx(cfg.aperture() / lambda * (0.3 - 1.05 * 0.2)).epsilon(1e-12));
    CHECK(q.zeta == Approx(cfg.aperture() * cfg.aperture() / lambda * (0.02 - 1.05 * 0.01)).epsilon(1e-12));
    // Swapping the sign of the offsets leaves the finite sum unchanged.
    CHECK(exact_coherence(cfg, 0.1, 0.0, 100e9, 0.0, 0.0, 100e9) ==
          Approx(exact_coherence(cfg, -0.1, 0.0, 100e9, 0.0, 0.0, 100e9)).epsilon(1e-12));
}

TEST_CASE("drift tables follow the nearest scaled sample", "[pattern][tables]")
{
    const auto cfg = SystemConfig<double>::make(64, 32, 100e9, 10e9);
    const auto grid = build_grid(cfg, 64, 6, 0.8);
    const auto t = build_pattern_tables(cfg, grid);
    REQUIRE(t.num_angles() == 64);
    REQUIRE(t.num_rings() == 6);
    REQUIRE(t.num_subcarriers() == 32);

    for (int m = 0; m < 32; ++m)
    {
        const double ratio = cfg.subcarrier_freq(m) / cfg.carrier_freq;
        for (int k = 0; k < 64; ++k)
            CHECK(t.angle_map(k, m) == scan_nearest(grid.theta, ratio * grid.theta(k)));
        for (int q = 0; q < 6; ++q)
            CHECK(t.ring_map(q, m) == scan_nearest(grid.alpha, ratio * grid.alpha(q)));
    }

    for (int k = 0; k < 64; ++k)
        CHECK(t.angle_map(k, 16) == k);
    for (int q = 0; q < 6; ++q)
        CHECK(t.ring_map(q, 16) == q);
    for (int m = 0; m < 32; ++m)
        CHECK(t.angle_map(32, m) == 32);

    CHECK(t.column(5, 2, 16) == 2 * 64 + 5);
}

TEST_CASE("drift tables are monotone in frequency", "[pattern][tables]")
{
    const auto cfg = SystemConfig<double>::make(128, 64, 100e9, 10e9);
    const auto grid = build_grid(cfg, 128, 8, 0.8);
    const auto t = build_pattern_tables(cfg, grid);
    for (int m = 1; m < 64; ++m)
    {
        for (int k = 0; k < 128; ++k)
        {
            if (grid.theta(k) > 0)
                CHECK(t.angle_map(k, m) >= t.angle_map(k, m - 1));
            else if (grid.theta(k) < 0)
                CHECK(t.angle_map(k, m) <= t.angle_map(k, m - 1));
        }
        for (int q = 0; q < 8; ++q)
            CHECK(t.ring_map(q, m) >= t.ring_map(q, m - 1));
    }
    // Scaled targets beyond the grid clamp to its ends.
    CHECK(t.angle_map(127, 63) == 127);
    CHECK(t.angle_map(0, 63) == 0);
    CHECK(t.ring_map(7, 63) == 7);
}

TEST_CASE("drift at the top subcarrier of the full-size grid", "[pattern][tables]")
{
    const auto cfg = SystemConfig<double>::make(256, 256, 100e9, 10e9);
    const auto grid = build_grid(cfg, 256, 14, 0.8);
    const auto t = build_pattern_tables(cfg, grid);
    const int k = 192; // theta = 0.5
    REQUIRE(grid.theta(k) == 0.5);
    const int drift = t.angle_map(k, 255) - k;
    CHECK(drift >= 3);
    CHECK(drift <= 5);
}

TEST_CASE("narrowband tables are the identity", "[pattern][tables]")
{
    const auto cfg = SystemConfig<double>::make(128, 64, 100e9, 100e9 / 1e4);
    const auto grid = build_grid(cfg, 128, 8, 0.8);
    const auto t = build_pattern_tables(cfg, grid);
    const auto id = identity_tables(128, 8, 64);
    CHECK(t.angle_map == id.angle_map);
    CHECK(t.ring_map == id.ring_map);

    const auto a = angle_only(t);
    CHECK(a.angle_map == t.angle_map);
    CHECK(a.num_rings() == 1);
    CHECK(a.ring_map.cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("table and heatmap dumps", "[pattern][io]")
{
    IndexMatrix table(2, 3);
    table << 0, 1, 1, 4, 4, 5;
    std::ostringstream out;
    io::write_table_csv(out, table);
    CHECK(out.str() == "index,m,mapped_index\n1,0,1\n1,1,2\n1,2,2\n2,0,5\n2,1,5\n2,2,6\n");

    std::ostringstream heat;
    io::write_xi_csv(heat, {0.0, 1.0}, {0.0});
    CHECK(heat.str().rfind("gamma,zeta,value\n0,0,1\n1,0,", 0) == 0);

    const auto r = io::linear_range(0, 1, 0.25);
    REQUIRE(r.size() == 5);
    CHECK(r.back() == 1.0);
    CHECK(io::linear_range(0, 4, 0.1).size() == 41);
    CHECK_THROWS_AS(io::linear_range(0, 1, 0), ConfigError);
    CHECK_THROWS_AS(io::linear_range(1, 0, 0.1), ConfigError);
}
