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

#include "nfbpd/channel_model.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace nfbpd;
using Catch::Approx;

namespace
{

// Planar steering vector written out independently of the library.
CVector<double> planar_oracle(int N, double spacing, double wavelength, double angle)
{
    CVector<double> a(N);
    for (int n = 0; n < N; ++n)
    {
        const double delta = n - (N - 1) / 2.0;
        a(n) = std::polar(1.0 / std::sqrt(double(N)), 2 * std::numbers::pi * delta * spacing * std::sin(angle) / wavelength);
    }
    return a;
}

} // namespace

TEST_CASE("subcarrier grid is centred on the carrier", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(16, 8, 100e9, 10e9);
    CHECK(cfg.subcarrier_freq(4) == cfg.carrier_freq);
    CHECK(cfg.subcarrier_freq(0) == Approx(95e9));
    CHECK(cfg.subcarrier_freq(7) == Approx(100e9 + 3.0 / 8.0 * 10e9));
    const auto f = cfg.subcarrier_freqs();
    for (int m = 1; m < 8; ++m)
        CHECK(f(m) > f(m - 1));
    CHECK(cfg.antenna_spacing == Approx(cfg.wavelength() / 2));
    CHECK(cfg.aperture() == Approx(16 * cfg.antenna_spacing));
}

TEST_CASE("system configuration rejects impossible geometry", "[channel][errors]")
{
    CHECK_THROWS_AS(SystemConfig<double>::make(0, 8, 100e9, 1e9), ConfigError);
    CHECK_THROWS_AS(SystemConfig<double>::make(8, 0, 100e9, 1e9), ConfigError);
    CHECK_THROWS_AS(SystemConfig<double>::make(8, 8, -1, 1e9), ConfigError);
    CHECK_THROWS_AS(SystemConfig<double>::make(8, 8, 100e9, 200e9), ConfigError);
    auto cfg = SystemConfig<double>::make(8, 8, 100e9, 1e9);
    cfg.antenna_spacing *= 1.01;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("element distance", "[channel]")
{
    auto odd = SystemConfig<double>::make(17, 1, 100e9, 0);
    CHECK(element_distance(odd, 0.4, 12.5, 8) == 12.5);

    // One antenna 0.192 m from the centre.
    SystemConfig<double> wide;
    wide.num_antennas = 3;
    wide.antenna_spacing = 0.192;
    CHECK(element_distance(wide, 0.0, 10.0, 2) == Approx(std::sqrt(100.036864)).epsilon(1e-14));
    CHECK(element_distance(wide, 0.0, 10.0, 2) == Approx(10.00184).margin(5e-6));

    const double r = 1e6, angle = 0.7;
    const double x = wide.antenna_offset(0) * wide.antenna_spacing;
    CHECK(std::abs(element_distance(wide, angle, r, 0) - (r - x * std::sin(angle))) < 1e-6);

    CHECK_THROWS_AS(element_distance(wide, 0.0, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(element_distance(wide, 0.0, 5.0, 3), ConfigError);
}

TEST_CASE("array response is unit norm and single-element trivial", "[channel]")
{
    const auto one = SystemConfig<double>::make(1, 1, 100e9, 0);
    const auto a1 = array_response(one, 0.3, 4.0, 100e9);
    REQUIRE(a1.size() == 1);
    CHECK(std::abs(a1(0) - std::complex<double>(1, 0)) < 1e-15);

    const auto cfg = SystemConfig<double>::make(256, 1, 100e9, 0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-1.5, 1.5), dist(0.5, 200), freq(90e9, 110e9);
    for (int i = 0; i < 50; ++i)
        CHECK(std::abs(array_response(cfg, angle(rng), dist(rng), freq(rng)).norm() - 1) < 1e-12);

    CHECK_THROWS_AS(array_response(cfg, 0.1, 0.0, 100e9), ConfigError);
    CHECK_THROWS_AS(array_response(cfg, 0.1, 1.0, 0.0), ConfigError);
}

TEST_CASE("array response converges to the planar steering vector", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(128, 1, 100e9, 0);
    for (double angle : {-1.2, -0.3, 0.0, 0.3, 1.0})
    {
        const auto exact = array_response(cfg, angle, 1e6, cfg.carrier_freq);
        const auto oracle = planar_oracle(128, cfg.antenna_spacing, cfg.wavelength(), angle);
        CHECK((exact - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("second-order response", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(256, 1, 100e9, 0);
    const auto flat = approx_array_response(cfg, 0.0, 0.0, cfg.carrier_freq);
    CHECK((flat - CVector<double>::Constant(256, 1.0 / 16.0)).cwiseAbs().maxCoeff() < 1e-15);

    const double theta = 0.37;
    CHECK(approx_array_response(cfg, theta, 0.0, 104e9) == far_field_response(cfg, theta, 104e9));
    const auto planar = planar_oracle(256, cfg.antenna_spacing, cfg.wavelength(), std::asin(theta));
    CHECK((far_field_response(cfg, theta, cfg.carrier_freq) - planar).cwiseAbs().maxCoeff() < 1e-12);

    PathComponent<double> p{std::numbers::pi / 6, 20.0, {1, 0}, {}};
    const auto exact = array_response(cfg, p.angle, p.distance, cfg.carrier_freq);
    const auto approx = approx_array_response(cfg, p.theta(), p.alpha(), cfg.carrier_freq);
    CHECK(std::abs(exact.dot(approx)) >= 0.95);
}

TEST_CASE("second-order response is accurate beyond 5 m", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(256, 1, 100e9, 0);
    for (double r : {5.0, 8.0, 20.0, 100.0})
        for (double angle = -1.5; angle <= 1.5; angle += 0.1)
        {
            PathComponent<double> p{angle, r, {1, 0}, {}};
            const auto exact = array_response(cfg, angle, r, cfg.carrier_freq);
            const auto approx = approx_array_response(cfg, p.theta(), p.alpha(), cfg.carrier_freq);
            CHECK(std::abs(exact.dot(approx)) >= 0.95);
        }
}

TEST_CASE("channel synthesis", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(64, 16, 100e9, 10e9);

    SECTION("single unit path has column norm sqrt(N)")
    {
        const std::vector<PathComponent<double>> one{{0.4, 12.0, {1, 0}, {}}};
        const auto H = generate_channel(cfg, one);
        REQUIRE(H.rows() == 64);
        REQUIRE(H.cols() == 16);
        for (int m = 0; m < 16; ++m)
            CHECK(H.col(m).norm() == Approx(8.0).epsilon(1e-12));
    }

    SECTION("opposite gains cancel")
    {
        const std::vector<PathComponent<double>> pair{{0.4, 12.0, {0.3, 0.2}, {}}, {0.4, 12.0, {-0.3, -0.2}, {}}};
        CHECK(generate_channel(cfg, pair).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("linear in the gains")
    {
        std::vector<PathComponent<double>> paths{{0.4, 12.0, {0.3, 0.2}, {}}, {-0.9, 25.0, {-1.1, 0.5}, {}}};
        const auto H = generate_channel(cfg, paths);
        const std::complex<double> c(1.5, -2.0);
        for (auto &p : paths)
            p.gain *= c;
        CHECK((generate_channel(cfg, paths) - c * H).norm() <= 1e-12 * H.norm() * std::abs(c));
    }

    SECTION("per-subcarrier gains override the path gain")
    {
        std::vector<PathComponent<double>> paths{{0.4, 12.0, {0.3, 0.2}, {}}};
        const auto H = generate_channel(cfg, paths);
        paths[0].subcarrier_gains.assign(16, {0.3, 0.2});
        paths[0].gain = {9, 9};
        CHECK(generate_channel(cfg, paths) == H);
        paths[0].subcarrier_gains.resize(3);
        CHECK_THROWS_AS(generate_channel(cfg, paths), ConfigError);
    }

    SECTION("empty path list is rejected")
    {
        CHECK_THROWS_AS(generate_channel(cfg, std::vector<PathComponent<double>>{}), ConfigError);
    }
}

TEST_CASE("average subcarrier energy is N for CN(0,1) gains", "[channel][montecarlo]")
{
    const auto cfg = SystemConfig<double>::make(64, 4, 100e9, 10e9);
    std::mt19937_64 rng(2024);
    double energy = 0;
    const int draws = 500;
    for (int i = 0; i < draws; ++i)
    {
        const auto H = generate_channel(cfg, sample_paths(cfg, 6, 10.0, 30.0, rng));
        energy += H.col(1).squaredNorm();
    }
    CHECK(energy / draws == Approx(64.0).epsilon(0.10));
}

TEST_CASE("path sampling", "[channel]")
{
    const auto cfg = SystemConfig<double>::make(32, 8, 100e9, 10e9);

    SECTION("degenerate distance range")
    {
        std::mt19937_64 rng(1);
        for (const auto &p : sample_paths(cfg, 20, 10.0, 10.0, rng))
            CHECK(p.distance == 10.0);
    }

    SECTION("reproducible for a fixed seed")
    {
        std::mt19937_64 a(99), b(99);
        const auto pa = sample_paths(cfg, 6, 10.0, 30.0, a);
        const auto pb = sample_paths(cfg, 6, 10.0, 30.0, b);
        for (std::size_t i = 0; i < pa.size(); ++i)
        {
            CHECK(pa[i].angle == pb[i].angle);
            CHECK(pa[i].distance == pb[i].distance);
            CHECK(pa[i].gain == pb[i].gain);
        }
    }

    SECTION("angles stay inside the open interval and are centred")
    {
        std::mt19937_64 rng(5);
        const auto paths = sample_paths(cfg, 10000, 10.0, 30.0, rng);
        double mean_sin = 0;
        for (const auto &p : paths)
        {
            REQUIRE(std::abs(p.angle) < std::numbers::pi / 2);
            REQUIRE(p.distance >= 10.0);
            REQUIRE(p.distance <= 30.0);
            CHECK(std::abs(p.theta()) < 1);
            CHECK(p.alpha() > 0);
            mean_sin += p.theta();
        }
        CHECK(std::abs(mean_sin / 10000) < 0.03);
    }

    SECTION("per-subcarrier gains have one entry per subcarrier")
    {
        std::mt19937_64 rng(3);
        for (const auto &p : sample_paths(cfg, 4, 10.0, 30.0, rng, PathSampling{true}))
            CHECK(p.subcarrier_gains.size() == 8);
    }

    SECTION("invalid ranges are rejected")
    {
        std::mt19937_64 rng(3);
        CHECK_THROWS_AS(sample_paths(cfg, 4, 0.0, 30.0, rng), ConfigError);
        CHECK_THROWS_AS(sample_paths(cfg, 4, 40.0, 30.0, rng), ConfigError);
        CHECK_THROWS_AS(sample_paths(cfg, 0, 10.0, 30.0, rng), ConfigError);
    }
}

TEST_CASE("single precision instantiation", "[channel][float]")
{
    const auto cfg = SystemConfig<float>::make(64, 4, 100e9f, 10e9f);
    const auto a = array_response(cfg, 0.3f, 15.0f, cfg.carrier_freq);
    CHECK(std::abs(a.norm() - 1.0f) < 1e-5f);
    const std::vector<PathComponent<float>> paths{{0.3f, 15.0f, {1, 0}, {}}};
    const auto H = generate_channel(cfg, paths);
    CHECK(H.col(0).norm() == Approx(8.0).epsilon(1e-5));
}
