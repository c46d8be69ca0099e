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

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nfbpd
{

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
inline constexpr Real speed_of_light = Real(299792458.0);

template <typename Real>
inline constexpr Real two_pi = Real(2) * std::numbers::pi_v<Real>;

// Invalid user input: bad geometry, out-of-range parameters, malformed config.
class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// A numerical kernel could not produce a trustworthy result.
class NumericalError : public std::runtime_error
{
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string &message)
{
    if (!condition)
        throw ConfigError(message);
}

// Unit-modulus phasor exp(j*phase).
template <typename Real>
inline Complex<Real> phasor(Real phase)
{
    return {std::cos(phase), std::sin(phase)};
}

} // namespace nfbpd
