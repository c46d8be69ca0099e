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

// Wideband channel estimators.
//
// Every greedy estimator here runs the same pattern-pursuit loop on the
// whitened system Ybar = Psi Hbar + Nbar:
//
//   R <- Ybar
//   repeat L_hat times:
//     U = Psi^H R
//     pick the carrier grid point (k, q) maximising sum_m |U(col(k, q, m), m)|^2,
//         col(k, q, m) = ring_map(q, m) * N_a + angle_map(k, m)
//     add (k, q) to the carrier support
//     per subcarrier: map the carrier support through the tables, solve the
//         restricted least squares, and refresh the residue column
//   H_hat(:, m) = W(:, support_m) * coeffs_m
//
// Bilinear pattern detection (BPD) uses the frequency-drift tables of the
// polar grid. Polar SOMP is the same loop with identity tables; BSPD and
// angle SOMP run it on the far-field dictionary with and without the angle
// drift. The OMP variants run the loop on each subcarrier on its own.

#include "nfbpd/beam_split_pattern.hpp"
#include "nfbpd/measurement.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace nfbpd
{

// Complex multiplication counts per algorithm stage.
struct OperationCounts
{
    std::uint64_t correlation = 0;   // U = Psi^H R
    std::uint64_t pattern = 0;       // support-power accumulation terms
    std::uint64_t least_squares = 0; // restricted solves, ~ s^2 K + s^3 per subcarrier
    std::uint64_t residual = 0;      // Psi(:, S) * coeffs

    std::uint64_t total() const { return correlation + pattern + least_squares + residual; }

    OperationCounts &operator+=(const OperationCounts &o)
    {
        correlation += o.correlation;
        pattern += o.pattern;
        least_squares += o.least_squares;
        residual += o.residual;
        return *this;
    }
};

struct GreedyDiagnostics
{
    // ||R||_F before the first iteration and after each one.
    std::vector<double> residual_norms;
    // Largest ||Psi_S^H r_m|| / (||Psi_S||_F ||ybar_m||) seen after a QR solve.
    double max_orthogonality = 0;
    int ridge_fallbacks = 0;
    OperationCounts ops;
};

struct SupportSet
{
    std::vector<GridIndex> carrier;              // one entry per greedy iteration
    std::vector<std::vector<int>> per_subcarrier; // flat dictionary columns, deduplicated
};

template <typename Real = double>
struct EstimateReport
{
    std::string label;
    CMatrix<Real> channel; // N x M
    SupportSet support;
    GreedyDiagnostics diagnostics;
    double walltime_ms = 0;
};

// Dictionary W and its whitened image Psi = D^-1 A W. Columns are laid out
// ring-major: column q * num_angles + k.
template <typename Real>
struct SparseModel
{
    const CMatrix<Real> &dictionary;
    const CMatrix<Real> &sensing;
    int num_angles;

    int num_rings() const { return int(dictionary.cols()) / num_angles; }
};

inline constexpr double max_condition_estimate = 1e10;
inline constexpr double ridge_scale = 1e-6;

template <typename Real>
struct RestrictedSolution
{
    CVector<Real> coeffs;
    bool ridge = false;
};

// argmin_x ||y - Psi_S x|| by column-pivoted QR. When the restricted matrix is
// numerically rank deficient the normal equations are regularised with
// 1e-6 * (largest column norm)^2 instead.
template <typename Real>
RestrictedSolution<Real> restricted_least_squares(const CMatrix<Real> &psi_s, const CVector<Real> &y)
{
    Eigen::ColPivHouseholderQR<CMatrix<Real>> qr(psi_s);
    const Eigen::Index s = psi_s.cols();
    const Eigen::Index diag_len = std::min(psi_s.rows(), s);
    bool well_posed = diag_len == s;
    if (well_posed)
    {
        const auto diag = qr.matrixQR().diagonal().cwiseAbs();
        const Real largest = diag(0);
        const Real smallest = diag(diag_len - 1);
        well_posed = smallest > 0 && largest / smallest <= Real(max_condition_estimate);
    }
    if (well_posed)
        return {qr.solve(y), false};

    const Real lambda = Real(ridge_scale) * psi_s.colwise().squaredNorm().maxCoeff();
    CMatrix<Real> gram = psi_s.adjoint() * psi_s;
    gram.diagonal().array() += lambda;
    Eigen::LDLT<CMatrix<Real>> ldlt(gram);
    CVector<Real> x = ldlt.solve(psi_s.adjoint() * y);
    if (ldlt.info() != Eigen::Success || !x.allFinite() || !(lambda > 0))
        throw NumericalError("restricted least squares failed: rank-deficient support and ridge fallback failed");
    return {std::move(x), true};
}

template <typename Real = double>
struct PursuitResult
{
    SupportSet support;
    std::vector<CVector<Real>> coeffs; // aligned with support.per_subcarrier
    GreedyDiagnostics diagnostics;
};

// The shared greedy loop. `observations` is the whitened K x M matrix and the
// tables must be N_a x M and N_d x M with N_a * N_d == sensing.cols().
template <typename Real>
PursuitResult<Real> pattern_pursuit(const CMatrix<Real> &sensing, const CMatrix<Real> &observations,
                                    const PatternTables &tables, int iterations)
{
    const int Na = tables.num_angles();
    const int Nd = tables.num_rings();
    const int M = int(observations.cols());
    const Eigen::Index K = observations.rows();
    require(iterations >= 1, "number of paths to detect must be positive");
    require(sensing.cols() == Eigen::Index(Na) * Nd, "pattern tables do not match the dictionary size");
    require(tables.num_subcarriers() == M, "pattern tables do not match the number of subcarriers");
    require(sensing.rows() == K, "sensing matrix does not match the observation dimension");

    PursuitResult<Real> out;
    out.support.per_subcarrier.assign(std::size_t(M), {});
    out.coeffs.assign(std::size_t(M), CVector<Real>());
    auto &diag = out.diagnostics;

    CMatrix<Real> residue = observations;
    diag.residual_norms.push_back(double(residue.norm()));
    std::vector<char> taken(std::size_t(Na) * std::size_t(Nd), 0);
    const RVector<Real> obs_norms = observations.colwise().norm().transpose();

    for (int it = 0; it < iterations; ++it)
    {
        const CMatrix<Real> corr = sensing.adjoint() * residue;
        const Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> power = corr.cwiseAbs2();
        diag.ops.correlation += std::uint64_t(sensing.cols()) * std::uint64_t(K) * std::uint64_t(M);
        diag.ops.pattern += std::uint64_t(Na) * std::uint64_t(Nd) * std::uint64_t(M);

        int best = -1;
        Real best_power = -1;
        for (int q = 0; q < Nd; ++q)
            for (int k = 0; k < Na; ++k)
            {
                const int flat = q * Na + k;
                if (taken[std::size_t(flat)])
                    continue;
                Real acc = 0;
                for (int m = 0; m < M; ++m)
                    acc += power(tables.column(k, q, m), m);
                if (acc > best_power)
                {
                    best_power = acc;
                    best = flat;
                }
            }
        if (best < 0)
            break; // every grid point already selected
        taken[std::size_t(best)] = 1;
        const GridIndex pick{best % Na, best / Na};
        out.support.carrier.push_back(pick);

        for (int m = 0; m < M; ++m)
        {
            auto &cols = out.support.per_subcarrier[std::size_t(m)];
            const int col = tables.column(pick.angle, pick.ring, m);
            if (std::find(cols.begin(), cols.end(), col) == cols.end())
                cols.push_back(col);

            const Eigen::Index s = Eigen::Index(cols.size());
            CMatrix<Real> psi_s(K, s);
            for (Eigen::Index j = 0; j < s; ++j)
                psi_s.col(j) = sensing.col(cols[std::size_t(j)]);
            const CVector<Real> y = observations.col(m);
            auto sol = restricted_least_squares(psi_s, y);
            diag.ops.least_squares += std::uint64_t(s * s * K + s * s * s);
            diag.ops.residual += std::uint64_t(K * s);

            residue.col(m) = y - psi_s * sol.coeffs;
            if (sol.ridge)
                ++diag.ridge_fallbacks;
            else if (obs_norms(m) > 0)
            {
                const Real scale = psi_s.norm() * obs_norms(m);
                const Real violation = (psi_s.adjoint() * residue.col(m)).norm() / scale;
                diag.max_orthogonality = std::max(diag.max_orthogonality, double(violation));
            }
            out.coeffs[std::size_t(m)] = std::move(sol.coeffs);
        }
        diag.residual_norms.push_back(double(residue.norm()));
    }
    return out;
}

namespace detail
{

template <typename Real>
CMatrix<Real> synthesise(const CMatrix<Real> &dictionary, const SupportSet &support,
                         const std::vector<CVector<Real>> &coeffs)
{
    const int M = int(support.per_subcarrier.size());
    CMatrix<Real> H = CMatrix<Real>::Zero(dictionary.rows(), M);
    for (int m = 0; m < M; ++m)
    {
        const auto &cols = support.per_subcarrier[std::size_t(m)];
        for (std::size_t j = 0; j < cols.size(); ++j)
            H.col(m) += dictionary.col(cols[j]) * coeffs[std::size_t(m)](Eigen::Index(j));
    }
    return H;
}

class Stopwatch
{
public:
    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <typename Real>
void require_whitened(const SparseModel<Real> &model, const ObservationSet<Real> &obs)
{
    require(obs.whitened.size() > 0, "observations must be pre-whitened before greedy estimation");
    require(model.sensing.rows() == obs.whitened.rows(), "sensing matrix does not match the observations");
    require(model.dictionary.cols() == model.sensing.cols(), "dictionary and sensing matrix disagree");
    require(model.num_angles >= 1 && model.dictionary.cols() % model.num_angles == 0,
            "dictionary column count is not a multiple of the angle count");
}

// One pursuit over all subcarriers jointly.
template <typename Real>
EstimateReport<Real> joint_pursuit(const SparseModel<Real> &model, const ObservationSet<Real> &obs,
                                   const PatternTables &tables, int iterations, std::string label)
{
    Stopwatch clock;
    require_whitened(model, obs);
    auto result = pattern_pursuit(model.sensing, obs.whitened, tables, iterations);
    EstimateReport<Real> report;
    report.label = std::move(label);
    report.channel = synthesise(model.dictionary, result.support, result.coeffs);
    report.support = std::move(result.support);
    report.diagnostics = std::move(result.diagnostics);
    report.walltime_ms = clock.elapsed_ms();
    return report;
}

// An independent single-column pursuit per subcarrier.
template <typename Real>
EstimateReport<Real> per_subcarrier_pursuit(const SparseModel<Real> &model, const ObservationSet<Real> &obs,
                                            int iterations, std::string label)
{
    Stopwatch clock;
    require_whitened(model, obs);
    const int M = int(obs.whitened.cols());
    const PatternTables single = identity_tables(model.num_angles, model.num_rings(), 1);

    EstimateReport<Real> report;
    report.label = std::move(label);
    report.support.per_subcarrier.resize(std::size_t(M));
    std::vector<CVector<Real>> coeffs(static_cast<std::size_t>(M));
    std::vector<double> residual_sq;
    auto &diag = report.diagnostics;
    for (int m = 0; m < M; ++m)
    {
        const CMatrix<Real> column = obs.whitened.col(m);
        auto result = pattern_pursuit(model.sensing, column, single, iterations);
        report.support.per_subcarrier[std::size_t(m)] = std::move(result.support.per_subcarrier[0]);
        coeffs[std::size_t(m)] = std::move(result.coeffs[0]);
        const auto &norms = result.diagnostics.residual_norms;
        residual_sq.resize(std::max(residual_sq.size(), norms.size()), 0.0);
        for (std::size_t i = 0; i < norms.size(); ++i)
            residual_sq[i] += norms[i] * norms[i];
        diag.max_orthogonality = std::max(diag.max_orthogonality, result.diagnostics.max_orthogonality);
        diag.ridge_fallbacks += result.diagnostics.ridge_fallbacks;
        diag.ops += result.diagnostics.ops;
    }
    for (double v : residual_sq)
        diag.residual_norms.push_back(std::sqrt(v));
    report.channel = synthesise(model.dictionary, report.support, coeffs);
    report.walltime_ms = clock.elapsed_ms();
    return report;
}

} // namespace detail

// Minimum-norm least squares on the raw (unwhitened) system, per subcarrier.
template <typename Real>
EstimateReport<Real> estimate_ls(const MeasurementEnsemble<Real> &ens, const ObservationSet<Real> &obs)
{
    detail::Stopwatch clock;
    require(obs.raw.rows() == ens.combiner.rows(), "observations do not match the combiner");
    Eigen::CompleteOrthogonalDecomposition<CMatrix<Real>> cod(ens.combiner);
    EstimateReport<Real> report;
    report.label = "ls";
    report.channel = cod.solve(obs.raw);
    report.walltime_ms = clock.elapsed_ms();
    return report;
}

// Bilinear pattern detection on the polar dictionary.
template <typename Real>
EstimateReport<Real> estimate_bpd(const SparseModel<Real> &polar, const ObservationSet<Real> &obs,
                                  const PatternTables &tables, int paths_to_detect)
{
    require(tables.num_angles() == polar.num_angles && tables.num_rings() == polar.num_rings(),
            "pattern tables do not match the polar grid");
    return detail::joint_pursuit(polar, obs, tables, paths_to_detect, "bpd");
}

template <typename Real>
EstimateReport<Real> estimate_polar_somp(const SparseModel<Real> &polar, const ObservationSet<Real> &obs,
                                         int paths_to_detect)
{
    const auto tables = identity_tables(polar.num_angles, polar.num_rings(), int(obs.whitened.cols()));
    return detail::joint_pursuit(polar, obs, tables, paths_to_detect, "polar_somp");
}

template <typename Real>
EstimateReport<Real> estimate_polar_omp(const SparseModel<Real> &polar, const ObservationSet<Real> &obs,
                                        int paths_to_detect)
{
    return detail::per_subcarrier_pursuit(polar, obs, paths_to_detect, "polar_omp");
}

template <typename Real>
EstimateReport<Real> estimate_angle_somp(const SparseModel<Real> &far, const ObservationSet<Real> &obs,
                                         int paths_to_detect)
{
    const auto tables = identity_tables(far.num_angles, far.num_rings(), int(obs.whitened.cols()));
    return detail::joint_pursuit(far, obs, tables, paths_to_detect, "angle_somp");
}

template <typename Real>
EstimateReport<Real> estimate_angle_omp(const SparseModel<Real> &far, const ObservationSet<Real> &obs,
                                        int paths_to_detect)
{
    return detail::per_subcarrier_pursuit(far, obs, paths_to_detect, "angle_omp");
}

// Angle-only beam split pattern detection on the far-field dictionary. Any
// ring drift in `tables` is dropped.
template <typename Real>
EstimateReport<Real> estimate_bspd(const SparseModel<Real> &far, const ObservationSet<Real> &obs,
                                   const PatternTables &tables, int paths_to_detect)
{
    require(far.num_rings() == 1, "BSPD expects a single-ring (far-field) dictionary");
    require(tables.num_angles() == far.num_angles, "pattern tables do not match the angle grid");
    return detail::joint_pursuit(far, obs, angle_only(tables), paths_to_detect, "bspd");
}

inline constexpr double nmse_floor_db = -100.0;

template <typename Real>
double nmse_linear(const CMatrix<Real> &truth, const CMatrix<Real> &estimate)
{
    require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(), "channel dimensions differ");
    const double energy = double(truth.squaredNorm());
    require(energy > 0, "NMSE is undefined for a zero channel");
    return double((truth - estimate).squaredNorm()) / energy;
}

inline double to_db(double linear)
{
    if (!(linear > 0))
        return nmse_floor_db;
    return std::max(nmse_floor_db, 10.0 * std::log10(linear));
}

template <typename Real>
double nmse(const CMatrix<Real> &truth, const CMatrix<Real> &estimate)
{
    return to_db(nmse_linear(truth, estimate));
}

} // namespace nfbpd
