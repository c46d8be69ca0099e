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

// Pilot observation through random analog combiners and noise pre-whitening.
//
// With P pilot slots of N_RF combined outputs each, the stacked observation at
// subcarrier m is y_m = A h_m + n_m, where A = [A_1; ...; A_P] and the slot-p
// block of n_m is A_p times CN(0, sigma^2 I_N) antenna noise. The combined noise
// is therefore coloured with covariance sigma^2 * blockdiag{A_p A_p^H}.

#include "nfbpd/channel_model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <string>

namespace nfbpd
{

enum class CombinerKind
{
    rademacher, // entries +-1/sqrt(N)
    qpsk,       // entries (+-1 +-j)/sqrt(2N)
};

// Which noise energy the SNR is referenced to.
enum class SnrReference
{
    whitened, // ||H||_F^2 / E||D^-1 N||_F^2, E = sigma^2 M P N_RF
    antenna,  // ||H||_F^2 / (sigma^2 M N), noise before combining
};

template <typename Real = double>
struct MeasurementEnsemble
{
    int num_slots = 0;
    int rf_chains = 0;
    CMatrix<Real> combiner; // stacked A, (P * N_RF) x N

    int num_measurements() const { return num_slots * rf_chains; }
    int num_antennas() const { return int(combiner.cols()); }
    auto slot(int p) const { return combiner.middleRows(Eigen::Index(p) * rf_chains, rf_chains); }
};

template <typename Real, typename Rng>
MeasurementEnsemble<Real> sample_combiners(const SystemConfig<Real> &cfg, int num_slots, int rf_chains, Rng &rng,
                                           CombinerKind kind = CombinerKind::rademacher)
{
    static_assert(sizeof(typename Rng::result_type) >= 8, "combiner sampling expects a 64-bit engine");
    require(num_slots >= 1, "number of pilot slots must be positive");
    require(rf_chains >= 1, "number of RF chains must be positive");

    const int N = cfg.num_antennas;
    MeasurementEnsemble<Real> ens{num_slots, rf_chains, CMatrix<Real>(num_slots * rf_chains, N)};
    // Column-major fill order; one raw draw per entry keeps the stream portable.
    if (kind == CombinerKind::rademacher)
    {
        const Real s = Real(1) / std::sqrt(Real(N));
        for (Eigen::Index j = 0; j < ens.combiner.cols(); ++j)
            for (Eigen::Index i = 0; i < ens.combiner.rows(); ++i)
                ens.combiner(i, j) = (rng() >> 63) ? Complex<Real>(s, 0) : Complex<Real>(-s, 0);
    }
    else
    {
        const Real s = Real(1) / std::sqrt(Real(2 * N));
        for (Eigen::Index j = 0; j < ens.combiner.cols(); ++j)
            for (Eigen::Index i = 0; i < ens.combiner.rows(); ++i)
            {
                const auto bits = rng();
                ens.combiner(i, j) = {(bits >> 63) ? s : -s, ((bits >> 62) & 1u) ? s : -s};
            }
    }
    return ens;
}

// blockdiag{A_p A_p^H}; the noise covariance divided by sigma^2.
template <typename Real>
CMatrix<Real> noise_covariance_shape(const MeasurementEnsemble<Real> &ens)
{
    const int K = ens.num_measurements();
    const int R = ens.rf_chains;
    CMatrix<Real> C = CMatrix<Real>::Zero(K, K);
    for (int p = 0; p < ens.num_slots; ++p)
        C.block(p * R, p * R, R, R) = ens.slot(p) * ens.slot(p).adjoint();
    return C;
}

// Whitening factor D with D D^H = blockdiag{A_p A_p^H}. We use the Hermitian
// square root S Sigma^{1/2} S^H, which does not depend on how the eigensolver
// orders or phases eigenvectors, so the per-block and monolithic routes agree.
template <typename Real = double>
struct Whitener
{
    CMatrix<Real> factor;
    CMatrix<Real> inverse;
    RVector<Real> eigenvalues; // of blockdiag{A_p A_p^H}, block by block
};

inline constexpr double min_combiner_eigenvalue = 1e-10;

namespace detail
{
template <typename Real>
void hermitian_roots(const CMatrix<Real> &C, Eigen::Ref<CMatrix<Real>> root, Eigen::Ref<CMatrix<Real>> inv_root,
                     Eigen::Ref<RVector<Real>> eigenvalues)
{
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> eig(C);
    if (eig.info() != Eigen::Success)
        throw NumericalError("eigendecomposition of the combiner covariance failed");
    const RVector<Real> &values = eig.eigenvalues();
    if (values.minCoeff() < Real(min_combiner_eigenvalue))
        throw NumericalError("rank-deficient combiner: eigenvalue " + std::to_string(double(values.minCoeff())) +
                             " below threshold");
    const CMatrix<Real> &S = eig.eigenvectors();
    root = S * values.cwiseSqrt().asDiagonal() * S.adjoint();
    inv_root = S * values.cwiseSqrt().cwiseInverse().asDiagonal() * S.adjoint();
    eigenvalues = values;
}
} // namespace detail

// Per-block eigendecomposition, O(P * N_RF^3).
template <typename Real>
Whitener<Real> compute_whitener(const MeasurementEnsemble<Real> &ens)
{
    const int K = ens.num_measurements();
    const int R = ens.rf_chains;
    Whitener<Real> w{CMatrix<Real>::Zero(K, K), CMatrix<Real>::Zero(K, K), RVector<Real>(K)};
    for (int p = 0; p < ens.num_slots; ++p)
    {
        const CMatrix<Real> C = ens.slot(p) * ens.slot(p).adjoint();
        detail::hermitian_roots<Real>(C, w.factor.block(p * R, p * R, R, R), w.inverse.block(p * R, p * R, R, R),
                                      w.eigenvalues.segment(p * R, R));
    }
    return w;
}

// Same factor from one eigendecomposition of the full block-diagonal matrix.
template <typename Real>
Whitener<Real> compute_whitener_monolithic(const MeasurementEnsemble<Real> &ens)
{
    const int K = ens.num_measurements();
    Whitener<Real> w{CMatrix<Real>(K, K), CMatrix<Real>(K, K), RVector<Real>(K)};
    detail::hermitian_roots<Real>(noise_covariance_shape(ens), w.factor, w.inverse, w.eigenvalues);
    return w;
}

template <typename Real = double>
struct ObservationSet
{
    CMatrix<Real> raw;      // Y, (P * N_RF) x M
    CMatrix<Real> whitened; // D^-1 Y, filled by prewhiten()
};

template <typename Real, typename Rng>
ObservationSet<Real> observe(const MeasurementEnsemble<Real> &ens, const WidebandChannel<Real> &H,
                             Scalar<Real> sigma, Rng &rng)
{
    require(sigma >= 0, "noise standard deviation must be non-negative");
    require(H.rows() == ens.num_antennas(), "channel row count does not match the combiner");

    ObservationSet<Real> obs;
    obs.raw = ens.combiner * H;
    if (sigma == 0)
        return obs;

    const Eigen::Index N = H.rows();
    const Eigen::Index M = H.cols();
    std::normal_distribution<Real> gauss(Real(0), sigma / std::sqrt(Real(2)));
    CMatrix<Real> noise(N, M);
    for (int p = 0; p < ens.num_slots; ++p)
    {
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index n = 0; n < N; ++n)
            {
                const Real re = gauss(rng);
                noise(n, m) = {re, gauss(rng)};
            }
        obs.raw.middleRows(Eigen::Index(p) * ens.rf_chains, ens.rf_chains).noalias() += ens.slot(p) * noise;
    }
    return obs;
}

// Noise standard deviation realising `snr_db` for channel H.
template <typename Real>
Real sigma_for_snr(const MeasurementEnsemble<Real> &ens, const WidebandChannel<Real> &H, Scalar<Real> snr_db,
                   SnrReference reference = SnrReference::whitened)
{
    const Real energy = H.squaredNorm();
    require(energy > 0, "SNR is undefined for a zero channel");
    const Real per_sample = reference == SnrReference::whitened ? Real(ens.num_measurements()) : Real(H.rows());
    const Real noise_energy_unit = Real(H.cols()) * per_sample;
    return std::sqrt(energy / (std::pow(Real(10), snr_db / Real(10)) * noise_energy_unit));
}

template <typename Real = double>
struct WhitenedSystem
{
    Whitener<Real> whitener;
    CMatrix<Real> sensing; // Psi = D^-1 A W
};

// Psi = D^-1 A W for an arbitrary synthesis dictionary W.
template <typename Real>
CMatrix<Real> sensing_matrix(const Whitener<Real> &w, const MeasurementEnsemble<Real> &ens, const CMatrix<Real> &W)
{
    return w.inverse * (ens.combiner * W);
}

// Fills obs.whitened = D^-1 Y and returns the whitener with Psi = D^-1 A W.
// Sigma is never needed: D only depends on the combiners.
template <typename Real>
WhitenedSystem<Real> prewhiten(const MeasurementEnsemble<Real> &ens, ObservationSet<Real> &obs,
                               const CMatrix<Real> &dictionary)
{
    WhitenedSystem<Real> sys{compute_whitener(ens), {}};
    obs.whitened = sys.whitener.inverse * obs.raw;
    sys.sensing = sensing_matrix(sys.whitener, ens, dictionary);
    return sys;
}

} // namespace nfbpd
