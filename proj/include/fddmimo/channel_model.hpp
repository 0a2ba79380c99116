// fddmimo - FDD massive MIMO link-level simulation library
// Copyright (C) 2026 fddmimo contributors
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

#ifndef FDDMIMO_CHANNEL_MODEL_HPP
#define FDDMIMO_CHANNEL_MODEL_HPP

#include <armadillo>
#include <string>

#include "fddmimo/rng.hpp"

namespace fddmimo
{

// Geometry of one user as seen from a uniform linear array.
struct UserGeometry
{
    double azimuth = 0.0;          // radians
    double angular_spread = 0.0;   // radians, > 0
    double antenna_spacing = 0.5;  // wavelengths, > 0
};

// Hermitian PSD second-order channel statistics with cached eigenstructure.
// Eigenvalues are sorted descending; ties keep the solver's original order.
class ChannelCovariance
{
  public:
    explicit ChannelCovariance(arma::cx_mat matrix);

    static ChannelCovariance identity(arma::uword m);
    static ChannelCovariance zero(arma::uword m);

    arma::uword dim() const { return matrix_.n_rows; }
    const arma::cx_mat &matrix() const { return matrix_; }
    const arma::vec &eigenvalues() const { return eigenvalues_; }
    const arma::cx_mat &eigenvectors() const { return eigenvectors_; }

    // U * diag(sqrt(max(lambda, 0))): left factor of the Karhunen-Loeve map.
    arma::cx_mat sqrt_factor() const;

  private:
    arma::cx_mat matrix_;
    arma::vec eigenvalues_;
    arma::cx_mat eigenvectors_;
};

// Rank-r dominant eigenspace split of a covariance.
struct DominantRepresentation
{
    arma::uword rank = 0;
    arma::cx_mat basis;                // M x r, orthonormal columns
    arma::vec dominant_eigenvalues;    // length r, descending
    arma::cx_mat residual_covariance;  // M x M PSD remainder
};

// Covariance entry (i,j) = (1/2D) * integral over [azimuth-D, azimuth+D] of
// exp(-j 2 pi d (i-j) sin(a)) da, evaluated by adaptive quadrature.
ChannelCovariance one_ring_ccm(const UserGeometry &geometry, arma::uword m);

// Covariance entry (i,j) with a Laplacian angular density of scale
// angular_spread over the [azimuth-pi, azimuth+pi] window.
ChannelCovariance laplacian_ccm(const UserGeometry &geometry, arma::uword m);

// Number of eigenvalues strictly above the threshold.
arma::uword effective_rank(const ChannelCovariance &cov, double threshold);

// Threshold used by the experiment harness: 1e-3 times the largest eigenvalue.
double default_rank_threshold(const ChannelCovariance &cov);

DominantRepresentation dominant_representation(const ChannelCovariance &cov, arma::uword rank);

// One correlated channel draw h = U sqrt(Sigma) z with z ~ CN(0, I).
arma::cx_vec sample_channel(const ChannelCovariance &cov, StreamRng &rng);

// Text round-trip (JSON: dimension plus row-major interleaved re/im pairs).
std::string covariance_to_json(const ChannelCovariance &cov);
ChannelCovariance covariance_from_json(const std::string &text);

}  // namespace fddmimo

#endif
