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

#ifndef FDDMIMO_TRAINING_HPP
#define FDDMIMO_TRAINING_HPP

#include <armadillo>
#include <vector>

#include "fddmimo/channel_model.hpp"
#include "fddmimo/rng.hpp"

namespace fddmimo
{

// Downlink pilot block: matrix is M x tau, one column per training symbol.
struct TrainingDesign
{
    arma::cx_mat matrix;
    double power_budget = 0.0;  // tau * P

    arma::uword length() const { return matrix.n_cols; }
    double power_used() const { return arma::accu(arma::square(arma::abs(matrix))); }
};

struct TrainingEstimate
{
    arma::cx_vec estimate;          // MMSE estimate at the user
    arma::cx_mat error_covariance;  // posterior covariance of h - estimate
};

struct TrainingOptimization
{
    TrainingDesign design;
    bool converged = false;
    arma::uword iterations = 0;
    double last_step = 0.0;     // Frobenius norm of the final iterate change
    double kkt_residual = 0.0;  // ||sum_n R_n X (I + X'R_nX)^-1 - lambda X||_F / ||X||_F
    double lambda = 0.0;        // least-squares stationarity multiplier
    double cmi = 0.0;           // objective value of the returned design, bits
};

// Simulated downlink training observation y = X' h + n with unit-variance noise.
arma::cx_vec training_observation(const TrainingDesign &design, const arma::cx_vec &channel, StreamRng &rng);

// Posterior error covariance R - R X (X'RX + I)^-1 X'R. This inverse-free form
// equals (inv(R + eps I) + XX')^-1 without requiring R to be invertible.
arma::cx_mat training_error_covariance(const ChannelCovariance &cov, const TrainingDesign &design);

TrainingEstimate mmse_estimate(const ChannelCovariance &cov, const TrainingDesign &design,
                               const arma::cx_vec &observation);

// Sum over users of trace of the training error covariance.
double total_training_mse(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design);

// Sum over users of log2 det(I + X' R_n X), bits.
double cmi_objective(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design);

// Stationarity diagnostic for a design: residual and fitted multiplier.
struct KktCheck
{
    double residual = 0.0;
    double lambda = 0.0;
};
KktCheck kkt_check(const std::vector<ChannelCovariance> &covs, const TrainingDesign &design);

// Fixed-point iteration maximizing the conditional mutual information under
// trace(XX') = tau * power. Starts from `init` when given, otherwise from the
// first tau columns of the scaled identity. Non-convergence is reported in the
// result, not thrown; the last iterate is still usable.
TrainingOptimization optimize_training(const std::vector<ChannelCovariance> &covs, arma::uword tau, double power,
                                       const arma::cx_mat *init = nullptr, double tol = 1e-8,
                                       arma::uword max_iter = 500);

// DFT-based baseline: X X' = (tau P / M) I_M when tau >= M, X'X = P I_tau
// otherwise. Spreads power evenly over the pilot symbols.
TrainingDesign unitary_training(arma::uword m, arma::uword tau, double power);

}  // namespace fddmimo

#endif
