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

#ifndef FDDMIMO_FEEDBACK_HPP
#define FDDMIMO_FEEDBACK_HPP

#include <armadillo>

#include "fddmimo/channel_model.hpp"
#include "fddmimo/rng.hpp"
#include "fddmimo/training.hpp"

namespace fddmimo
{

// Reverse water-filling bit allocation across independent Gaussian components.
struct RwfAllocation
{
    double water_level = 0.0;  // gamma
    arma::vec bits;            // R_i = log2(lambda_i / gamma) on the active set
    arma::vec distortions;     // D_i = min(gamma, lambda_i)
    double total_bits = 0.0;
    double total_distortion = 0.0;
};

// eigenvalues must be sorted descending and nonnegative. The active set is a
// prefix of the input; the water level is solved exactly by prefix scan.
RwfAllocation rwf_allocate(const arma::vec &eigenvalues, double total_bits);

// Integer bit loading for the simulated scalar quantizer: floor each fractional
// share, then hand out the remainder by largest fractional part.
arma::uvec apportion_bits(const arma::vec &fractional_bits, arma::uword total_bits);

enum class FeedbackKind
{
    klsq,
    iso_rvq,
    skew_rvq
};

struct FeedbackScheme
{
    FeedbackKind kind = FeedbackKind::klsq;
    double bits = 0.0;            // B per user
    arma::uword dominant_rank = 2;  // RVQ kinds only, >= 2
    double shaping_loss = 0.0;    // KLSQ practical mode, bits per real dimension
};

enum class QuantizerMode
{
    analytic,
    simulated
};

// What the base station ends up with for one user: the fed-back estimate and
// the second-order error model used by the precoder and the rate predictor.
struct EstimateBundle
{
    arma::cx_vec bs_estimate;          // empty when only covariances were requested
    arma::cx_mat error_covariance;     // total Cov(h - bs_estimate)
    arma::cx_mat estimate_covariance;  // R - error_covariance; may be indefinite at tiny budgets
    arma::cx_mat term_training;        // error passed through from downlink training
    arma::cx_mat term_quantization;    // quantizer distortion term
    arma::cx_mat term_residual;        // out-of-dominant-space remainder (RVQ kinds)
};

// KL-transform scalar quantization with reverse water-filling. If rng is given
// the bundle carries a simulated estimate: independent Gaussian quantization
// noise with the (integer-rounded) per-component distortions is added in KL
// coordinates.
EstimateBundle klsq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                             double shaping_loss = 0.0, StreamRng *rng = nullptr);

// Isotropic random vector quantization of the rank-r dominant component.
EstimateBundle iso_rvq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                arma::uword rank, QuantizerMode mode = QuantizerMode::analytic,
                                StreamRng *rng = nullptr);

// RVQ with the codebook skewed toward the dominant eigenvalue profile. The
// analytic quantization term is a trace-matched surrogate built from the
// closed-form upper bound (the exact expectation has no closed form).
EstimateBundle skewed_rvq_feedback(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                   arma::uword rank, QuantizerMode mode = QuantizerMode::analytic,
                                   StreamRng *rng = nullptr);

// Closed-form upper bound on the skewed-codebook quantization MSE:
// (sum_{i<=r} lambda_i^2 / lambda_1) 2^(-B/(r-1)) + sum_{i>r} lambda_i.
double skewed_mse_bound(const arma::vec &eigenvalues, arma::uword rank, double bits);

// Rank in [2..M] minimizing the analytic total error-covariance trace for the
// chosen RVQ kind. Ties go to the smaller rank.
arma::uword optimal_dominant_rank(const ChannelCovariance &cov, const TrainingEstimate &training, double bits,
                                  FeedbackKind kind = FeedbackKind::iso_rvq);

// --- simulation primitives (also used by the test suites) ---

// dim x 2^bits matrix of independent isotropic unit vectors. bits must be a
// nonnegative integer <= 20 (codebook search is exponential in bits).
arma::cx_mat draw_isotropic_codebook(arma::uword dim, double bits, StreamRng &rng);

struct QuantizedVector
{
    arma::cx_vec reconstruction;
    arma::uword index = 0;
};

// Pick the codeword maximizing |c' z| and project z onto it.
QuantizedVector quantize_projection(const arma::cx_vec &z, const arma::cx_mat &codebook);

// Skewed selection: maximize |f' L z|^2 / (f' L f) over codewords f, where
// L = diag(lambda); z is in whitened dominant coordinates. The reconstruction
// is returned in unwhitened coordinates (target vector diag(sqrt(lambda)) z).
QuantizedVector quantize_skewed(const arma::cx_vec &z, const arma::cx_mat &codebook, const arma::vec &lambda);

}  // namespace fddmimo

#endif
