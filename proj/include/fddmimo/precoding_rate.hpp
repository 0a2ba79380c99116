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

#ifndef FDDMIMO_PRECODING_RATE_HPP
#define FDDMIMO_PRECODING_RATE_HPP

#include <armadillo>

namespace fddmimo
{

struct PrecoderConfig
{
    double regularization = 0.01;  // alpha
    double total_power = 100.0;    // P (noise power is 1)
    arma::uword num_users = 8;
};

struct Precoder
{
    arma::cx_mat weights;  // M x N
    double zeta = 0.0;
};

// Regularized zero-forcing from the stacked estimates. Row n of `estimates`
// is the conjugate transpose of user n's channel estimate.
Precoder rzf_precode(const arma::cx_mat &estimates, const PrecoderConfig &config);

// Signal and noise-plus-interference powers of one channel realization,
// split per user. The instantaneous SINR is their ratio; averaging the two
// terms separately before dividing gives the lower-variance estimator that
// the deterministic equivalent approximates.
struct SinrTerms
{
    arma::vec signal;
    arma::vec denominator;
};
SinrTerms sinr_terms(const arma::cx_mat &estimates, const arma::cx_mat &errors, const PrecoderConfig &config);

// Per-user SINR under equal power allocation P/N. True channels are
// estimates + errors row-wise.
arma::vec sinr_per_user(const arma::cx_mat &estimates, const arma::cx_mat &errors, const PrecoderConfig &config);

struct OverheadModel
{
    double kappa = 0.5;        // multiplexing fraction of the uplink MIMO-MAC
    double uplink_snr = 10.0;  // linear
    arma::uword block_length = 200;
};

// Feedback symbols needed to carry N users' B bits over the uplink MAC:
// delta = N B / (kappa min(M, N) log2(M SNR_ul)).
double feedback_overhead(double bits_per_user, const OverheadModel &overhead, arma::uword m, arma::uword n);

// Bits per user carried by a given number of feedback symbols (the inverse map).
double bits_for_overhead(double symbols, const OverheadModel &overhead, arma::uword m, arma::uword n);

// Gross sum rate of a SINR vector, bits/channel use.
double sum_rate(const arma::vec &sinr);

struct RateReport
{
    arma::vec per_user_sinr;
    double gross_rate = 0.0;
    double overhead_fraction = 0.0;
    double net_rate = 0.0;
    double net_rate_stderr = 0.0;  // zero for deterministic evaluation
    arma::uword chosen_tau = 0;
    double chosen_delta = 0.0;
    double chosen_bits = 0.0;
};

}  // namespace fddmimo

#endif
