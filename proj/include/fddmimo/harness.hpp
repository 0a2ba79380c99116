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

#ifndef FDDMIMO_HARNESS_HPP
#define FDDMIMO_HARNESS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fddmimo/deterministic_equivalents.hpp"
#include "fddmimo/precoding_rate.hpp"
#include "fddmimo/scenario.hpp"
#include "fddmimo/training.hpp"

namespace fddmimo
{

// ---- analytic CSIT pipeline -------------------------------------------------

// Second-order outputs of training + feedback for one operating point.
struct PipelineStats
{
    std::vector<arma::cx_mat> estimate_covariances;  // PSD-clipped model difference R - Cov(err)
    std::vector<arma::cx_mat> error_covariances;     // raw analytic error model (PSD by construction)
    double training_mse = 0.0;
    double feedback_mse = 0.0;  // trace of total error covariance summed over users
};

// Training designs are the expensive per-tau piece of the grid search; they
// are computed once here and shared across feedback budgets.
TrainingDesign make_training_design(const ScenarioConfig &config,
                                    const std::vector<ChannelCovariance> &covs, arma::uword tau);

PipelineStats fdd_pipeline(const ScenarioConfig &config, const std::vector<ChannelCovariance> &covs,
                           const TrainingDesign &design, double bits_per_user);

// Eigenvalue floor at zero; tiny feedback budgets can push R - Cov(err)
// slightly indefinite and the DE/sampler need a PSD input.
arma::cx_mat clip_psd(const arma::cx_mat &m);

// Left factor F with F F' equal to the PSD-clipped covariance; F z with
// z ~ CN(0, I) draws from the covariance.
arma::cx_mat sampling_factor(const arma::cx_mat &cov);

// ---- rate evaluation ---------------------------------------------------------

struct McRateResult
{
    arma::vec mean_sinr;       // per-user average of the instantaneous SINR
    arma::vec mean_user_rate;  // per-user average of log2(1 + SINR)
    double mean_rate = 0.0;    // average sum rate, bits/channel use
    double rate_stderr = 0.0;
};

// Model-consistent Monte Carlo: per trial draw estimate ~ CN(0, est_cov) and
// error ~ CN(0, err_cov) independently, h = estimate + error, then evaluate
// the instantaneous RZF SINR. Streams are keyed by (seed, trial, user) so any
// evaluation order gives identical results.
McRateResult mc_rate(const std::vector<arma::cx_mat> &estimate_covs, const std::vector<arma::cx_mat> &error_covs,
                     const PrecoderConfig &precoder, arma::uword trials, std::uint64_t seed);

// DE-based gross rate and SINR for the same inputs.
struct DeRateResult
{
    arma::vec sinr;
    double rate = 0.0;
};
// warm_start is in/out when non-null: a rightly-sized nonnegative vector seeds
// the fixed point, and the converged point is written back for the next call.
DeRateResult de_rate(const std::vector<arma::cx_mat> &estimate_covs,
                     const std::vector<ChannelCovariance> &true_covs, double alpha, double power,
                     arma::vec *warm_start = nullptr);

// Net rate for one (tau, delta) cell under the scenario's evaluation mode.
RateReport evaluate_net_rate(const ScenarioConfig &config, arma::uword tau, arma::uword delta, RateEval eval);

// Exhaustive search over the documented tau/delta grids maximizing net rate.
// The grid: tau in {1..min(24, T-1)} step 1 then step ceil(M/16) up to
// min(ceil(1.5 M), T-1); delta in {1..min(20, T-tau)} step 1 then step 4 up
// to min(100, T-tau). Ties prefer smaller tau+delta. With rate_eval=mc the
// search itself runs Monte Carlo (slow); the usual mode searches with the
// deterministic equivalent and reports Monte Carlo at the chosen point when
// rate_eval is mc or both.
RateReport optimize_net_rate(const ScenarioConfig &config, RateEval eval);

// Reciprocity baseline: uplink pilots of length tau >= N at the uplink SNR
// (orthogonal pilots, coherent gain tau), per-user MMSE, no feedback, same RZF
// downlink; tau chosen by scan. Net rate is (1 - tau/T) times the sum rate.
RateReport tdd_baseline_rate(const ScenarioConfig &config, RateEval eval);

// ---- experiment driver --------------------------------------------------------

struct ResultRow
{
    std::string scenario;  // scenario hash
    std::string metric;
    double x = 0.0;
    double y = 0.0;
    double stderr_y = 0.0;  // zero for deterministic metrics
    std::string units;
};

std::vector<ResultRow> run_scenario(const ScenarioConfig &config);

// Figure-reproduction recipes; write CSV files under out_dir and return the
// paths. Known ids: fig1_cdf, fig2_tdd_fdd, fig4_opt_vs_unitary,
// fig5_training_mse, fig6_sq_vq, fig7_rank_tradeoff, fig8_blocklength.
std::vector<std::string> reproduce(const std::string &figure_id, const std::string &out_dir,
                                   std::uint64_t seed, arma::uword trials, RateEval eval = RateEval::de);

void write_csv(const std::string &path, const std::vector<ResultRow> &rows);

// Structural invariant battery; prints one line per check to `out`.
// Returns the number of failed checks.
int run_validation(std::ostream &out);

}  // namespace fddmimo

#endif
