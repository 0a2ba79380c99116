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

#ifndef FDDMIMO_SCENARIO_HPP
#define FDDMIMO_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fddmimo/channel_model.hpp"
#include "fddmimo/feedback.hpp"

namespace fddmimo
{

enum class ChannelModelKind
{
    one_ring,
    laplacian,
    iid  // uncorrelated reference system, R_n = I
};

enum class TrainingKind
{
    optimized,
    unitary
};

enum class RateEval
{
    de,
    mc,
    both
};

struct ScenarioConfig
{
    arma::uword num_antennas = 20;   // M
    arma::uword num_users = 8;       // N
    arma::uword block_length = 200;  // T
    double snr_dl_db = 20.0;
    double snr_ul_db = 10.0;
    double alpha = 0.01;  // RZF regularization
    double kappa = 0.5;   // uplink MAC multiplexing fraction

    ChannelModelKind channel_model = ChannelModelKind::one_ring;
    double spacing = 0.5;                  // antenna spacing, wavelengths
    double spread_deg = 10.0;              // angular spread, degrees
    std::vector<double> azimuths_deg;      // fixed azimuths; empty = uniform [-60, 60] by seed

    TrainingKind training = TrainingKind::optimized;
    FeedbackScheme feedback;

    RateEval rate_eval = RateEval::de;
    arma::uword trials = 2000;
    std::uint64_t seed = 1;

    // Optional fixed operating point; zero means "search the grid".
    arma::uword fixed_tau = 0;
    arma::uword fixed_delta = 0;

    double downlink_power() const;  // linear SNR (unit noise)
    double uplink_snr() const;
};

// JSON round-trip. Unknown keys are rejected so config typos surface early.
std::string scenario_to_json(const ScenarioConfig &config);
ScenarioConfig scenario_from_json(const std::string &text);

// FNV-1a over the canonical JSON form; stable across runs.
std::string scenario_hash(const ScenarioConfig &config);

// Per-user covariances under the configured geometry. Azimuths come from the
// fixed list when present (cycled over users), otherwise drawn uniformly on
// [-60, 60] degrees from a stream keyed by (seed, user).
std::vector<ChannelCovariance> build_user_covariances(const ScenarioConfig &config);

}  // namespace fddmimo

#endif
