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

#include <cmath>
#include <optional>
#include <stdexcept>

#include "fddmimo/harness.hpp"

namespace fddmimo
{

namespace
{

constexpr std::uint64_t kMcTag = 0x6d632d65ULL;  // "mc-e"

OverheadModel overhead_model(const ScenarioConfig &config)
{
    OverheadModel oh;
    oh.kappa = config.kappa;
    oh.uplink_snr = config.uplink_snr();
    oh.block_length = config.block_length;
    return oh;
}

PrecoderConfig precoder_config(const ScenarioConfig &config)
{
    PrecoderConfig pc;
    pc.regularization = config.alpha;
    pc.total_power = config.downlink_power();
    pc.num_users = config.num_users;
    return pc;
}

std::vector<TrainingEstimate> training_stage(const std::vector<ChannelCovariance> &covs,
                                             const TrainingDesign &design)
{
    std::vector<TrainingEstimate> out;
    out.reserve(covs.size());
    for (const ChannelCovariance &cov : covs)
        out.push_back(TrainingEstimate{arma::cx_vec(), training_error_covariance(cov, design)});
    return out;
}

PipelineStats feedback_stage(const ScenarioConfig &config, const std::vector<ChannelCovariance> &covs,
                             const std::vector<TrainingEstimate> &training, double bits)
{
    PipelineStats stats;
    stats.estimate_covariances.reserve(covs.size());
    stats.error_covariances.reserve(covs.size());
    for (std::size_t u = 0; u < covs.size(); ++u)
    {
        const ChannelCovariance &cov = covs[u];
        EstimateBundle bundle;
        switch (config.feedback.kind)
        {
        case FeedbackKind::klsq:
            bundle = klsq_feedback(cov, training[u], bits, config.feedback.shaping_loss);
            break;
        case FeedbackKind::iso_rvq:
        case FeedbackKind::skew_rvq:
        {
            arma::uword rank = config.feedback.dominant_rank;
            if (rank == 0)
                rank = optimal_dominant_rank(cov, training[u], bits, config.feedback.kind);
            bundle = config.feedback.kind == FeedbackKind::iso_rvq
                         ? iso_rvq_feedback(cov, training[u], bits, rank)
                         : skewed_rvq_feedback(cov, training[u], bits, rank);
            break;
        }
        }
        stats.training_mse += arma::trace(training[u].error_covariance).real();
        stats.feedback_mse += arma::trace(bundle.error_covariance).real();
        // The analytic model difference R - Cov(err) can dip well below PSD
        // when training misses part of the space; both estimate consumers
        // (fixed point and sampler) need the clipped covariance.
        stats.estimate_covariances.push_back(clip_psd(bundle.estimate_covariance));
        stats.error_covariances.push_back(std::move(bundle.error_covariance));
    }
    return stats;
}

struct CellValue
{
    double net = -arma::datum::inf;
    double gross = 0.0;
    arma::vec sinr;
};

// One grid cell under the DE (cheap path used by the search).
std::optional<CellValue> de_cell(const ScenarioConfig &config, const std::vector<ChannelCovariance> &covs,
                                 const PipelineStats &stats, double overhead_fraction, arma::vec &warm)
{
    try
    {
        const DeRateResult de =
            de_rate(stats.estimate_covariances, covs, config.alpha, config.downlink_power(), &warm);
        CellValue cell;
        cell.gross = de.rate;
        cell.net = (1.0 - overhead_fraction) * de.rate;
        cell.sinr = de.sinr;
        return cell;
    }
    catch (const ConvergenceError &)
    {
        // Degenerate corner of the grid (estimate covariance nearly vanished);
        // such cells cannot win the search, so they are skipped.
        warm.reset();
        return std::nullopt;
    }
}

arma::vec effective_sinr(const arma::vec &per_user_rate)
{
    arma::vec s(per_user_rate.n_elem);
    for (arma::uword i = 0; i < s.n_elem; ++i)
        s(i) = std::exp2(per_user_rate(i)) - 1.0;
    return s;
}

std::vector<arma::uword> tau_grid(const ScenarioConfig &config)
{
    const arma::uword t_max = config.block_length - 1;  // delta >= 1
    const arma::uword dense_end = std::min<arma::uword>(24, t_max);
    std::vector<arma::uword> taus;
    for (arma::uword t = 1; t <= dense_end; ++t)
        taus.push_back(t);
    const arma::uword coarse_end = std::min<arma::uword>(
        t_max, static_cast<arma::uword>(std::ceil(1.5 * static_cast<double>(config.num_antennas))));
    const arma::uword step = std::max<arma::uword>(1, (config.num_antennas + 15) / 16);
    for (arma::uword t = dense_end + step; t <= coarse_end; t += step)
        taus.push_back(t);
    return taus;
}

}  // namespace

TrainingDesign make_training_design(const ScenarioConfig &config,
                                    const std::vector<ChannelCovariance> &covs, arma::uword tau)
{
    const double p = config.downlink_power();
    if (config.training == TrainingKind::unitary)
        return unitary_training(config.num_antennas, tau, p);
    return optimize_training(covs, tau, p, nullptr, 1e-7, 300).design;
}

PipelineStats fdd_pipeline(const ScenarioConfig &config, const std::vector<ChannelCovariance> &covs,
                           const TrainingDesign &design, double bits_per_user)
{
    return feedback_stage(config, covs, training_stage(covs, design), bits_per_user);
}

arma::cx_mat clip_psd(const arma::cx_mat &m)
{
    arma::vec values;
    arma::cx_mat vectors;
    if (!arma::eig_sym(values, vectors, 0.5 * (m + m.t())))
        throw std::runtime_error("clip_psd: eigendecomposition failed");
    values.transform([](double v) { return v > 0.0 ? v : 0.0; });
    return vectors * arma::diagmat(arma::cx_vec(values, arma::zeros(values.n_elem))) * vectors.t();
}

arma::cx_mat sampling_factor(const arma::cx_mat &cov)
{
    arma::vec values;
    arma::cx_mat vectors;
    if (!arma::eig_sym(values, vectors, 0.5 * (cov + cov.t())))
        throw std::runtime_error("sampling_factor: eigendecomposition failed");
    values.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    return vectors * arma::diagmat(arma::cx_vec(values, arma::zeros(values.n_elem)));
}

McRateResult mc_rate(const std::vector<arma::cx_mat> &estimate_covs, const std::vector<arma::cx_mat> &error_covs,
                     const PrecoderConfig &precoder, arma::uword trials, std::uint64_t seed)
{
    const arma::uword n = estimate_covs.size();
    if (n != error_covs.size() || n != precoder.num_users)
        throw std::invalid_argument("mc_rate: covariance list size mismatch");
    const arma::uword m = estimate_covs.front().n_rows;

    // Estimate covariances may carry tiny negative eigenvalues from the
    // model difference R - Cov(err); the factorization clamps them.
    std::vector<arma::cx_mat> est_factor(n), err_factor(n);
    for (arma::uword u = 0; u < n; ++u)
    {
        est_factor[u] = sampling_factor(estimate_covs[u]);
        err_factor[u] = sampling_factor(error_covs[u]);
    }

    McRateResult out;
    out.mean_sinr = arma::zeros(n);
    out.mean_user_rate = arma::zeros(n);
    double rate_sum = 0.0, rate_sq_sum = 0.0;
    arma::cx_mat estimates(n, m), errors(n, m);
    for (arma::uword t = 0; t < trials; ++t)
    {
        for (arma::uword u = 0; u < n; ++u)
        {
            StreamRng rng = StreamRng::stream(seed, kMcTag, t, u);
            estimates.row(u) = (est_factor[u] * rng.cgaussian_vec(m)).t();
            errors.row(u) = (err_factor[u] * rng.cgaussian_vec(m)).t();
        }
        const arma::vec sinr = sinr_per_user(estimates, errors, precoder);
        out.mean_sinr += sinr;
        out.mean_user_rate += arma::log2(1.0 + sinr);
        const double rate = sum_rate(sinr);
        rate_sum += rate;
        rate_sq_sum += rate * rate;
    }
    out.mean_sinr /= static_cast<double>(trials);
    out.mean_user_rate /= static_cast<double>(trials);
    out.mean_rate = rate_sum / static_cast<double>(trials);
    if (trials > 1)
    {
        const double var =
            (rate_sq_sum - rate_sum * rate_sum / static_cast<double>(trials)) / static_cast<double>(trials - 1);
        out.rate_stderr = std::sqrt(std::max(0.0, var) / static_cast<double>(trials));
    }
    return out;
}

DeRateResult de_rate(const std::vector<arma::cx_mat> &estimate_covs,
                     const std::vector<ChannelCovariance> &true_covs, double alpha, double power,
                     arma::vec *warm_start)
{
    DeInput input;
    input.estimate_covariances = estimate_covs;
    input.true_covariances.reserve(true_covs.size());
    for (const ChannelCovariance &cov : true_covs)
        input.true_covariances.push_back(cov.matrix());
    input.regularization = alpha;
    input.power = power;

    const DeState state = solve_fixed_point(input, 1e-10, 1000, warm_start);
    if (warm_start != nullptr)
        *warm_start = state.e_bar;
    DeRateResult out;
    out.sinr = de_sinr(state, input);
    out.rate = sum_rate(out.sinr);
    return out;
}

RateReport evaluate_net_rate(const ScenarioConfig &config, arma::uword tau, arma::uword delta, RateEval eval)
{
    if (tau < 1 || delta < 1 || tau + delta > config.block_length)
        throw std::invalid_argument("evaluate_net_rate: infeasible (tau, delta)");
    const std::vector<ChannelCovariance> covs = build_user_covariances(config);
    const TrainingDesign design = make_training_design(config, covs, tau);
    const double bits =
        bits_for_overhead(static_cast<double>(delta), overhead_model(config), config.num_antennas, config.num_users);
    const PipelineStats stats = fdd_pipeline(config, covs, design, bits);
    const double oh = static_cast<double>(tau + delta) / static_cast<double>(config.block_length);

    RateReport report;
    report.chosen_tau = tau;
    report.chosen_delta = static_cast<double>(delta);
    report.chosen_bits = bits;
    report.overhead_fraction = oh;
    if (eval == RateEval::de)
    {
        const DeRateResult de =
            de_rate(stats.estimate_covariances, covs, config.alpha, config.downlink_power(), nullptr);
        report.per_user_sinr = de.sinr;
        report.gross_rate = de.rate;
    }
    else
    {
        const McRateResult mc = mc_rate(stats.estimate_covariances, stats.error_covariances,
                                        precoder_config(config), config.trials, config.seed);
        // Rate-equivalent per-user SINR keeps net = (1-oh) * sum log2(1+sinr).
        report.per_user_sinr = effective_sinr(mc.mean_user_rate);
        report.gross_rate = mc.mean_rate;
        report.net_rate_stderr = (1.0 - oh) * mc.rate_stderr;
    }
    report.net_rate = (1.0 - oh) * report.gross_rate;
    return report;
}

RateReport optimize_net_rate(const ScenarioConfig &config, RateEval eval)
{
    const std::vector<ChannelCovariance> covs = build_user_covariances(config);
    const std::vector<arma::uword> taus = tau_grid(config);
    if (taus.empty())
        throw std::invalid_argument("optimize_net_rate: no feasible (tau, delta) under T");
    const OverheadModel oh = overhead_model(config);
    const bool search_mc = eval == RateEval::mc;

    double best_net = -arma::datum::inf;
    arma::uword best_tau = 0, best_delta = 0;
    bool found = false;

    for (const arma::uword tau : taus)
    {
        const TrainingDesign design = make_training_design(config, covs, tau);
        const std::vector<TrainingEstimate> training = training_stage(covs, design);
        const arma::uword delta_max = std::min<arma::uword>(100, config.block_length - tau);
        arma::vec warm;
        for (arma::uword delta = 1; delta <= delta_max; delta = delta < 20 ? delta + 1 : delta + 4)
        {
            const double bits =
                bits_for_overhead(static_cast<double>(delta), oh, config.num_antennas, config.num_users);
            const PipelineStats stats = feedback_stage(config, covs, training, bits);
            const double fraction =
                static_cast<double>(tau + delta) / static_cast<double>(config.block_length);

            double net;
            if (search_mc)
            {
                const McRateResult mc = mc_rate(stats.estimate_covariances, stats.error_covariances,
                                                precoder_config(config), config.trials, config.seed);
                net = (1.0 - fraction) * mc.mean_rate;
            }
            else
            {
                const std::optional<CellValue> cell = de_cell(config, covs, stats, fraction, warm);
                if (!cell)
                    continue;
                net = cell->net;
            }

            const bool better =
                net > best_net + 1e-12 ||
                (std::abs(net - best_net) <= 1e-12 && found && tau + delta < best_tau + best_delta);
            if (!found || better)
            {
                best_net = net;
                best_tau = tau;
                best_delta = delta;
                found = true;
            }
        }
    }
    if (!found)
        throw std::runtime_error("optimize_net_rate: every grid cell failed to evaluate");

    return evaluate_net_rate(config, best_tau, best_delta,
                             eval == RateEval::de ? RateEval::de : RateEval::mc);
}

RateReport tdd_baseline_rate(const ScenarioConfig &config, RateEval eval)
{
    const std::vector<ChannelCovariance> covs = build_user_covariances(config);
    if (config.num_users >= config.block_length)
        throw std::invalid_argument("tdd_baseline_rate: block too short for orthogonal uplink pilots");
    const double power = config.downlink_power();

    const arma::uword tau_lo = config.num_users;
    const arma::uword tau_hi = std::min<arma::uword>(config.block_length - 1, tau_lo + 56);

    double best_net = -arma::datum::inf;
    arma::uword best_tau = tau_lo;
    std::vector<arma::cx_mat> best_est, best_err;
    arma::vec warm;
    for (arma::uword tau = tau_lo; tau <= tau_hi; ++tau)
    {
        // Orthogonal pilots of length tau at the uplink SNR: effective pilot
        // energy rho = tau snr_ul, per-user error covariance R (I + rho R)^-1.
        const double rho = static_cast<double>(tau) * config.uplink_snr();
        std::vector<arma::cx_mat> est_covs, err_covs;
        est_covs.reserve(covs.size());
        err_covs.reserve(covs.size());
        for (const ChannelCovariance &cov : covs)
        {
            arma::cx_mat a = rho * cov.matrix();
            a.diag() += 1.0;
            const arma::cx_mat c = arma::solve(a, cov.matrix(), arma::solve_opts::likely_sympd);
            err_covs.push_back(0.5 * (c + c.t()));
            est_covs.push_back(0.5 * (cov.matrix() - c + (cov.matrix() - c).t()));
        }

        const double fraction = static_cast<double>(tau) / static_cast<double>(config.block_length);
        try
        {
            const DeRateResult de = de_rate(est_covs, covs, config.alpha, power, &warm);
            const double net = (1.0 - fraction) * de.rate;
            if (net > best_net)
            {
                best_net = net;
                best_tau = tau;
                best_est = est_covs;
                best_err = err_covs;
            }
        }
        catch (const ConvergenceError &)
        {
            warm.reset();
        }
    }
    if (best_est.empty())
        throw std::runtime_error("tdd_baseline_rate: rate evaluation failed on the whole tau grid");

    const double fraction = static_cast<double>(best_tau) / static_cast<double>(config.block_length);
    RateReport report;
    report.chosen_tau = best_tau;
    report.chosen_delta = 0.0;
    report.chosen_bits = 0.0;
    report.overhead_fraction = fraction;
    if (eval == RateEval::de)
    {
        const DeRateResult de = de_rate(best_est, covs, config.alpha, power, nullptr);
        report.per_user_sinr = de.sinr;
        report.gross_rate = de.rate;
    }
    else
    {
        const McRateResult mc =
            mc_rate(best_est, best_err, precoder_config(config), config.trials, config.seed);
        report.per_user_sinr = effective_sinr(mc.mean_user_rate);
        report.gross_rate = mc.mean_rate;
        report.net_rate_stderr = (1.0 - fraction) * mc.rate_stderr;
    }
    report.net_rate = (1.0 - fraction) * report.gross_rate;
    return report;
}

}  // namespace fddmimo
