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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fddmimo/harness.hpp"

namespace fddmimo
{

namespace
{

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void push(std::vector<ResultRow> &rows, const std::string &scenario, const std::string &metric, double x,
          double y, double stderr_y = 0.0, const std::string &units = "")
{
    rows.push_back(ResultRow{scenario, metric, x, y, stderr_y, units});
}

void emit_report(std::vector<ResultRow> &rows, const std::string &hash, double x, const RateReport &report,
                 const std::string &suffix, bool with_stderr)
{
    push(rows, hash, "net_rate" + suffix, x, report.net_rate, with_stderr ? report.net_rate_stderr : 0.0,
         "bit/cu");
    push(rows, hash, "gross_rate" + suffix, x, report.gross_rate, 0.0, "bit/cu");
    for (arma::uword k = 0; k < report.per_user_sinr.n_elem; ++k)
        push(rows, hash, "sinr" + suffix + "_user" + std::to_string(k), x, report.per_user_sinr(k), 0.0,
             "linear");
}

ScenarioConfig recipe_base(std::uint64_t seed, arma::uword trials)
{
    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;
    return cfg;
}

std::string write_recipe_csv(const std::string &out_dir, const std::string &name,
                             const std::vector<ResultRow> &rows)
{
    std::filesystem::create_directories(out_dir);
    const std::string path = (std::filesystem::path(out_dir) / (name + ".csv")).string();
    write_csv(path, rows);
    return path;
}

// Feedback-process error: total MSE minus what downlink training already lost.
double feedback_only_mse(const PipelineStats &stats)
{
    return stats.feedback_mse - stats.training_mse;
}

std::vector<std::string> reproduce_fig1(const std::string &out_dir, std::uint64_t seed)
{
    struct Series
    {
        const char *label;
        ChannelModelKind model;
        double spacing;
        double spread_deg;
    };
    const Series series[] = {
        {"one_ring_d05_s10", ChannelModelKind::one_ring, 0.5, 10.0},
        {"one_ring_d05_s20", ChannelModelKind::one_ring, 0.5, 20.0},
        {"one_ring_d2_s10", ChannelModelKind::one_ring, 2.0, 10.0},
        {"laplacian_d05_s10", ChannelModelKind::laplacian, 0.5, 10.0},
        {"laplacian_d05_s20", ChannelModelKind::laplacian, 0.5, 20.0},
        {"laplacian_d2_s10", ChannelModelKind::laplacian, 2.0, 10.0},
    };
    std::vector<ResultRow> rows;
    for (const Series &s : series)
    {
        ScenarioConfig cfg = recipe_base(seed, 1);
        cfg.num_antennas = 50;
        cfg.num_users = 16;  // aggregate the spectrum over a population of users
        cfg.channel_model = s.model;
        cfg.spacing = s.spacing;
        cfg.spread_deg = s.spread_deg;
        const std::string hash = scenario_hash(cfg);
        arma::vec all;
        for (const ChannelCovariance &cov : build_user_covariances(cfg))
            all = arma::join_cols(all, cov.eigenvalues());
        all = arma::sort(all);
        for (arma::uword i = 0; i < all.n_elem; ++i)
            push(rows, hash, std::string("cdf_") + s.label, all(i),
                 static_cast<double>(i + 1) / static_cast<double>(all.n_elem));
    }
    return {write_recipe_csv(out_dir, "fig1_cdf", rows)};
}

std::vector<std::string> reproduce_fig2(const std::string &out_dir, std::uint64_t seed, arma::uword trials,
                                        RateEval eval)
{
    std::vector<ResultRow> rows;
    for (const arma::uword m : {20, 40, 60, 80, 100})
    {
        const double x = static_cast<double>(m);
        ScenarioConfig corr = recipe_base(seed, trials);
        corr.num_antennas = m;
        {
            const RateReport r = optimize_net_rate(corr, eval);
            push(rows, scenario_hash(corr), "net_rate_fdd_onering", x, r.net_rate, r.net_rate_stderr,
                 "bit/cu");
            push(rows, scenario_hash(corr), "chosen_tau_fdd_onering", x, static_cast<double>(r.chosen_tau));
            push(rows, scenario_hash(corr), "chosen_delta_fdd_onering", x, r.chosen_delta);
        }
        ScenarioConfig iid = corr;
        iid.channel_model = ChannelModelKind::iid;
        iid.training = TrainingKind::unitary;
        {
            const RateReport r = optimize_net_rate(iid, eval);
            push(rows, scenario_hash(iid), "net_rate_fdd_iid", x, r.net_rate, r.net_rate_stderr, "bit/cu");
        }
        ScenarioConfig tdd = corr;
        {
            const RateReport r = tdd_baseline_rate(tdd, eval);
            push(rows, scenario_hash(tdd), "net_rate_tdd", x, r.net_rate, r.net_rate_stderr, "bit/cu");
        }
        ScenarioConfig tdd_matched = corr;
        tdd_matched.snr_ul_db = tdd_matched.snr_dl_db;
        {
            const RateReport r = tdd_baseline_rate(tdd_matched, eval);
            push(rows, scenario_hash(tdd_matched), "net_rate_tdd_matched_ul", x, r.net_rate,
                 r.net_rate_stderr, "bit/cu");
        }
    }
    return {write_recipe_csv(out_dir, "fig2_tdd_fdd", rows)};
}

std::vector<std::string> reproduce_fig4(const std::string &out_dir, std::uint64_t seed, arma::uword trials,
                                        RateEval eval)
{
    std::vector<ResultRow> rows;
    for (const arma::uword m : {20, 40, 60, 80, 100})
    {
        const double x = static_cast<double>(m);
        ScenarioConfig opt = recipe_base(seed, trials);
        opt.num_antennas = m;  // covariance-aware training + KL-transform feedback
        {
            const RateReport r = optimize_net_rate(opt, eval);
            push(rows, scenario_hash(opt), "net_rate_eigenspace", x, r.net_rate, r.net_rate_stderr,
                 "bit/cu");
        }
        ScenarioConfig plain = opt;  // covariance-blind training, isotropic codebook
        plain.training = TrainingKind::unitary;
        plain.feedback.kind = FeedbackKind::iso_rvq;
        plain.feedback.dominant_rank = 0;  // rank re-optimized per user
        {
            const RateReport r = optimize_net_rate(plain, eval);
            push(rows, scenario_hash(plain), "net_rate_unitary", x, r.net_rate, r.net_rate_stderr,
                 "bit/cu");
        }
    }
    return {write_recipe_csv(out_dir, "fig4_opt_vs_unitary", rows)};
}

std::vector<std::string> reproduce_fig5(const std::string &out_dir, std::uint64_t seed)
{
    ScenarioConfig cfg = recipe_base(seed, 1);
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const std::string hash = scenario_hash(cfg);
    std::vector<ResultRow> rows;
    for (arma::uword tau = 1; tau <= 30; ++tau)
    {
        const TrainingOptimization opt = optimize_training(covs, tau, cfg.downlink_power());
        push(rows, hash, "training_mse_optimized", static_cast<double>(tau),
             total_training_mse(covs, opt.design));
        push(rows, hash, "training_cmi_optimized", static_cast<double>(tau), opt.cmi, 0.0, "bit");
        const TrainingDesign uni = unitary_training(cfg.num_antennas, tau, cfg.downlink_power());
        push(rows, hash, "training_mse_unitary", static_cast<double>(tau), total_training_mse(covs, uni));
    }
    return {write_recipe_csv(out_dir, "fig5_training_mse", rows)};
}

std::vector<std::string> reproduce_fig6(const std::string &out_dir, std::uint64_t seed)
{
    ScenarioConfig cfg = recipe_base(seed, 1);
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const TrainingDesign design = make_training_design(cfg, covs, cfg.num_antennas);
    const std::string hash = scenario_hash(cfg);
    std::vector<ResultRow> rows;
    for (arma::uword delta = 1; delta <= 12; ++delta)
    {
        const double x = static_cast<double>(delta);
        const double bits = bits_for_overhead(x, OverheadModel{cfg.kappa, cfg.uplink_snr(), cfg.block_length},
                                              cfg.num_antennas, cfg.num_users);
        ScenarioConfig c = cfg;

        c.feedback = FeedbackScheme{FeedbackKind::klsq, bits, 2, 0.0};
        push(rows, hash, "feedback_mse_klsq", x, feedback_only_mse(fdd_pipeline(c, covs, design, bits)));

        c.feedback = FeedbackScheme{FeedbackKind::klsq, bits, 2, 0.75};
        push(rows, hash, "feedback_mse_klsq_shaping", x,
             feedback_only_mse(fdd_pipeline(c, covs, design, bits)));

        c.feedback = FeedbackScheme{FeedbackKind::iso_rvq, bits, 0, 0.0};
        push(rows, hash, "feedback_mse_iso_rvq", x, feedback_only_mse(fdd_pipeline(c, covs, design, bits)));

        c.feedback = FeedbackScheme{FeedbackKind::skew_rvq, bits, 0, 0.0};
        push(rows, hash, "feedback_mse_skew_rvq", x, feedback_only_mse(fdd_pipeline(c, covs, design, bits)));
    }
    return {write_recipe_csv(out_dir, "fig6_sq_vq", rows)};
}

std::vector<std::string> reproduce_fig7(const std::string &out_dir, std::uint64_t seed)
{
    ScenarioConfig cfg = recipe_base(seed, 1);
    const std::vector<ChannelCovariance> covs = build_user_covariances(cfg);
    const TrainingDesign design = make_training_design(cfg, covs, cfg.num_antennas);
    const std::string hash = scenario_hash(cfg);
    std::vector<ResultRow> rows;
    for (const arma::uword delta : {2, 4, 8})
    {
        const double bits =
            bits_for_overhead(static_cast<double>(delta),
                              OverheadModel{cfg.kappa, cfg.uplink_snr(), cfg.block_length},
                              cfg.num_antennas, cfg.num_users);
        for (arma::uword rank = 2; rank <= cfg.num_antennas; ++rank)
        {
            ScenarioConfig c = cfg;
            c.feedback = FeedbackScheme{FeedbackKind::iso_rvq, bits, rank, 0.0};
            push(rows, hash, "feedback_mse_iso_rvq_delta" + std::to_string(delta),
                 static_cast<double>(rank), feedback_only_mse(fdd_pipeline(c, covs, design, bits)));
            c.feedback.kind = FeedbackKind::skew_rvq;
            push(rows, hash, "feedback_mse_skew_rvq_delta" + std::to_string(delta),
                 static_cast<double>(rank), feedback_only_mse(fdd_pipeline(c, covs, design, bits)));
        }
    }
    return {write_recipe_csv(out_dir, "fig7_rank_tradeoff", rows)};
}

std::vector<std::string> reproduce_fig8(const std::string &out_dir, std::uint64_t seed, arma::uword trials,
                                        RateEval eval)
{
    std::vector<ResultRow> rows;
    for (const arma::uword t : {100, 200, 500})
    {
        const double x = static_cast<double>(t);
        ScenarioConfig corr = recipe_base(seed, trials);
        corr.num_antennas = 100;
        corr.block_length = t;
        const RateReport rc = optimize_net_rate(corr, eval);
        push(rows, scenario_hash(corr), "net_rate_onering", x, rc.net_rate, rc.net_rate_stderr, "bit/cu");

        ScenarioConfig iid = corr;
        iid.channel_model = ChannelModelKind::iid;
        iid.training = TrainingKind::unitary;
        const RateReport ri = optimize_net_rate(iid, eval);
        push(rows, scenario_hash(iid), "net_rate_iid", x, ri.net_rate, ri.net_rate_stderr, "bit/cu");
        push(rows, scenario_hash(corr), "rate_gain_diff", x, rc.net_rate - ri.net_rate, 0.0, "bit/cu");
        push(rows, scenario_hash(corr), "rate_gain_ratio", x,
             ri.net_rate > 0.0 ? rc.net_rate / ri.net_rate : 0.0);
    }
    return {write_recipe_csv(out_dir, "fig8_blocklength", rows)};
}

}  // namespace

std::vector<ResultRow> run_scenario(const ScenarioConfig &config)
{
    const std::string hash = scenario_hash(config);
    const double x = static_cast<double>(config.num_antennas);
    std::vector<ResultRow> rows;

    const bool fixed = config.fixed_tau > 0 && config.fixed_delta > 0;
    RateReport de_report;
    bool have_de = false;
    if (config.rate_eval != RateEval::mc)
    {
        de_report = fixed ? evaluate_net_rate(config, config.fixed_tau, config.fixed_delta, RateEval::de)
                          : optimize_net_rate(config, RateEval::de);
        have_de = true;
        emit_report(rows, hash, x, de_report, "_de", false);
    }
    if (config.rate_eval != RateEval::de)
    {
        RateReport mc_report;
        if (have_de)
            mc_report = evaluate_net_rate(config, de_report.chosen_tau,
                                          static_cast<arma::uword>(de_report.chosen_delta), RateEval::mc);
        else
            mc_report = fixed ? evaluate_net_rate(config, config.fixed_tau, config.fixed_delta, RateEval::mc)
                              : optimize_net_rate(config, RateEval::mc);
        emit_report(rows, hash, x, mc_report, "_mc", true);
        if (!have_de)
            de_report = mc_report;  // reuse the chosen operating point below
    }

    push(rows, hash, "chosen_tau", x, static_cast<double>(de_report.chosen_tau), 0.0, "symbol");
    push(rows, hash, "chosen_delta", x, de_report.chosen_delta, 0.0, "symbol");
    push(rows, hash, "chosen_bits", x, de_report.chosen_bits, 0.0, "bit");
    push(rows, hash, "overhead_fraction", x, de_report.overhead_fraction);

    const std::vector<ChannelCovariance> covs = build_user_covariances(config);
    const TrainingDesign design = make_training_design(config, covs, de_report.chosen_tau);
    const PipelineStats stats = fdd_pipeline(config, covs, design, de_report.chosen_bits);
    push(rows, hash, "training_mse", x, stats.training_mse);
    push(rows, hash, "feedback_mse", x, feedback_only_mse(stats));
    return rows;
}

std::vector<std::string> reproduce(const std::string &figure_id, const std::string &out_dir,
                                   std::uint64_t seed, arma::uword trials, RateEval eval)
{
    if (figure_id == "fig1_cdf")
        return reproduce_fig1(out_dir, seed);
    if (figure_id == "fig2_tdd_fdd")
        return reproduce_fig2(out_dir, seed, trials, eval);
    if (figure_id == "fig4_opt_vs_unitary")
        return reproduce_fig4(out_dir, seed, trials, eval);
    if (figure_id == "fig5_training_mse")
        return reproduce_fig5(out_dir, seed);
    if (figure_id == "fig6_sq_vq")
        return reproduce_fig6(out_dir, seed);
    if (figure_id == "fig7_rank_tradeoff")
        return reproduce_fig7(out_dir, seed);
    if (figure_id == "fig8_blocklength")
        return reproduce_fig8(out_dir, seed, trials, eval);
    throw std::invalid_argument("reproduce: unknown figure id '" + figure_id + "'");
}

void write_csv(const std::string &path, const std::vector<ResultRow> &rows)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_csv: cannot open " + path);
    out << "scenario,metric,x,y,stderr,units\n";
    for (const ResultRow &row : rows)
        out << row.scenario << ',' << row.metric << ',' << fmt(row.x) << ',' << fmt(row.y) << ','
            << fmt(row.stderr_y) << ',' << row.units << '\n';
    if (!out.good())
        throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace fddmimo
