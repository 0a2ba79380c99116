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

// Structural invariant battery behind `fddmimo validate`. Each check is a
// cheap end-to-end property of the pipeline; the full battery runs in well
// under a minute.

#include <functional>
#include <ostream>
#include <sstream>

#include "fddmimo/harness.hpp"

namespace fddmimo
{

namespace
{

bool hermitian(const arma::cx_mat &m, double tol = 1e-10)
{
    return arma::norm(m - m.t(), "fro") <= tol * std::max(1.0, arma::norm(m, "fro"));
}

bool psd(const arma::cx_mat &m, double tol = 1e-9)
{
    const arma::vec ev = arma::eig_sym(0.5 * (m + m.t()));
    return ev.min() >= -tol * std::max(1.0, ev.max());
}

struct Battery
{
    std::ostream &out;
    int failures = 0;

    void check(const std::string &name, bool ok)
    {
        out << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok)
            ++failures;
    }
};

}  // namespace

int run_validation(std::ostream &out)
{
    Battery b{out};
    const arma::uword m = 16;
    const UserGeometry geom{0.3, 10.0 * arma::datum::pi / 180.0, 0.5};

    // --- channel model ---
    const ChannelCovariance ring = one_ring_ccm(geom, m);
    const ChannelCovariance lap = laplacian_ccm(geom, m);
    b.check("one_ring covariance is Hermitian", hermitian(ring.matrix()));
    b.check("one_ring covariance is PSD", psd(ring.matrix()));
    b.check("one_ring unit antenna gain",
            arma::abs(ring.matrix().diag() - 1.0).max() < 1e-9);
    b.check("laplacian covariance is Hermitian", hermitian(lap.matrix()));
    b.check("laplacian covariance is PSD", psd(lap.matrix()));
    b.check("laplacian antenna gain accounts for the truncated window",
            std::abs(lap.matrix()(0, 0)) <= 1.0 + 1e-9 &&
                std::abs(lap.matrix()(0, 0).real() - 1.0) < 1e-3);
    b.check("eigenvalues sorted descending",
            ring.eigenvalues().is_sorted("descend") && lap.eigenvalues().is_sorted("descend"));
    b.check("trace preserved by eigendecomposition",
            std::abs(arma::accu(ring.eigenvalues()) - arma::trace(ring.matrix()).real()) < 1e-8);

    // --- training ---
    std::vector<ChannelCovariance> covs;
    for (int u = 0; u < 4; ++u)
        covs.push_back(one_ring_ccm(UserGeometry{-0.8 + 0.5 * u, geom.angular_spread, 0.5}, m));
    const double power = 100.0;
    for (const arma::uword tau : {3, 8, 16, 20})
    {
        const TrainingOptimization opt = optimize_training(covs, tau, power);
        std::ostringstream tag;
        tag << "tau=" << tau;
        b.check("optimized training meets the power budget exactly (" + tag.str() + ")",
                std::abs(opt.design.power_used() - opt.design.power_budget) <
                    1e-8 * opt.design.power_budget);
        const TrainingDesign uni = unitary_training(m, tau, power);
        b.check("unitary training meets the power budget exactly (" + tag.str() + ")",
                std::abs(uni.power_used() - uni.power_budget) < 1e-8 * uni.power_budget);
        b.check("optimized design beats unitary on conditional information (" + tag.str() + ")",
                cmi_objective(covs, opt.design) >= cmi_objective(covs, uni) - 1e-6);
        const arma::cx_mat err = training_error_covariance(covs[0], opt.design);
        b.check("training error covariance Hermitian PSD (" + tag.str() + ")",
                hermitian(err) && psd(err));
        b.check("training error bounded by the prior (" + tag.str() + ")",
                psd(covs[0].matrix() - err, 1e-8));
    }

    // --- feedback ---
    const arma::vec lam = {7.5, 4.0, 2.5, 1.25, 1.0, 0.6, 0.33, 0.2, 0.11, 0.05, 0.02, 0.01};
    for (const double bits : {0.5, 3.0, 9.0, 20.0})
    {
        const RwfAllocation rwf = rwf_allocate(lam, bits);
        std::ostringstream tag;
        tag << "B=" << bits;
        b.check("rwf bits sum to the budget (" + tag.str() + ")",
                std::abs(rwf.total_bits - bits) < 1e-8);
        bool prefix_ok = true;
        bool seen_zero = false;
        for (arma::uword i = 0; i < lam.n_elem; ++i)
        {
            if (rwf.bits(i) <= 0.0)
                seen_zero = true;
            else if (seen_zero)
                prefix_ok = false;
        }
        b.check("rwf active set is a prefix (" + tag.str() + ")", prefix_ok);
        b.check("rwf distortions are min(level, variance) (" + tag.str() + ")",
                arma::abs(rwf.distortions - arma::min(lam, arma::vec(lam.n_elem).fill(rwf.water_level)))
                        .max() < 1e-9);
    }

    ScenarioConfig small;
    small.num_antennas = m;
    small.num_users = 4;
    small.trials = 8;
    small.rate_eval = RateEval::both;
    small.fixed_tau = 8;
    small.fixed_delta = 4;
    const std::vector<ChannelCovariance> ucovs = build_user_covariances(small);
    const TrainingDesign design = make_training_design(small, ucovs, small.fixed_tau);
    for (const FeedbackKind kind : {FeedbackKind::klsq, FeedbackKind::iso_rvq, FeedbackKind::skew_rvq})
    {
        ScenarioConfig c = small;
        c.feedback.kind = kind;
        c.feedback.dominant_rank = 3;
        const PipelineStats stats = fdd_pipeline(c, ucovs, design, 12.0);
        const std::string tag = kind == FeedbackKind::klsq    ? "klsq"
                                : kind == FeedbackKind::iso_rvq ? "iso_rvq"
                                                                : "skew_rvq";
        bool ok_err = true, ok_est = true, ok_sum = true;
        for (arma::uword u = 0; u < ucovs.size(); ++u)
        {
            ok_err = ok_err && hermitian(stats.error_covariances[u]) && psd(stats.error_covariances[u]);
            ok_est = ok_est && hermitian(stats.estimate_covariances[u]) && psd(stats.estimate_covariances[u]);
            // The model identity holds on the raw bundle; the pipeline then
            // publishes the PSD-clipped estimate covariance.
            TrainingEstimate training;
            training.error_covariance = training_error_covariance(ucovs[u], design);
            const EstimateBundle bundle =
                kind == FeedbackKind::klsq
                    ? klsq_feedback(ucovs[u], training, 12.0)
                    : kind == FeedbackKind::iso_rvq
                          ? iso_rvq_feedback(ucovs[u], training, 12.0, c.feedback.dominant_rank)
                          : skewed_rvq_feedback(ucovs[u], training, 12.0, c.feedback.dominant_rank);
            ok_sum = ok_sum && arma::norm(bundle.estimate_covariance + bundle.error_covariance -
                                              ucovs[u].matrix(),
                                          "fro") < 1e-8;
        }
        b.check("feedback error covariance Hermitian PSD (" + tag + ")", ok_err);
        b.check("published estimate covariance Hermitian PSD (" + tag + ")", ok_est);
        b.check("estimate and error covariances sum to the prior (" + tag + ")", ok_sum);
        b.check("feedback adds error on top of training (" + tag + ")",
                stats.feedback_mse >= stats.training_mse - 1e-9);
    }

    // --- precoding ---
    {
        StreamRng rng = StreamRng::stream(7, 0x70726563ULL);
        const arma::cx_mat est = rng.cgaussian_mat(4, m);
        PrecoderConfig pc;
        pc.num_users = 4;
        const Precoder w = rzf_precode(est, pc);
        b.check("rzf satisfies the transmit power normalization",
                std::abs(arma::accu(arma::square(arma::abs(w.weights))) - static_cast<double>(pc.num_users)) <
                    1e-8 * static_cast<double>(pc.num_users));
        const OverheadModel oh;
        const double bits = 17.0;
        b.check("overhead maps are mutually inverse",
                std::abs(bits_for_overhead(feedback_overhead(bits, oh, m, 4), oh, m, 4) - bits) < 1e-9);
    }

    // --- deterministic equivalent + report consistency ---
    {
        std::vector<arma::cx_mat> est_covs;
        for (const ChannelCovariance &cov : ucovs)
            est_covs.push_back(cov.matrix());
        const DeRateResult de = de_rate(est_covs, ucovs, small.alpha, small.downlink_power());
        b.check("de sinr positive for perfect-csit input", de.sinr.min() > 0.0);
        const RateReport rep = evaluate_net_rate(small, small.fixed_tau, small.fixed_delta, RateEval::de);
        b.check("net rate equals (1 - overhead) x sum log2(1 + sinr)",
                std::abs(rep.net_rate -
                         (1.0 - rep.overhead_fraction) * sum_rate(rep.per_user_sinr)) < 1e-9);
    }

    // --- reproducibility ---
    {
        const std::vector<ResultRow> a = run_scenario(small);
        const std::vector<ResultRow> b2 = run_scenario(small);
        bool same = a.size() == b2.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].scenario == b2[i].scenario && a[i].metric == b2[i].metric && a[i].x == b2[i].x &&
                   a[i].y == b2[i].y && a[i].stderr_y == b2[i].stderr_y;
        b.check("run_scenario is bit-identical across repeated runs", same);
        bool stderr_present = true;
        for (const ResultRow &row : a)
            if (row.metric == "net_rate_mc" && !(row.stderr_y > 0.0))
                stderr_present = false;
        b.check("monte carlo metrics carry standard errors", stderr_present);
    }

    out << (b.failures == 0 ? "all checks passed\n" : "some checks FAILED\n");
    return b.failures;
}

}  // namespace fddmimo
