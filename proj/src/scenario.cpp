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

#include "fddmimo/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace fddmimo
{

namespace
{

constexpr std::uint64_t kGeometryTag = 0x67656f6dULL;  // "geom"

std::string kind_name(ChannelModelKind k)
{
    switch (k)
    {
    case ChannelModelKind::one_ring:
        return "one_ring";
    case ChannelModelKind::laplacian:
        return "laplacian";
    case ChannelModelKind::iid:
        return "iid";
    }
    throw std::logic_error("unknown channel model");
}

ChannelModelKind kind_from_name(const std::string &s)
{
    if (s == "one_ring")
        return ChannelModelKind::one_ring;
    if (s == "laplacian")
        return ChannelModelKind::laplacian;
    if (s == "iid")
        return ChannelModelKind::iid;
    throw std::invalid_argument("scenario: unknown channel model '" + s + "'");
}

std::string feedback_name(FeedbackKind k)
{
    switch (k)
    {
    case FeedbackKind::klsq:
        return "klsq";
    case FeedbackKind::iso_rvq:
        return "iso_rvq";
    case FeedbackKind::skew_rvq:
        return "skew_rvq";
    }
    throw std::logic_error("unknown feedback kind");
}

FeedbackKind feedback_from_name(const std::string &s)
{
    if (s == "klsq")
        return FeedbackKind::klsq;
    if (s == "iso_rvq")
        return FeedbackKind::iso_rvq;
    if (s == "skew_rvq")
        return FeedbackKind::skew_rvq;
    throw std::invalid_argument("scenario: unknown feedback kind '" + s + "'");
}

std::string eval_name(RateEval e)
{
    switch (e)
    {
    case RateEval::de:
        return "de";
    case RateEval::mc:
        return "mc";
    case RateEval::both:
        return "both";
    }
    throw std::logic_error("unknown rate eval");
}

RateEval eval_from_name(const std::string &s)
{
    if (s == "de")
        return RateEval::de;
    if (s == "mc")
        return RateEval::mc;
    if (s == "both")
        return RateEval::both;
    throw std::invalid_argument("scenario: unknown rate evaluation '" + s + "'");
}

void validate(const ScenarioConfig &c)
{
    if (c.num_antennas < 1 || c.num_users < 1)
        throw std::invalid_argument("scenario: M and N must be positive");
    if (c.block_length < 2)
        throw std::invalid_argument("scenario: block length must be at least 2");
    if (c.trials < 1)
        throw std::invalid_argument("scenario: trials must be at least 1");
    if (c.alpha <= 0.0 || c.kappa <= 0.0 || c.kappa > 1.0)
        throw std::invalid_argument("scenario: alpha must be positive and kappa in (0, 1]");
    if (c.spacing <= 0.0 || c.spread_deg <= 0.0)
        throw std::invalid_argument("scenario: spacing and spread must be positive");
}

}  // namespace

double ScenarioConfig::downlink_power() const
{
    return std::pow(10.0, snr_dl_db / 10.0);
}

double ScenarioConfig::uplink_snr() const
{
    return std::pow(10.0, snr_ul_db / 10.0);
}

std::string scenario_to_json(const ScenarioConfig &c)
{
    validate(c);
    nlohmann::json j;
    j["m"] = c.num_antennas;
    j["n"] = c.num_users;
    j["t"] = c.block_length;
    j["snr_dl_db"] = c.snr_dl_db;
    j["snr_ul_db"] = c.snr_ul_db;
    j["alpha"] = c.alpha;
    j["kappa"] = c.kappa;
    j["channel_model"] = kind_name(c.channel_model);
    j["spacing"] = c.spacing;
    j["spread_deg"] = c.spread_deg;
    j["azimuths_deg"] = c.azimuths_deg;
    j["training"] = c.training == TrainingKind::optimized ? "optimized" : "unitary";
    j["feedback"] = {{"kind", feedback_name(c.feedback.kind)},
                     {"bits", c.feedback.bits},
                     {"dominant_rank", c.feedback.dominant_rank},
                     {"shaping_loss", c.feedback.shaping_loss}};
    j["rate_eval"] = eval_name(c.rate_eval);
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["fixed_tau"] = c.fixed_tau;
    j["fixed_delta"] = c.fixed_delta;
    return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string &text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    static const std::set<std::string> known = {
        "m", "n", "t", "snr_dl_db", "snr_ul_db", "alpha", "kappa", "channel_model", "spacing",
        "spread_deg", "azimuths_deg", "training", "feedback", "rate_eval", "trials", "seed",
        "fixed_tau", "fixed_delta"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (known.find(it.key()) == known.end())
            throw std::invalid_argument("scenario: unknown config key '" + it.key() + "'");

    ScenarioConfig c;
    if (j.contains("m")) c.num_antennas = j["m"].get<arma::uword>();
    if (j.contains("n")) c.num_users = j["n"].get<arma::uword>();
    if (j.contains("t")) c.block_length = j["t"].get<arma::uword>();
    if (j.contains("snr_dl_db")) c.snr_dl_db = j["snr_dl_db"].get<double>();
    if (j.contains("snr_ul_db")) c.snr_ul_db = j["snr_ul_db"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
    if (j.contains("channel_model")) c.channel_model = kind_from_name(j["channel_model"].get<std::string>());
    if (j.contains("spacing")) c.spacing = j["spacing"].get<double>();
    if (j.contains("spread_deg")) c.spread_deg = j["spread_deg"].get<double>();
    if (j.contains("azimuths_deg")) c.azimuths_deg = j["azimuths_deg"].get<std::vector<double>>();
    if (j.contains("training"))
    {
        const std::string t = j["training"].get<std::string>();
        if (t == "optimized")
            c.training = TrainingKind::optimized;
        else if (t == "unitary")
            c.training = TrainingKind::unitary;
        else
            throw std::invalid_argument("scenario: unknown training kind '" + t + "'");
    }
    if (j.contains("feedback"))
    {
        const nlohmann::json &f = j["feedback"];
        if (f.contains("kind")) c.feedback.kind = feedback_from_name(f["kind"].get<std::string>());
        if (f.contains("bits")) c.feedback.bits = f["bits"].get<double>();
        if (f.contains("dominant_rank")) c.feedback.dominant_rank = f["dominant_rank"].get<arma::uword>();
        if (f.contains("shaping_loss")) c.feedback.shaping_loss = f["shaping_loss"].get<double>();
    }
    if (j.contains("rate_eval")) c.rate_eval = eval_from_name(j["rate_eval"].get<std::string>());
    if (j.contains("trials")) c.trials = j["trials"].get<arma::uword>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("fixed_tau")) c.fixed_tau = j["fixed_tau"].get<arma::uword>();
    if (j.contains("fixed_delta")) c.fixed_delta = j["fixed_delta"].get<arma::uword>();
    validate(c);
    return c;
}

std::string scenario_hash(const ScenarioConfig &config)
{
    const std::string canon = scenario_to_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : canon)
    {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::vector<ChannelCovariance> build_user_covariances(const ScenarioConfig &config)
{
    validate(config);
    std::vector<ChannelCovariance> covs;
    covs.reserve(config.num_users);
    const double deg = M_PI / 180.0;
    for (arma::uword u = 0; u < config.num_users; ++u)
    {
        if (config.channel_model == ChannelModelKind::iid)
        {
            covs.push_back(ChannelCovariance::identity(config.num_antennas));
            continue;
        }
        UserGeometry g;
        g.antenna_spacing = config.spacing;
        g.angular_spread = config.spread_deg * deg;
        if (!config.azimuths_deg.empty())
        {
            g.azimuth = config.azimuths_deg[u % config.azimuths_deg.size()] * deg;
        }
        else
        {
            StreamRng rng = StreamRng::stream(config.seed, kGeometryTag, 0, u);
            g.azimuth = rng.uniform(-60.0 * deg, 60.0 * deg);
        }
        covs.push_back(config.channel_model == ChannelModelKind::one_ring
                           ? one_ring_ccm(g, config.num_antennas)
                           : laplacian_ccm(g, config.num_antennas));
    }
    return covs;
}

}  // namespace fddmimo
