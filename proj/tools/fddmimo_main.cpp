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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fddmimo/harness.hpp"

namespace
{

fddmimo::RateEval parse_eval(const std::string &name)
{
    if (name == "mc")
        return fddmimo::RateEval::mc;
    if (name == "de")
        return fddmimo::RateEval::de;
    if (name == "both")
        return fddmimo::RateEval::both;
    throw CLI::ValidationError("--eval must be one of mc, de, both");
}

std::string slurp(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"FDD massive MIMO training/feedback/precoding simulator"};
    app.require_subcommand(1);

    std::string config_path, figure_id;
    std::string out_dir = ".";
    std::string eval_name;
    std::uint64_t seed = 0;
    bool seed_set = false, trials_set = false;
    std::uint64_t trials = 2000;

    CLI::App *run = app.add_subcommand("run", "Run one scenario from a JSON config file");
    run->add_option("config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);

    CLI::App *rep = app.add_subcommand("reproduce", "Write the data files for a named figure recipe");
    rep->add_option("figure_id", figure_id,
                    "One of: fig1_cdf fig2_tdd_fdd fig4_opt_vs_unitary fig5_training_mse "
                    "fig6_sq_vq fig7_rank_tradeoff fig8_blocklength")
        ->required();

    CLI::App *val = app.add_subcommand("validate", "Run the structural invariant battery");

    for (CLI::App *sub : {run, rep})
    {
        sub->add_option("--seed", seed, "Override the random seed")->each([&](const std::string &) {
            seed_set = true;
        });
        sub->add_option("--trials", trials, "Override the Monte Carlo trial count")
            ->each([&](const std::string &) { trials_set = true; });
        sub->add_option("--out", out_dir, "Output directory for CSV files");
        sub->add_option("--eval", eval_name, "Rate evaluation: mc, de or both");
    }

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            fddmimo::ScenarioConfig cfg = fddmimo::scenario_from_json(slurp(config_path));
            if (seed_set)
                cfg.seed = seed;
            if (trials_set)
                cfg.trials = trials;
            if (!eval_name.empty())
                cfg.rate_eval = parse_eval(eval_name);
            const std::vector<fddmimo::ResultRow> rows = fddmimo::run_scenario(cfg);
            std::filesystem::create_directories(out_dir);
            const std::string path =
                (std::filesystem::path(out_dir) / (fddmimo::scenario_hash(cfg) + ".csv")).string();
            fddmimo::write_csv(path, rows);
            for (const fddmimo::ResultRow &row : rows)
                std::cout << row.metric << " = " << row.y
                          << (row.stderr_y > 0.0 ? " +/- " + std::to_string(row.stderr_y) : "") << '\n';
            std::cout << "wrote " << path << '\n';
        }
        else if (*rep)
        {
            const fddmimo::RateEval eval = eval_name.empty() ? fddmimo::RateEval::de : parse_eval(eval_name);
            const std::vector<std::string> files =
                fddmimo::reproduce(figure_id, out_dir, seed_set ? seed : 1, trials_set ? trials : 2000, eval);
            for (const std::string &f : files)
                std::cout << "wrote " << f << '\n';
        }
        else if (*val)
        {
            return fddmimo::run_validation(std::cout) == 0 ? 0 : 1;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
