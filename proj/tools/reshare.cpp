#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reshare/report.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// A config file embeds a scenario; a bare scenario file is also accepted
// wherever only the scenario matters.
reshare::Scenario scenario_from_path(const std::string& path) {
    std::string text = read_file(path);
    auto j = nlohmann::json::parse(text);
    if (j.contains("scenario") || j.contains("scenario_file")) {
        std::string base = std::filesystem::path(path).parent_path().string();
        reshare::ExperimentConfig config = reshare::load_config(text, base);
        return *config.scenario;
    }
    return reshare::load_scenario(text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized resource-sharing simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, algorithm, L_flag;
    long long horizon = -1;
    int seeds = -1;
    std::vector<std::string> run_dirs;

    CLI::App* run = app.add_subcommand("run", "run a multi-seed experiment");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seeds", seeds, "override: number of independent episodes");
    run->add_option("--horizon", horizon, "override: slots per episode");
    run->add_option("--algorithm", algorithm, "override: dloe|dlc|oracle|random");
    run->add_option("--L", L_flag, "override: exploration constant (number, \"log\", or \"pow\")");
    run->add_option("--out", out_dir, "output directory");

    CLI::App* analyze = app.add_subcommand("analyze", "print scenario constants as JSON");
    analyze->add_option("--config", config_path, "scenario or experiment config (JSON)")
        ->required();

    CLI::App* plotdata = app.add_subcommand("plotdata", "emit regret-over-log-t series");
    plotdata->add_option("dirs", run_dirs, "run output directories")->expected(-1);
    plotdata->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::string base = std::filesystem::path(config_path).parent_path().string();
            reshare::ExperimentConfig config = reshare::load_config(read_file(config_path), base);
            if (seeds >= 0) config.seeds = seeds;
            if (horizon >= 0) config.horizon = horizon;
            if (!algorithm.empty()) config.algorithm = reshare::algorithm_from_name(algorithm);
            if (!L_flag.empty()) config.run.block.L = reshare::schedule_from_text(L_flag);
            return reshare::cmd_run(config, reshare::resolve_out_dir(out_dir, &config), std::cout);
        }
        if (analyze->parsed()) {
            return reshare::cmd_analyze(scenario_from_path(config_path), std::cout);
        }
        return reshare::cmd_plotdata(run_dirs, reshare::resolve_out_dir(out_dir, nullptr),
                                     std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
