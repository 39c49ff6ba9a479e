#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reshare/engine.hpp"
#include "reshare/report.hpp"
#include "reshare/rng.hpp"
#include "reshare/scenario.hpp"

using namespace reshare;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("RESHARE_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string config_dir() {
    const char* p = std::getenv("RESHARE_CONFIG_DIR");
    REQUIRE(p != nullptr);
    return p;
}

std::string q(const std::string& s) { return "\"" + s + "\""; }

int run_cmd(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string write_text(const std::string& dir, const std::string& name, const std::string& text) {
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    REQUIRE(out.good());
    return path;
}

// same stochastic setup the engine suite uses; optimum (1,1)
Scenario coin_scenario() {
    Scenario s("coin", 2, 2, false);
    s.add_iid_resource({0.5, 0.5});
    s.add_iid_resource({0.3, 0.7});
    s.set_reward(0, 0, 1, 0.2);
    s.set_reward(0, 0, 2, 0.1);
    s.set_reward(0, 1, 1, 0.8);
    s.set_reward(0, 1, 2, 0.4);
    s.set_reward(1, 0, 1, 0.3);
    s.set_reward(1, 0, 2, 0.2);
    s.set_reward(1, 1, 1, 0.6);
    s.set_reward(1, 1, 2, 0.5);
    return s;
}

std::string write_tiny_config(const std::string& dir, json overrides) {
    json c;
    c["scenario"] = json::parse(scenario_json(coin_scenario()));
    c["algorithm"] = "dloe";
    c["a"] = 2;
    c["b"] = 4;
    c["c"] = 4;
    c["L"] = 1;
    c["horizon"] = 300;
    c["seeds"] = 2;
    c["master_seed"] = 3;
    c["costs"] = {{"cmp", 2.0}};
    c["checkpoints"] = {50, 150, 300};
    for (auto& [key, value] : overrides.items()) c[key] = value;
    return write_text(dir, "config.json", c.dump(2) + "\n");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

json analyze(const std::string& config_path) {
    std::string dir = oracles::fresh_dir("cli-analyze");
    std::string out = dir + "/analyze.json";
    int code = run_cmd(q(cli_path()) + " analyze --config " + q(config_path) + " > " + q(out));
    REQUIRE(code == 0);
    return json::parse(oracles::read_file(out));
}

}  // namespace

TEST_CASE("analyze prints the frozen grid constants") {
    json j = analyze(config_dir() + "/osa_3x3.json");
    CHECK(j["scenario"]["users"] == 3);
    CHECK(j["scenario"]["resources"] == 3);
    CHECK(j["scenario"]["user_specific"] == false);
    CHECK(j["scenario"]["has_markov"] == false);

    const double grid[3][3] = {
        {0.08078007814753613, 0.05647984131430013, 0.04421992185246387},
        {0.2882859682197748, 0.20594214324379906, 0.16488552910061943},
        {0.2, 0.11239637567217929, 0.08260383482898467},
    };
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 3; ++n)
            CHECK(j["means"][static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]
                      .get<double>() == grid[k][n]);

    CHECK(j["gap"]["v_star"].get<double>() == 0.6118842864875982);
    CHECK(j["gap"]["delta_min"].get<double>() == 0.04281824012028723);
    CHECK(j["gap"]["epsilon"].get<double>() == 0.007136373353381205);
    CHECK(j["gap"]["epsilon_half_gap"].get<double>() == 0.021409120060143616);
    CHECK(j["gap"]["best_allocations"] == json::parse("[[0,2,1]]"));
    CHECK(j["o_b"].get<double>() == 3.0);
    CHECK(j["exploration_constants"]["L_iid"].get<double>() == 19636.0);
    CHECK(j["exploration_constants"]["L_iid_half_gap"].get<double>() == 2182.0);
    CHECK_FALSE(j.contains("markov_bounds"));
}

TEST_CASE("analyze reports chain constants for the two-chain setup") {
    std::string path = config_dir() + "/markov_dlc_m2k2.json";
    json j = analyze(path);
    CHECK(j["scenario"]["user_specific"] == true);
    CHECK(j["scenario"]["has_markov"] == true);
    CHECK(std::abs(j["gap"]["v_star"].get<double>() - 0.45) < 1e-12);
    CHECK(std::abs(j["gap"]["delta_min"].get<double>() - 0.25) < 1e-12);
    CHECK(std::abs(j["gap"]["epsilon"].get<double>() - 0.0625) < 1e-12);
    CHECK(j["gap"]["best_assignments"] == json::parse("[[0,1]]"));
    CHECK(j["o_b"].get<double>() == 2.0);
    CHECK(j["exploration_constants"]["L_iid"].get<double>() == 256.0);
    CHECK(j["exploration_constants"]["L_markov"].get<double>() == 281.0);
    CHECK(j["markov_bounds"]["transient"].get<double>() == 0.1);

    // the second user's table is the first with the resources swapped
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 2; ++n)
            CHECK(j["means"][1][static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] ==
                  j["means"][0][static_cast<std::size_t>(1 - k)][static_cast<std::size_t>(n)]);

    // squared-eigenvalue gaps of the two chains
    REQUIRE(j["eigenvalue_gaps"].size() == 2);
    CHECK(std::abs(j["eigenvalue_gaps"][0]["gap"].get<double>() - 0.96) < 1e-9);
    CHECK(std::abs(j["eigenvalue_gaps"][1]["gap"].get<double>() - 0.84) < 1e-9);

    // CLI output agrees with in-process evaluation of the same file
    ExperimentConfig cfg = load_config(oracles::read_file(path), config_dir());
    GapReport gap = cfg.scenario->gap();
    CHECK(j["gap"]["epsilon"].get<double>() == gap.epsilon);
    CHECK(j["exploration_constants"]["L_markov"].get<double>() ==
          exploration_constant(gap.epsilon, cfg.scenario->markov_bounds()));
}

TEST_CASE("run is deterministic and emits round-trip-safe files") {
    std::string dir = oracles::fresh_dir("cli-run");
    std::string cfg = write_tiny_config(dir, json::object());
    std::string out_a = dir + "/a", out_b = dir + "/b";
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --out " + q(out_a) + " > " +
                    q(dir + "/log_a.txt")) == 0);
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --out " + q(out_b) + " > " +
                    q(dir + "/log_b.txt")) == 0);
    CHECK(oracles::read_file(dir + "/log_a.txt").find("wrote") != std::string::npos);

    const char* files[] = {"regret.csv", "percent_optimal.csv", "channel_share_user0.csv",
                           "trace_summary.csv", "report.json"};
    for (const char* f : files)
        CHECK(oracles::read_file(out_a + "/" + f) == oracles::read_file(out_b + "/" + f));

    // every numeric cell reparses to a double that reprints identically
    auto rows = csv_rows(oracles::read_file(out_a + "/regret.csv"));
    REQUIRE(rows.size() == 4);  // header + three checkpoints
    CHECK(rows[0] == std::vector<std::string>{"t", "regret_mean", "regret_se", "regret_cost_mean",
                                              "regret_cost_se", "bound"});
    for (std::size_t r = 1; r < rows.size(); ++r)
        for (std::size_t c = 1; c < rows[r].size(); ++c)
            CHECK(fmt17(std::strtod(rows[r][c].c_str(), nullptr)) == rows[r][c]);

    std::string report_text = oracles::read_file(out_a + "/report.json");
    json report = json::parse(report_text);
    CHECK(report.dump(2) + "\n" == report_text);

    CHECK(report["config"]["horizon"] == 300);
    CHECK(report["config"]["seeds"] == 2);
    CHECK(report["config"]["L"] == 1.0);
    CHECK(report["config"]["algorithm"] == "dloe");
    CHECK(report["config"]["costs"]["cmp"] == 2.0);
    CHECK(report["plan_length"] == 4);
    CHECK(report["checkpoints"] == json::parse("[50,150,300]"));
    CHECK(report["derived_seeds"][0].get<std::uint64_t>() == derive_seed(3, {0}));
    CHECK(report["derived_seeds"][1].get<std::uint64_t>() == derive_seed(3, {1}));
    CHECK(report["results"]["bound"].size() == 3);
    CHECK(report["scenario"]["name"] == "coin");

    // the csv and the json carry the same numbers
    CHECK(rows[1][0] == "50");
    CHECK(fmt17(report["results"]["regret_mean"][0].get<double>()) == rows[1][1]);
    CHECK(fmt17(report["results"]["bound"][2].get<double>()) == rows[3][5]);

    // summary has one line per episode, seeds echoed
    auto summary = csv_rows(oracles::read_file(out_a + "/trace_summary.csv"));
    REQUIRE(summary.size() == 3);
    CHECK(summary[1][1] == std::to_string(derive_seed(3, {0})));
    CHECK(summary[2][1] == std::to_string(derive_seed(3, {1})));
}

TEST_CASE("dumped traces replay the library byte for byte") {
    std::string dir = oracles::fresh_dir("cli-traces");
    std::string cfg = write_tiny_config(
        dir, json{{"dump_traces", true}, {"horizon", 120}, {"checkpoints", json::array()}});
    std::string out = dir + "/out";
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --out " + q(out) + " > " +
                    q(dir + "/log.txt")) == 0);

    Scenario scn = coin_scenario();
    RunParams rp;
    rp.block.L = LSchedule::constant(1);
    for (int e = 0; e < 2; ++e) {
        char name[40];
        std::snprintf(name, sizeof name, "/traces/episode_%03d.csv", e);
        std::string text = oracles::read_file(out + name);
        auto ep = run_episode(scn, Algorithm::Dloe, 120, 3, e, rp);
        CHECK(text == trace_to_csv(ep.trace));
    }
}

TEST_CASE("plotdata divides the emitted curves by log t") {
    std::string dir = oracles::fresh_dir("cli-plot");
    std::string cfg = write_tiny_config(dir, json::object());
    std::string run_a = dir + "/lane_one", run_b = dir + "/lane_two";
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --out " + q(run_a) + " > " +
                    q(dir + "/log1.txt")) == 0);
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --L 2 --out " + q(run_b) +
                    " > " + q(dir + "/log2.txt")) == 0);
    CHECK(json::parse(oracles::read_file(run_b + "/report.json"))["config"]["L"] == 2.0);

    std::string pd = dir + "/pd";
    REQUIRE(run_cmd(q(cli_path()) + " plotdata " + q(run_a) + " " + q(run_b) + " --out " + q(pd) +
                    " > " + q(dir + "/log3.txt")) == 0);
    auto rows = csv_rows(oracles::read_file(pd + "/plotdata.csv"));
    REQUIRE(rows.size() == 7);  // header + 3 checkpoints per run
    CHECK(rows[0] == std::vector<std::string>{"label", "t", "regret_over_log",
                                              "regret_cost_over_log", "bound_over_log"});
    for (int r = 1; r <= 3; ++r) CHECK(rows[static_cast<std::size_t>(r)][0] == "lane_one");
    for (int r = 4; r <= 6; ++r) CHECK(rows[static_cast<std::size_t>(r)][0] == "lane_two");

    auto source = [&](const std::string& run_dir) {
        return csv_rows(oracles::read_file(run_dir + "/regret.csv"));
    };
    auto check_block = [&](std::size_t first, const std::string& run_dir) {
        auto src = source(run_dir);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& got = rows[first + i];
            const auto& ref = src[i + 1];
            CHECK(got[1] == ref[0]);
            double lt = std::log(std::strtod(ref[0].c_str(), nullptr));
            CHECK(got[2] == fmt17(std::strtod(ref[1].c_str(), nullptr) / lt));
            CHECK(got[3] == fmt17(std::strtod(ref[3].c_str(), nullptr) / lt));
            CHECK(got[4] == fmt17(std::strtod(ref[5].c_str(), nullptr) / lt));
        }
    };
    check_block(1, run_a);
    check_block(4, run_b);
}

TEST_CASE("command-line overrides land in the report") {
    std::string dir = oracles::fresh_dir("cli-override");
    std::string cfg = write_tiny_config(dir, json{{"checkpoints", json::array()}});
    std::string out = dir + "/out";
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) +
                    " --horizon 200 --seeds 3 --algorithm random --out " + q(out) + " > " +
                    q(dir + "/log.txt")) == 0);
    json report = json::parse(oracles::read_file(out + "/report.json"));
    CHECK(report["config"]["horizon"] == 200);
    CHECK(report["config"]["seeds"] == 3);
    CHECK(report["config"]["algorithm"] == "random");
    CHECK(report["checkpoints"] == json::parse("[10,100,200]"));
    CHECK(report["derived_seeds"].size() == 3);
    CHECK(report["results"]["bound"].empty());  // no closed form for the baseline
}

TEST_CASE("output directory: flag beats config beats environment") {
    std::string dir = oracles::fresh_dir("cli-outdir");
    namespace fs = std::filesystem;
    unsetenv("RESHARE_OUT");

    std::string cfg_out = dir + "/from_config";
    std::string cfg = write_tiny_config(dir, json{{"out_dir", cfg_out}, {"seeds", 1}});
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " > " + q(dir + "/log1.txt")) ==
            0);
    CHECK(fs::exists(cfg_out + "/report.json"));

    std::string env_out = dir + "/from_env";
    setenv("RESHARE_OUT", env_out.c_str(), 1);
    std::string cfg2 = dir + "/plain.json";
    {
        json c = json::parse(oracles::read_file(cfg));
        c.erase("out_dir");
        write_text(dir, "plain.json", c.dump(2));
    }
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg2) + " > " + q(dir + "/log2.txt")) ==
            0);
    CHECK(fs::exists(env_out + "/report.json"));

    std::string flag_out = dir + "/from_flag";
    REQUIRE(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --out " + q(flag_out) + " > " +
                    q(dir + "/log3.txt")) == 0);
    CHECK(fs::exists(flag_out + "/report.json"));
    unsetenv("RESHARE_OUT");
}

TEST_CASE("bad invocations exit with an error code") {
    std::string dir = oracles::fresh_dir("cli-fail");
    std::string sink = " > /dev/null 2>&1";
    CHECK(run_cmd(q(cli_path()) + " run" + sink) != 0);  // --config required
    CHECK(run_cmd(q(cli_path()) + " run --config " + q(dir + "/missing.json") + sink) == 1);
    std::string bad = write_text(dir, "bad.json", "{{{");
    CHECK(run_cmd(q(cli_path()) + " run --config " + q(bad) + sink) == 1);
    std::string cfg = write_tiny_config(dir, json{{"checkpoints", json::array()}});
    // one plan traversal needs 4 slots
    CHECK(run_cmd(q(cli_path()) + " run --config " + q(cfg) + " --horizon 2" + sink) == 1);
    CHECK(run_cmd(q(cli_path()) + " plotdata " + q(dir + "/nowhere") + " --out " + q(dir) + sink) ==
          2);
    CHECK(run_cmd(q(cli_path()) + " plotdata --out " + q(dir) + sink) == 2);

    // a bare scenario file (no experiment wrapper) is fine for analyze
    std::string scn = write_text(dir, "scn.json", scenario_json(coin_scenario()));
    CHECK(run_cmd(q(cli_path()) + " analyze --config " + q(scn) + " > " + q(dir + "/a.json")) ==
          0);
    CHECK(json::parse(oracles::read_file(dir + "/a.json"))["scenario"]["users"] == 2);

    // relative scenario_file resolves against the config's directory
    json wrapper = {{"scenario_file", "scn.json"}, {"horizon", 300}, {"L", 1}};
    std::string wrapped = write_text(dir, "wrapped.json", wrapper.dump());
    CHECK(run_cmd(q(cli_path()) + " analyze --config " + q(wrapped) + " > " +
                  q(dir + "/b.json")) == 0);
    CHECK(json::parse(oracles::read_file(dir + "/b.json"))["scenario"]["users"] == 2);
}
