#include "reshare/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "reshare/exploration.hpp"

namespace reshare {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

LSchedule schedule_from_text(const std::string& text) {
    if (text == "log") return LSchedule::log_growth();
    if (text == "pow") return LSchedule::pow_growth();
    try {
        std::size_t used = 0;
        double num = std::stod(text, &used);
        if (used == text.size()) return LSchedule::constant(num);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("L must be a number, \"log\", or \"pow\"");
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

LSchedule schedule_from_json(const json& v) {
    if (v.is_number()) return LSchedule::constant(v.get<double>());
    if (v.is_string()) return schedule_from_text(v.get<std::string>());
    throw std::invalid_argument("config: bad L field");
}

json schedule_to_json(const LSchedule& L) {
    switch (L.kind) {
        case LSchedule::Kind::Constant: return L.value;
        case LSchedule::Kind::LogGrowth: return "log";
        case LSchedule::Kind::PowGrowth: return "pow";
    }
    throw std::logic_error("schedule_to_json: bad kind");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!scenario) throw std::invalid_argument("config: no scenario");
    scenario->validate();
    run.block.validate();
    if (run.block.a < 2 || run.block.b < 2 || run.block.c < 2)
        throw std::invalid_argument("config: block parameters a, b, c must all be >= 2");
    if (horizon < 1) throw std::invalid_argument("config: horizon < 1");
    if (seeds < 1) throw std::invalid_argument("config: seeds < 1");
    if (algorithm == Algorithm::Dloe || algorithm == Algorithm::Dlc) {
        ExplorationPlan plan = build_compact_plan(scenario->users(), scenario->resources());
        if (horizon < static_cast<long long>(plan.length()))
            throw std::invalid_argument("config: horizon shorter than one plan traversal (" +
                                        std::to_string(plan.length()) + ")");
    }
    long long prev = 0;
    for (long long cp : checkpoints) {
        if (cp <= prev) throw std::invalid_argument("config: checkpoints must increase");
        if (cp > horizon) throw std::invalid_argument("config: checkpoint beyond horizon");
        prev = cp;
    }
}

ExperimentConfig load_config(const std::string& json_text, const std::string& base_dir) {
    json j = json::parse(json_text);
    ExperimentConfig c;
    if (j.contains("scenario")) {
        c.scenario = load_scenario(j.at("scenario").dump());
    } else if (j.contains("scenario_file")) {
        fs::path p = j.at("scenario_file").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
        c.scenario = load_scenario(read_file(p.string()));
    } else {
        throw std::invalid_argument("config: need \"scenario\" or \"scenario_file\"");
    }
    if (j.contains("algorithm")) c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    c.run.block.a = j.value("a", 2);
    c.run.block.b = j.value("b", 4);
    c.run.block.c = j.value("c", 4);
    if (j.contains("L")) c.run.block.L = schedule_from_json(j.at("L"));
    c.run.update_during_exploit = j.value("update_during_exploit", true);
    c.horizon = j.value("horizon", 1000LL);
    c.seeds = j.value("seeds", 10);
    c.master_seed = j.value("master_seed", 1ULL);
    if (j.contains("costs")) {
        const json& cj = j.at("costs");
        c.costs.cmp = cj.value("cmp", 0.0);
        c.costs.swc = cj.value("swc", 0.0);
        c.costs.com = cj.value("com", 0.0);
        c.costs.init = cj.value("init", 0.0);
    }
    if (j.contains("checkpoints")) c.checkpoints = j.at("checkpoints").get<std::vector<long long>>();
    c.out_dir = j.value("out_dir", std::string());
    c.dump_traces = j.value("dump_traces", false);
    return c;
}

std::string resolve_out_dir(const std::string& cli_out, const ExperimentConfig* config) {
    if (!cli_out.empty()) return cli_out;
    if (config && !config->out_dir.empty()) return config->out_dir;
    if (const char* env = std::getenv("RESHARE_OUT"); env && *env) return env;
    return ".";
}

namespace {

json config_echo(const ExperimentConfig& c) {
    json j;
    j["algorithm"] = algorithm_name(c.algorithm);
    j["a"] = c.run.block.a;
    j["b"] = c.run.block.b;
    j["c"] = c.run.block.c;
    j["L"] = schedule_to_json(c.run.block.L);
    j["update_during_exploit"] = c.run.update_during_exploit;
    j["horizon"] = c.horizon;
    j["seeds"] = c.seeds;
    j["master_seed"] = c.master_seed;
    j["costs"] = {{"cmp", c.costs.cmp}, {"swc", c.costs.swc}, {"com", c.costs.com},
                  {"init", c.costs.init}};
    j["dump_traces"] = c.dump_traces;
    return j;
}

std::string curve_csv(const AggregateResult& r) {
    std::ostringstream out;
    out << "t,regret_mean,regret_se,regret_cost_mean,regret_cost_se";
    bool with_bound = !r.bound.empty();
    if (with_bound) out << ",bound";
    out << '\n';
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        out << r.checkpoints[i] << ',' << format_double(r.regret_mean[i]) << ','
            << format_double(r.regret_se[i]) << ',' << format_double(r.regret_cost_mean[i]) << ','
            << format_double(r.regret_cost_se[i]);
        if (with_bound) out << ',' << format_double(r.bound[i]);
        out << '\n';
    }
    return out.str();
}

std::string pct_csv(const AggregateResult& r) {
    std::ostringstream out;
    out << "t,percent_mean,percent_se\n";
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i)
        out << r.checkpoints[i] << ',' << format_double(r.pct_optimal_mean[i]) << ','
            << format_double(r.pct_optimal_se[i]) << '\n';
    return out.str();
}

std::string share_csv(const AggregateResult& r) {
    std::ostringstream out;
    out << "t";
    for (std::size_t k = 0; k < r.share_user0.size(); ++k) out << ",share_" << k;
    out << '\n';
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        out << r.checkpoints[i];
        for (const auto& col : r.share_user0) out << ',' << format_double(col[i]);
        out << '\n';
    }
    return out.str();
}

std::string summary_csv(const AggregateResult& r) {
    std::ostringstream out;
    out << "episode,seed,regret,regret_with_costs,events_cmp,events_swc,events_com\n";
    for (std::size_t i = 0; i < r.episodes.size(); ++i) {
        const EpisodeSummary& e = r.episodes[i];
        out << i << ',' << e.seed << ',' << format_double(e.regret) << ','
            << format_double(e.regret_with_costs) << ',' << e.cmp << ',' << e.swc << ',' << e.com
            << '\n';
    }
    return out.str();
}

}  // namespace

int cmd_run(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
    config.validate();
    const Scenario& scenario = *config.scenario;
    std::vector<long long> checkpoints =
        config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints;

    fs::create_directories(out_dir);
    AggregateResult result = run_many(scenario, config.algorithm, config.horizon, config.seeds,
                                      config.master_seed, config.run, config.costs, checkpoints);

    write_file((fs::path(out_dir) / "regret.csv").string(), curve_csv(result));
    write_file((fs::path(out_dir) / "percent_optimal.csv").string(), pct_csv(result));
    write_file((fs::path(out_dir) / "channel_share_user0.csv").string(), share_csv(result));
    write_file((fs::path(out_dir) / "trace_summary.csv").string(), summary_csv(result));

    if (config.dump_traces) {
        fs::create_directories(fs::path(out_dir) / "traces");
        for (int e = 0; e < config.seeds; ++e) {
            EpisodeResult episode = run_episode(scenario, config.algorithm, config.horizon,
                                                config.master_seed, e, config.run);
            char name[32];
            std::snprintf(name, sizeof name, "episode_%03d.csv", e);
            write_file((fs::path(out_dir) / "traces" / name).string(),
                       trace_to_csv(episode.trace));
        }
    }

    GapReport gap = scenario.gap();
    json report;
    report["config"] = config_echo(config);
    report["scenario"] = {{"name", scenario.name()},
                          {"users", scenario.users()},
                          {"resources", scenario.resources()},
                          {"user_specific", scenario.user_specific()},
                          {"has_markov", scenario.has_markov()}};
    json gj;
    gj["v_star"] = gap.v_star;
    gj["delta_min"] = gap.delta_min;
    gj["epsilon"] = gap.epsilon;
    if (scenario.user_specific())
        gj["best_assignments"] = gap.best_assignments;
    else
        gj["best_allocations"] = gap.best_allocations;
    report["gap"] = std::move(gj);
    report["plan_length"] = result.plan_length;
    report["checkpoints"] = result.checkpoints;
    report["derived_seeds"] = result.seeds;
    report["results"] = {{"regret_mean", result.regret_mean},
                         {"regret_se", result.regret_se},
                         {"regret_cost_mean", result.regret_cost_mean},
                         {"regret_cost_se", result.regret_cost_se},
                         {"percent_optimal_mean", result.pct_optimal_mean},
                         {"percent_optimal_se", result.pct_optimal_se},
                         {"channel_share_user0", result.share_user0},
                         {"bound", result.bound},
                         {"mean_events", {{"cmp", result.mean_cmp},
                                          {"swc", result.mean_swc},
                                          {"com", result.mean_com}}}};
    report["files"] = {"regret.csv", "percent_optimal.csv", "channel_share_user0.csv",
                       "trace_summary.csv"};
    write_file((fs::path(out_dir) / "report.json").string(), report.dump(2) + "\n");

    log << "wrote " << out_dir << "/report.json (" << config.seeds << " episodes, horizon "
        << config.horizon << ", algorithm " << algorithm_name(config.algorithm) << ")\n";
    return 0;
}

int cmd_analyze(const Scenario& scenario, std::ostream& out) {
    scenario.validate();
    MeanRewardTable means = scenario.exact_means();
    GapReport gap = scenario.gap();

    json j;
    j["scenario"] = {{"name", scenario.name()},
                     {"users", scenario.users()},
                     {"resources", scenario.resources()},
                     {"user_specific", scenario.user_specific()},
                     {"has_markov", scenario.has_markov()}};

    auto mean_rows = [&](int i) {
        json rows = json::array();
        for (int k = 0; k < scenario.resources(); ++k) {
            json row = json::array();
            for (int n = 1; n <= scenario.users(); ++n)
                row.push_back(scenario.user_specific() ? means.at(i, k, n) : means.at(k, n));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    if (scenario.user_specific()) {
        json per_user = json::array();
        for (int i = 0; i < scenario.users(); ++i) per_user.push_back(mean_rows(i));
        j["means"] = std::move(per_user);
    } else {
        j["means"] = mean_rows(0);
    }

    json gj;
    gj["v_star"] = gap.v_star;
    gj["delta_min"] = gap.delta_min;
    gj["epsilon"] = gap.epsilon;
    gj["epsilon_half_gap"] = gap.delta_min / 2.0;
    if (scenario.user_specific())
        gj["best_assignments"] = gap.best_assignments;
    else
        gj["best_allocations"] = gap.best_allocations;
    j["gap"] = std::move(gj);

    AllocationCount n_star = scenario.user_specific()
                                 ? congestion_of(gap.best_assignments.front(), scenario.resources())
                                 : gap.best_allocations.front();
    j["o_b"] = worst_case_hitting_bound(n_star);

    json lc;
    lc["L_iid"] = exploration_constant(gap.epsilon);
    lc["L_iid_half_gap"] = exploration_constant(gap.delta_min / 2.0);
    if (scenario.has_markov()) {
        MarkovBoundParams mp = scenario.markov_bounds();
        lc["L_markov"] = exploration_constant(gap.epsilon, mp);
        j["markov_bounds"] = {{"s_max", mp.s_max},
                              {"pi_min", mp.pi_min},
                              {"r_sigma_max", mp.r_sigma_max},
                              {"r_sigma_min", mp.r_sigma_min},
                              {"upsilon_min", mp.upsilon_min},
                              {"transient", mp.transient}};
        json gaps = json::array();
        for (int k = 0; k < scenario.resources(); ++k) {
            const ResourceProcess& p = scenario.process(k);
            if (p.kind == ResourceProcess::Kind::Markov)
                gaps.push_back({{"resource", k}, {"gap", p.chain->gap()}});
        }
        j["eigenvalue_gaps"] = std::move(gaps);
    }
    j["exploration_constants"] = std::move(lc);

    out << j.dump(2) << '\n';
    return 0;
}

int cmd_plotdata(const std::vector<std::string>& run_dirs, const std::string& out_dir,
                 std::ostream& log) {
    if (run_dirs.empty()) {
        log << "plotdata: no run directories given\n";
        return 2;
    }
    std::ostringstream out;
    out << "label,t,regret_over_log,regret_cost_over_log,bound_over_log\n";
    for (const std::string& dir : run_dirs) {
        fs::path path = fs::path(dir) / "regret.csv";
        if (!fs::exists(path)) {
            log << "plotdata: missing " << path.string() << '\n';
            return 2;
        }
        std::istringstream in(read_file(path.string()));
        std::string line;
        if (!std::getline(in, line)) {
            log << "plotdata: empty " << path.string() << '\n';
            return 2;
        }
        bool with_bound = line.find(",bound") != std::string::npos;
        std::string label = fs::path(dir).filename().string();
        if (label.empty()) label = dir;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string cell;
            auto next = [&]() {
                if (!std::getline(row, cell, ','))
                    throw std::runtime_error("plotdata: short row in " + path.string());
                return cell;
            };
            long long t = std::stoll(next());
            double regret = std::stod(next());
            next();  // regret_se
            double regret_cost = std::stod(next());
            next();  // regret_cost_se
            double bound = std::numeric_limits<double>::quiet_NaN();
            if (with_bound) bound = std::stod(next());
            double lt = std::log(static_cast<double>(t));
            out << label << ',' << t << ',' << format_double(regret / lt) << ','
                << format_double(regret_cost / lt) << ',' << format_double(bound / lt) << '\n';
        }
    }
    fs::create_directories(out_dir);
    write_file((fs::path(out_dir) / "plotdata.csv").string(), out.str());
    log << "wrote " << out_dir << "/plotdata.csv\n";
    return 0;
}

}  // namespace reshare
