#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossvote/harness.hpp"
#include "crossvote/neural.hpp"
#include "crossvote/policy.hpp"
#include "crossvote/rewards.hpp"
#include "crossvote/sim.hpp"
#include "crossvote/voting.hpp"

namespace fs = std::filesystem;
using namespace crossvote;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::vector<std::string> overrides;  // key=value, scenario or hyperparam
};

ScenarioConfig resolve_scenario(const CommonOpts& opts, Hyperparams* hp = nullptr) {
    ScenarioConfig cfg;
    if (!opts.config_path.empty()) cfg = load_scenario_config(opts.config_path);
    for (const auto& kv : opts.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--set expects key=value, got: " + kv);
        std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        try {
            apply_scenario_override(cfg, key, value);
            continue;
        } catch (const std::invalid_argument&) {
        }
        if (hp) {
            apply_hyperparam_override(*hp, key, value);
        } else {
            throw CLI::ValidationError("unknown config key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

std::string resolve_out(const std::string& flag, const std::string& effective_config) {
    if (!flag.empty()) {
        fs::create_directories(flag);
        return flag;
    }
    const char* env = std::getenv("CROSSVOTE_OUT");
    std::string root = env ? env : "runs";
    return make_run_dir(root, effective_config);
}

void echo_config(const std::string& header, const std::string& body,
                 const std::string& dir) {
    std::cout << "# effective-config (" << header << ")\n" << body;
    std::ofstream f(fs::path(dir) / "effective_config.txt");
    f << "# " << header << "\n" << body;
}

Mlp load_policy_net(const std::string& dir, const std::string& policy) {
    fs::path path = fs::path(dir) / (policy + ".net");
    if (!fs::exists(path))
        throw std::runtime_error("missing checkpoint: " + path.string());
    return load_checkpoint(path.string());
}

PolicySpec make_policy_spec(const std::string& id, const std::string& checkpoint_dir,
                            const std::string& vote_rule) {
    PolicySpec spec;
    spec.id = id;
    if (id == "multi") {
        if (vote_rule.empty())
            throw std::runtime_error("policy 'multi' requires --vote-rule");
        VoteRule rule = parse_vote_rule(vote_rule);
        spec.vote_rule = vote_rule;
        auto stops = load_policy_net(checkpoint_dir, "stops");
        auto wait = load_policy_net(checkpoint_dir, "wait");
        spec.make = [stops, wait, rule]() -> std::unique_ptr<Policy> {
            return std::make_unique<MultiObjectivePolicy>(std::vector<Mlp>{stops, wait}, rule);
        };
    } else {
        parse_reward_kind(id);  // validates the id
        auto net = load_policy_net(checkpoint_dir, id);
        spec.make = [id, net]() -> std::unique_ptr<Policy> {
            return std::make_unique<GreedyPolicy>(id, net);
        };
    }
    return spec;
}

std::vector<uint64_t> seed_range(uint64_t first, int count) {
    std::vector<uint64_t> seeds;
    for (int i = 0; i < count; ++i) seeds.push_back(first + static_cast<uint64_t>(i));
    return seeds;
}

int cmd_train(const CommonOpts& common, const std::string& reward, int episodes,
              uint64_t seed) {
    RewardKind kind = parse_reward_kind(reward);
    Hyperparams hp;
    ScenarioConfig cfg = resolve_scenario(common, &hp);
    if (episodes >= 0) hp.train_episodes = episodes;
    hp.seed = seed;
    hp.validate();

    std::string effective = "subcommand = train\nreward = " + reward + "\n" +
                            cfg.describe() + hp.describe();
    std::string dir = resolve_out(common.out, effective);
    echo_config("train", effective, dir);

    TrainResult result = train_dqn(cfg, kind, hp);
    fs::path ckpt = fs::path(dir) / (reward + ".net");
    save_checkpoint(result.net, ckpt.string());
    {
        std::ofstream curve(fs::path(dir) / (reward + "_curve.csv"));
        curve << "episode,return\n";
        for (size_t i = 0; i < result.episode_returns.size(); ++i) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, result.episode_returns[i]);
            curve << buf;
        }
    }
    std::cout << "checkpoint: " << ckpt.string() << "\n";
    return 0;
}

int cmd_run(const CommonOpts& common, const std::string& policy_id,
            const std::string& checkpoint_dir, const std::string& vote_rule,
            uint64_t seed) {
    Hyperparams hp;
    ScenarioConfig cfg = resolve_scenario(common, &hp);
    cfg.seed = seed;
    PolicySpec spec = make_policy_spec(policy_id, checkpoint_dir, vote_rule);

    std::string effective = "subcommand = run\npolicy = " + policy_id +
                            "\nvote_rule = " + vote_rule + "\n" + cfg.describe();
    std::string dir = resolve_out(common.out, effective);
    echo_config("run", effective, dir);

    auto policy = spec.make();
    EpisodeLog log = run_episode(cfg, *policy);
    MetricsReport m = metrics(log);
    write_trace_csv(log, (fs::path(dir) / "trace.csv").string());
    {
        std::ofstream out(fs::path(dir) / "metrics.csv");
        out << metrics_csv_header() << "\n"
            << metrics_csv_row(log.scenario_id, log.seed, log.policy_id, log.vote_rule, m,
                               log.switch_rate())
            << "\n";
    }
    std::cout << "mean_speed=" << m.mean_speed_mps << " total_stops=" << m.total_stops
              << " mean_wait=" << m.mean_wait_s << " switch_rate=" << log.switch_rate()
              << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& common, const std::vector<std::string>& policy_ids,
              const std::string& checkpoint_dir, const std::string& vote_rule,
              int n_seeds, uint64_t first_seed, int parallel) {
    Hyperparams hp;
    ScenarioConfig cfg = resolve_scenario(common, &hp);
    std::vector<PolicySpec> specs;
    for (const auto& id : policy_ids)
        specs.push_back(make_policy_spec(id, checkpoint_dir, vote_rule));

    std::string effective = "subcommand = sweep\npolicies =";
    for (const auto& id : policy_ids) effective += " " + id;
    effective += "\nvote_rule = " + vote_rule + "\nseeds = " + std::to_string(n_seeds) +
                 "\nfirst_seed = " + std::to_string(first_seed) + "\n" + cfg.describe();
    std::string dir = resolve_out(common.out, effective);
    echo_config("sweep", effective, dir);

    SweepResult sweep = run_sweep(standard_demands(), seed_range(first_seed, n_seeds),
                                  specs, cfg, parallel);
    write_sweep_csvs(sweep, (fs::path(dir) / "per_seed.csv").string(),
                     (fs::path(dir) / "aggregate.csv").string());
    emit_radar_data(sweep, (fs::path(dir) / "radar.json").string());
    std::cout << "episodes: " << sweep.logs.size() << ", aggregate rows: "
              << sweep.cells.size() << "\nresults: " << dir << "\n";
    return 0;
}

int cmd_align(const CommonOpts& common, const std::string& checkpoint_dir,
              const std::vector<std::string>& rules, int n_seeds, uint64_t first_seed,
              int parallel) {
    Hyperparams hp;
    ScenarioConfig cfg = resolve_scenario(common, &hp);
    Mlp stops_net = load_policy_net(checkpoint_dir, "stops");
    Mlp wait_net = load_policy_net(checkpoint_dir, "wait");

    std::string effective = "subcommand = align\nvote_rules =";
    for (const auto& r : rules) effective += " " + r;
    effective += "\nseeds = " + std::to_string(n_seeds) +
                 "\nfirst_seed = " + std::to_string(first_seed) + "\n" + cfg.describe();
    std::string dir = resolve_out(common.out, effective);
    echo_config("align", effective, dir);

    std::vector<EpisodeLog> logs;
    for (const auto& rule : rules) {
        std::vector<PolicySpec> specs = {make_policy_spec("multi", checkpoint_dir, rule)};
        SweepResult sweep = run_sweep(standard_demands(), seed_range(first_seed, n_seeds),
                                      specs, cfg, parallel);
        for (auto& log : sweep.logs) logs.push_back(std::move(log));
    }
    auto rows = alignment_analysis(logs, stops_net, wait_net);
    write_agreement_csv(rows, (fs::path(dir) / "agreement.csv").string());
    std::cout << "agreement rows: " << rows.size() << "\nresults: " << dir << "\n";
    return 0;
}

int cmd_report(const std::string& aggregate_csv, const std::string& out_json) {
    // regenerate radar JSON from an aggregate CSV
    std::ifstream in(aggregate_csv);
    if (!in) throw std::runtime_error("cannot open " + aggregate_csv);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty aggregate CSV");
    SweepResult sweep;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() < 10) throw std::runtime_error("malformed aggregate row: " + line);
        SweepCell c;
        c.scenario = cols[0];
        c.policy = cols[1];
        c.vote_rule = cols[2];
        c.n_seeds = std::stoi(cols[3]);
        c.mean_speed_mean = std::stod(cols[4]);
        c.mean_speed_std = std::stod(cols[5]);
        c.total_stops_mean = std::stod(cols[6]);
        c.total_stops_std = std::stod(cols[7]);
        c.mean_wait_mean = std::stod(cols[8]);
        c.mean_wait_std = std::stod(cols[9]);
        sweep.cells.push_back(c);
    }
    emit_radar_data(sweep, out_json);
    std::cout << "radar data: " << out_json << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Voting-integrated multi-objective DQN traffic signal control"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string reward = "stops";
    std::string policy_id = "stops";
    std::vector<std::string> policy_ids;
    std::string checkpoint_dir = ".";
    std::string vote_rule;
    std::vector<std::string> align_rules = {"proportional", "majority"};
    int episodes = -1;
    int n_seeds = 10;
    uint64_t seed = 1;
    uint64_t first_seed = 1;
    int parallel = 1;
    std::string aggregate_csv, out_json = "radar.json";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "scenario config file (key = value)");
        sub->add_option("--set", common.overrides, "override a scenario/hyperparameter key=value");
        sub->add_option("--out", common.out, "output directory (default: CROSSVOTE_OUT or ./runs, timestamped)");
    };

    CLI::App* train = app.add_subcommand("train", "train a single-objective DQN");
    add_common(train);
    train->add_option("--reward", reward, "reward id: stops|wait|linear|cobb")->required();
    train->add_option("--episodes", episodes, "training episodes (default 200)");
    train->add_option("--seed", seed, "training seed");

    CLI::App* run = app.add_subcommand("run", "run one evaluation episode");
    add_common(run);
    run->add_option("--policy", policy_id, "policy: stops|wait|linear|cobb|multi")->required();
    run->add_option("--checkpoints", checkpoint_dir, "directory holding <policy>.net files");
    run->add_option("--vote-rule", vote_rule, "majority|proportional (required for multi)");
    run->add_option("--seed", seed, "scenario seed");

    CLI::App* sweep = app.add_subcommand("sweep", "run all six demands across seeds");
    add_common(sweep);
    sweep->add_option("--policies", policy_ids, "policies to evaluate")->required();
    sweep->add_option("--checkpoints", checkpoint_dir, "directory holding <policy>.net files");
    sweep->add_option("--vote-rule", vote_rule, "majority|proportional (required for multi)");
    sweep->add_option("--seeds", n_seeds, "number of seeds per demand");
    sweep->add_option("--first-seed", first_seed, "first seed value");
    sweep->add_option("--parallel", parallel, "worker threads");

    CLI::App* align = app.add_subcommand("align", "action-agreement analysis");
    add_common(align);
    align->add_option("--checkpoints", checkpoint_dir, "directory holding stops.net and wait.net");
    align->add_option("--vote-rules", align_rules, "rules to analyze");
    align->add_option("--seeds", n_seeds, "number of seeds per demand");
    align->add_option("--first-seed", first_seed, "first seed value");
    align->add_option("--parallel", parallel, "worker threads");

    CLI::App* report = app.add_subcommand("report", "rebuild radar JSON from an aggregate CSV");
    report->add_option("--aggregate", aggregate_csv, "aggregate.csv from a sweep")->required();
    report->add_option("--json", out_json, "output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) return cmd_train(common, reward, episodes, seed);
        if (run->parsed()) return cmd_run(common, policy_id, checkpoint_dir, vote_rule, seed);
        if (sweep->parsed())
            return cmd_sweep(common, policy_ids, checkpoint_dir, vote_rule, n_seeds,
                             first_seed, parallel);
        if (align->parsed())
            return cmd_align(common, checkpoint_dir, align_rules, n_seeds, first_seed,
                             parallel);
        if (report->parsed()) return cmd_report(aggregate_csv, out_json);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
