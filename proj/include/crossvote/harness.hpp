#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crossvote/episode_log.hpp"
#include "crossvote/neural.hpp"
#include "crossvote/policy.hpp"
#include "crossvote/rewards.hpp"
#include "crossvote/sim.hpp"

namespace crossvote {

// Builds a fresh policy instance; episodes running in parallel each get
// their own copy so decision state never crosses threads.
using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

EpisodeLog run_episode(const ScenarioConfig& cfg, Policy& policy);

// Per-second trace CSV: clock, phase, per-road mean speed, cumulative
// stops, cumulative wait.
void write_trace_csv(const EpisodeLog& log, const std::string& path);

struct SweepCell {
    std::string scenario;
    std::string policy;
    std::string vote_rule;
    int n_seeds = 0;
    double mean_speed_mean = 0.0, mean_speed_std = 0.0;
    double total_stops_mean = 0.0, total_stops_std = 0.0;
    double mean_wait_mean = 0.0, mean_wait_std = 0.0;
};

struct SweepResult {
    // one row per episode, in (demand, policy, seed) order
    std::vector<EpisodeLog> logs;
    std::vector<MetricsReport> reports;
    std::vector<SweepCell> cells;
};

struct PolicySpec {
    std::string id;  // stops | wait | linear | cobb | multi
    PolicyFactory make;
    std::string vote_rule;  // set when id == "multi"
};

SweepResult run_sweep(const std::vector<DemandSpec>& demands,
                      const std::vector<uint64_t>& seeds,
                      const std::vector<PolicySpec>& policies,
                      const ScenarioConfig& base_cfg, int parallelism);

void write_sweep_csvs(const SweepResult& sweep, const std::string& per_seed_path,
                      const std::string& aggregate_path);

// Per-demand JSON records {policy -> {speed, stops, wait}} for external
// radar plotting; values match the aggregate CSV exactly.
void emit_radar_data(const SweepResult& sweep, const std::string& path);

struct AgreementRow {
    std::string bucket;     // low | medium | high
    std::string vote_rule;
    std::string policy_a;
    std::string policy_b;
    double agreement = 0.0;
    int n_decisions = 0;
};

// Replays the observations logged by multi-policy episodes through the
// single-objective greedy policies and reports pairwise action agreement.
std::vector<AgreementRow> alignment_analysis(const std::vector<EpisodeLog>& multi_logs,
                                             const Mlp& stops_net, const Mlp& wait_net);

void write_agreement_csv(const std::vector<AgreementRow>& rows, const std::string& path);

// Run directory under `root`, named by wall-clock timestamp plus a hash
// of the effective configuration text.
std::string make_run_dir(const std::string& root, const std::string& effective_config);

uint64_t fnv1a(const std::string& s);

}  // namespace crossvote
