#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossvote/sim.hpp"

namespace crossvote {

// One record per agent decision (every t_act seconds).
struct DecisionRecord {
    int clock = 0;                     // world clock at decision time
    Phase incumbent = Phase::NSGreen;  // phase in effect before deciding
    Observation obs;
    VoteTally tally;
    std::vector<double> weights;             // empty for single-objective policies
    std::vector<std::vector<double>> q_per_objective;  // normalized, per objective
    std::vector<double> q_integrated;
    int action = 0;
};

// Per-second fleet telemetry, enough to recompute all evaluation metrics.
struct SecondRow {
    int clock = 0;
    Phase phase = Phase::NSGreen;
    double speed_sum_ns = 0.0;
    double speed_sum_we = 0.0;
    int cum_stops_ns = 0;
    int cum_stops_we = 0;
    double cum_wait_ns = 0.0;
    double cum_wait_we = 0.0;
};

struct EpisodeLog {
    std::string scenario_id;
    uint64_t seed = 0;
    std::string policy_id;
    std::string vote_rule;  // empty unless the policy votes
    int n_ns = 0;
    int n_we = 0;
    int horizon_steps = 0;
    int t_act = 0;
    double v_max_mps = 0.0;
    std::vector<DecisionRecord> decisions;
    std::vector<SecondRow> seconds;

    int fleet_size() const { return n_ns + n_we; }
    double switch_rate() const;
};

}  // namespace crossvote
