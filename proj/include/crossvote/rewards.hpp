#pragma once

#include <string>

#include "crossvote/episode_log.hpp"
#include "crossvote/sim.hpp"

namespace crossvote {

struct RewardParams {
    double alpha = 0.5;
    double beta = 0.5;
    double max_stops_norm = 1.0;
    double max_wait_norm = 1.0;
};

// Per-interval ceilings used as normalization constants: every vehicle on
// the approaches can stop once, and can sit stopped for the whole window
// (the wait norm takes half of that ceiling).
RewardParams default_reward_params(int approach_fleet, int t_act);

double reward_stops(const IntervalEvents& ev);
double reward_wait(const IntervalEvents& ev);
double reward_linear(double r_s, double r_w, const RewardParams& p);
double reward_cobb_douglas(double r_s, double r_w, const RewardParams& p);

struct MetricsReport {
    double mean_speed_mps = 0.0;
    int total_stops = 0;
    double mean_wait_s = 0.0;  // per vehicle
    double mean_speed_ns = 0.0;
    double mean_speed_we = 0.0;
    int stops_ns = 0;
    int stops_we = 0;
    double mean_wait_ns = 0.0;  // per vehicle on that road
    double mean_wait_we = 0.0;
};

// Evaluation metrics over a full episode trace. Throws on an empty trace.
MetricsReport metrics(const EpisodeLog& trace);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& scenario, uint64_t seed,
                            const std::string& policy, const std::string& vote_rule,
                            const MetricsReport& m, double switch_rate);

}  // namespace crossvote
