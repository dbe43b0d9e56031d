#include "crossvote/rewards.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace crossvote {

RewardParams default_reward_params(int approach_fleet, int t_act) {
    RewardParams p;
    int n = approach_fleet < 1 ? 1 : approach_fleet;
    p.max_stops_norm = static_cast<double>(n);
    p.max_wait_norm = static_cast<double>(t_act) * n / 2.0;
    return p;
}

double reward_stops(const IntervalEvents& ev) {
    return -static_cast<double>(ev.new_stops);
}

double reward_wait(const IntervalEvents& ev) {
    return -ev.stopped_seconds;
}

static void check_norms(const RewardParams& p) {
    if (p.max_stops_norm <= 0.0 || p.max_wait_norm <= 0.0)
        throw std::invalid_argument("reward norms must be strictly positive");
}

double reward_linear(double r_s, double r_w, const RewardParams& p) {
    check_norms(p);
    return p.alpha * (r_s / p.max_stops_norm) + p.beta * (r_w / p.max_wait_norm);
}

double reward_cobb_douglas(double r_s, double r_w, const RewardParams& p) {
    check_norms(p);
    double xs = -r_s / p.max_stops_norm;
    double xw = -r_w / p.max_wait_norm;
    // 0^a with a in (0,1] is taken as 0
    if (xs == 0.0 || xw == 0.0) return 0.0;
    return -std::pow(xs, p.alpha) * std::pow(xw, p.beta);
}

double EpisodeLog::switch_rate() const {
    if (decisions.empty()) return 0.0;
    int switches = 0;
    for (const auto& d : decisions)
        if (d.action != static_cast<int>(d.incumbent)) ++switches;
    return static_cast<double>(switches) / static_cast<double>(decisions.size());
}

MetricsReport metrics(const EpisodeLog& trace) {
    if (trace.seconds.empty()) throw std::invalid_argument("metrics: empty trace");
    MetricsReport m;
    const auto& last = trace.seconds.back();
    double T = static_cast<double>(trace.seconds.size());
    double speed_ns = 0.0, speed_we = 0.0;
    for (const auto& row : trace.seconds) {
        speed_ns += row.speed_sum_ns;
        speed_we += row.speed_sum_we;
    }
    m.stops_ns = last.cum_stops_ns;
    m.stops_we = last.cum_stops_we;
    m.total_stops = m.stops_ns + m.stops_we;
    m.mean_speed_ns = trace.n_ns > 0 ? speed_ns / (T * trace.n_ns) : 0.0;
    m.mean_speed_we = trace.n_we > 0 ? speed_we / (T * trace.n_we) : 0.0;
    int fleet = trace.fleet_size();
    m.mean_speed_mps = fleet > 0 ? (speed_ns + speed_we) / (T * fleet) : 0.0;
    m.mean_wait_ns = trace.n_ns > 0 ? last.cum_wait_ns / trace.n_ns : 0.0;
    m.mean_wait_we = trace.n_we > 0 ? last.cum_wait_we / trace.n_we : 0.0;
    m.mean_wait_s = fleet > 0 ? (last.cum_wait_ns + last.cum_wait_we) / fleet : 0.0;
    return m;
}

std::string metrics_csv_header() {
    return "scenario,seed,policy,vote_rule,mean_speed,total_stops,mean_wait,"
           "mean_speed_ns,mean_speed_we,stops_ns,stops_we,mean_wait_ns,mean_wait_we,"
           "switch_rate";
}

static std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string metrics_csv_row(const std::string& scenario, uint64_t seed,
                            const std::string& policy, const std::string& vote_rule,
                            const MetricsReport& m, double switch_rate) {
    std::string row = scenario + "," + std::to_string(seed) + "," + policy + "," + vote_rule;
    row += "," + fmt(m.mean_speed_mps);
    row += "," + std::to_string(m.total_stops);
    row += "," + fmt(m.mean_wait_s);
    row += "," + fmt(m.mean_speed_ns);
    row += "," + fmt(m.mean_speed_we);
    row += "," + std::to_string(m.stops_ns);
    row += "," + std::to_string(m.stops_we);
    row += "," + fmt(m.mean_wait_ns);
    row += "," + fmt(m.mean_wait_we);
    row += "," + fmt(switch_rate);
    return row;
}

}  // namespace crossvote
