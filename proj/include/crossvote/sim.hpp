#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossvote/rng.hpp"

namespace crossvote {

enum class Road { NS = 0, WE = 1 };

enum class Phase { NSGreen = 0, WEGreen = 1 };

enum class Preference { Stops = 0, Wait = 1 };

struct ScenarioConfig {
    int n_ns = 11;
    int n_we = 6;
    int horizon_steps = 3600;
    int t_act = 5;
    double loop_length_m = 600.0;
    double approach_length_m = 300.0;
    int n_segments = 3;
    double v_max_mps = 13.89;
    double accel_mps2 = 2.0;
    double decel_mps2 = 4.5;
    double vehicle_length_m = 5.0;
    double min_gap_m = 2.5;
    double stop_speed_threshold_mps = 0.1;
    double preference_split = 0.5;
    uint64_t seed = 0;

    int fleet_size() const { return n_ns + n_we; }
    // Throws std::invalid_argument on violated invariants.
    void validate() const;
    std::string describe() const;
};

// Loads key = value lines into a ScenarioConfig; '#' starts a comment.
// Unknown keys are an error.
ScenarioConfig load_scenario_config(const std::string& path);
void apply_scenario_override(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value);

struct VehicleState {
    int id = 0;
    Road road = Road::NS;
    double dist_to_stopline_m = 0.0;  // 0 at the stop line, grows upstream
    double speed_mps = 0.0;
    Preference preference = Preference::Stops;
    int stop_count = 0;
    double wait_time_s = 0.0;
    bool is_stopped = true;
};

struct Observation {
    std::vector<double> occupancy;  // NS near->far, then WE near->far
};

struct VoteTally {
    std::vector<int> votes;  // one count per objective, [stops, wait]

    int votes_stops() const { return votes.empty() ? 0 : votes[0]; }
    int votes_wait() const { return votes.size() < 2 ? 0 : votes[1]; }
    int polled() const {
        int n = 0;
        for (int v : votes) n += v;
        return n;
    }
};

struct IntervalEvents {
    int new_stops = 0;
    double stopped_seconds = 0.0;
};

// Deterministic microsimulation of two one-way loop roads crossing at a
// single signalized point. One instance per thread; all randomness comes
// from the construction seed.
class SimWorld {
public:
    explicit SimWorld(const ScenarioConfig& cfg);

    void set_phase(Phase p) { phase_ = p; }
    Phase phase() const { return phase_; }
    int clock() const { return clock_; }
    const ScenarioConfig& config() const { return cfg_; }

    // Advances one second: car-following update in fixed order
    // (per road nearest-to-stopline first, NS before WE), then
    // stop/wait accounting.
    void tick();

    Observation observe() const;
    VoteTally poll_voters() const;

    // Returns and resets the stop/wait accumulators since the last drain.
    IntervalEvents drain_interval_events();

    // Count of vehicles currently on the upstream approaches.
    int approach_count() const;

    const std::vector<VehicleState>& vehicles(Road r) const {
        return vehicles_[static_cast<int>(r)];
    }

    double mean_speed(Road r) const;
    int total_stops(Road r) const;
    double total_wait(Road r) const;

private:
    void place_fleet(SplitMix64& rng);
    void update_road(Road r);

    ScenarioConfig cfg_;
    Phase phase_ = Phase::NSGreen;
    int clock_ = 0;
    std::vector<VehicleState> vehicles_[2];  // sorted by dist ascending
    IntervalEvents pending_;
};

SimWorld init_scenario(const ScenarioConfig& cfg);

}  // namespace crossvote
