#include "crossvote/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crossvote {

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario config: " + msg); };
    if (n_ns < 0 || n_we < 0) fail("vehicle counts must be non-negative");
    if (horizon_steps <= 0) fail("horizon_steps must be positive");
    if (t_act <= 0) fail("t_act must be positive");
    if (loop_length_m <= 0 || approach_length_m <= 0 || v_max_mps <= 0 ||
        accel_mps2 <= 0 || decel_mps2 <= 0 || vehicle_length_m <= 0 ||
        min_gap_m <= 0 || stop_speed_threshold_mps <= 0)
        fail("physical parameters must be strictly positive");
    if (approach_length_m > loop_length_m) fail("approach longer than loop");
    if (n_segments <= 0) fail("n_segments must be positive");
    if (preference_split < 0.0 || preference_split > 1.0) fail("preference_split outside [0,1]");
    double slot = vehicle_length_m + min_gap_m;
    if (n_ns * slot >= loop_length_m) fail("NS fleet does not fit on the loop");
    if (n_we * slot >= loop_length_m) fail("WE fleet does not fit on the loop");
}

std::string ScenarioConfig::describe() const {
    std::ostringstream os;
    os << "n_ns = " << n_ns << "\n"
       << "n_we = " << n_we << "\n"
       << "horizon_steps = " << horizon_steps << "\n"
       << "t_act = " << t_act << "\n"
       << "loop_length_m = " << loop_length_m << "\n"
       << "approach_length_m = " << approach_length_m << "\n"
       << "n_segments = " << n_segments << "\n"
       << "v_max_mps = " << v_max_mps << "\n"
       << "accel_mps2 = " << accel_mps2 << "\n"
       << "decel_mps2 = " << decel_mps2 << "\n"
       << "vehicle_length_m = " << vehicle_length_m << "\n"
       << "min_gap_m = " << min_gap_m << "\n"
       << "stop_speed_threshold_mps = " << stop_speed_threshold_mps << "\n"
       << "preference_split = " << preference_split << "\n"
       << "seed = " << seed << "\n";
    return os.str();
}

void apply_scenario_override(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
    try {
        if (key == "n_ns") cfg.n_ns = std::stoi(value);
        else if (key == "n_we") cfg.n_we = std::stoi(value);
        else if (key == "horizon_steps") cfg.horizon_steps = std::stoi(value);
        else if (key == "t_act") cfg.t_act = std::stoi(value);
        else if (key == "loop_length_m") cfg.loop_length_m = std::stod(value);
        else if (key == "approach_length_m") cfg.approach_length_m = std::stod(value);
        else if (key == "n_segments") cfg.n_segments = std::stoi(value);
        else if (key == "v_max_mps") cfg.v_max_mps = std::stod(value);
        else if (key == "accel_mps2") cfg.accel_mps2 = std::stod(value);
        else if (key == "decel_mps2") cfg.decel_mps2 = std::stod(value);
        else if (key == "vehicle_length_m") cfg.vehicle_length_m = std::stod(value);
        else if (key == "min_gap_m") cfg.min_gap_m = std::stod(value);
        else if (key == "stop_speed_threshold_mps") cfg.stop_speed_threshold_mps = std::stod(value);
        else if (key == "preference_split") cfg.preference_split = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else throw std::invalid_argument("unknown scenario key: " + key);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for scenario key " + key + ": " + value);
    }
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    ScenarioConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (blank) continue;
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_scenario_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

SimWorld::SimWorld(const ScenarioConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    SplitMix64 rng(cfg_.seed);
    place_fleet(rng);
}

void SimWorld::place_fleet(SplitMix64& rng) {
    const double slot = cfg_.vehicle_length_m + cfg_.min_gap_m;
    int next_id = 0;
    for (int r = 0; r < 2; ++r) {
        int n = (r == 0) ? cfg_.n_ns : cfg_.n_we;
        auto& vs = vehicles_[r];
        vs.reserve(n);
        std::vector<double> placed;
        for (int i = 0; i < n; ++i) {
            bool ok = false;
            for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
                double d = rng.uniform() * cfg_.loop_length_m;
                ok = true;
                for (double other : placed) {
                    double fwd = std::fmod(d - other + cfg_.loop_length_m, cfg_.loop_length_m);
                    double bwd = cfg_.loop_length_m - fwd;
                    if (fwd < slot || bwd < slot) { ok = false; break; }
                }
                if (ok) placed.push_back(d);
            }
            if (!ok)
                throw std::runtime_error("fleet placement failed: cannot fit vehicles without overlap");
        }
        for (double d : placed) {
            VehicleState v;
            v.id = next_id++;
            v.road = static_cast<Road>(r);
            v.dist_to_stopline_m = d;
            v.speed_mps = 0.0;
            v.is_stopped = true;
            vs.push_back(v);
        }
        std::sort(vs.begin(), vs.end(), [](const VehicleState& a, const VehicleState& b) {
            return a.dist_to_stopline_m < b.dist_to_stopline_m;
        });
    }

    // preference assignment: seeded shuffle of the whole fleet, first
    // round(split * fleet) prefer Stops
    int fleet = cfg_.fleet_size();
    std::vector<int> order(fleet);
    for (int i = 0; i < fleet; ++i) order[i] = i;
    for (int i = fleet - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    int n_stops = static_cast<int>(std::llround(cfg_.preference_split * fleet));
    std::vector<Preference> pref(fleet, Preference::Wait);
    for (int i = 0; i < n_stops; ++i) pref[order[i]] = Preference::Stops;
    for (auto& vs : vehicles_)
        for (auto& v : vs) v.preference = pref[v.id];
}

void SimWorld::update_road(Road road) {
    auto& vs = vehicles_[static_cast<int>(road)];
    const int n = static_cast<int>(vs.size());
    if (n == 0) return;
    const double dt = 1.0;
    const double L = cfg_.loop_length_m;
    const bool red = (road == Road::NS) ? (phase_ != Phase::NSGreen) : (phase_ != Phase::WEGreen);

    for (int i = 0; i < n; ++i) {
        VehicleState& v = vs[i];
        double v_new = std::min(v.speed_mps + cfg_.accel_mps2 * dt, cfg_.v_max_mps);

        if (n > 1) {
            // leader = next vehicle ahead on the loop; for i > 0 it has
            // already moved this tick, for i == 0 it wraps to the last
            // vehicle, not yet updated, whose move we anticipate by its
            // current speed (the frozen-leader gap cap below still rules
            // out overlap if it brakes instead)
            const VehicleState& leader = (i > 0) ? vs[i - 1] : vs[n - 1];
            double anticipated = (i > 0) ? 0.0 : leader.speed_mps * dt;
            double gap = std::fmod(v.dist_to_stopline_m - leader.dist_to_stopline_m + L, L) -
                         cfg_.vehicle_length_m;
            double v_safe = (gap + anticipated - cfg_.min_gap_m) / dt;
            v_new = std::min(v_new, v_safe);
            // bounded braking toward the leader, but never into overlap
            v_new = std::max(v_new, v.speed_mps - cfg_.decel_mps2 * dt);
            v_new = std::min(v_new, gap / dt);
        } else {
            v_new = std::max(v_new, v.speed_mps - cfg_.decel_mps2 * dt);
        }

        if (red) {
            // virtual stationary obstacle at the stop line; emergency
            // braking for red always succeeds
            v_new = std::min(v_new, v.dist_to_stopline_m / dt);
        }
        v_new = std::max(v_new, 0.0);

        double d = v.dist_to_stopline_m - v_new * dt;
        if (d < 0.0) d += L;
        // a tiny negative can round back up to exactly L; keep [0, L)
        if (d >= L) d = std::nextafter(L, 0.0);
        v.dist_to_stopline_m = d;
        v.speed_mps = v_new;

        bool stopped = v_new < cfg_.stop_speed_threshold_mps;
        if (stopped && !v.is_stopped) {
            v.stop_count += 1;
            pending_.new_stops += 1;
        }
        if (stopped) {
            v.wait_time_s += dt;
            pending_.stopped_seconds += dt;
        }
        v.is_stopped = stopped;
    }

    std::sort(vs.begin(), vs.end(), [](const VehicleState& a, const VehicleState& b) {
        return a.dist_to_stopline_m < b.dist_to_stopline_m;
    });
}

void SimWorld::tick() {
    update_road(Road::NS);
    update_road(Road::WE);
    clock_ += 1;
}

Observation SimWorld::observe() const {
    Observation obs;
    obs.occupancy.assign(2 * cfg_.n_segments, 0.0);
    const double bin = cfg_.approach_length_m / cfg_.n_segments;
    for (int r = 0; r < 2; ++r) {
        for (const auto& v : vehicles_[r]) {
            if (v.dist_to_stopline_m >= cfg_.approach_length_m) continue;
            int seg = static_cast<int>(v.dist_to_stopline_m / bin);
            if (seg >= cfg_.n_segments) seg = cfg_.n_segments - 1;
            obs.occupancy[r * cfg_.n_segments + seg] += cfg_.vehicle_length_m / bin;
        }
    }
    for (double& o : obs.occupancy) o = std::min(o, 1.0);
    return obs;
}

VoteTally SimWorld::poll_voters() const {
    VoteTally t;
    t.votes.assign(2, 0);
    for (const auto& vs : vehicles_)
        for (const auto& v : vs)
            if (v.dist_to_stopline_m < cfg_.approach_length_m)
                t.votes[static_cast<int>(v.preference)] += 1;
    return t;
}

IntervalEvents SimWorld::drain_interval_events() {
    IntervalEvents ev = pending_;
    pending_ = IntervalEvents{};
    return ev;
}

int SimWorld::approach_count() const {
    int n = 0;
    for (const auto& vs : vehicles_)
        for (const auto& v : vs)
            if (v.dist_to_stopline_m < cfg_.approach_length_m) ++n;
    return n;
}

double SimWorld::mean_speed(Road r) const {
    const auto& vs = vehicles_[static_cast<int>(r)];
    if (vs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& v : vs) s += v.speed_mps;
    return s / static_cast<double>(vs.size());
}

int SimWorld::total_stops(Road r) const {
    int s = 0;
    for (const auto& v : vehicles_[static_cast<int>(r)]) s += v.stop_count;
    return s;
}

double SimWorld::total_wait(Road r) const {
    double s = 0.0;
    for (const auto& v : vehicles_[static_cast<int>(r)]) s += v.wait_time_s;
    return s;
}

SimWorld init_scenario(const ScenarioConfig& cfg) { return SimWorld(cfg); }

}  // namespace crossvote
