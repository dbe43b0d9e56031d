#include "crossvote/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace crossvote {

EpisodeLog run_episode(const ScenarioConfig& cfg, Policy& policy) {
    cfg.validate();
    SimWorld world = init_scenario(cfg);
    EpisodeLog log;
    log.scenario_id = std::to_string(cfg.n_ns) + "x" + std::to_string(cfg.n_we);
    log.seed = cfg.seed;
    log.policy_id = policy.id();
    log.vote_rule = policy.vote_rule();
    log.n_ns = cfg.n_ns;
    log.n_we = cfg.n_we;
    log.horizon_steps = cfg.horizon_steps;
    log.t_act = cfg.t_act;
    log.v_max_mps = cfg.v_max_mps;

    const int decisions = cfg.horizon_steps / cfg.t_act;
    log.decisions.reserve(decisions);
    log.seconds.reserve(cfg.horizon_steps);
    Phase incumbent = world.phase();
    for (int d = 0; d < decisions; ++d) {
        DecisionRecord rec;
        Phase next = policy.decide(world, incumbent, &rec);
        log.decisions.push_back(std::move(rec));
        world.set_phase(next);
        for (int t = 0; t < cfg.t_act; ++t) {
            world.tick();
            SecondRow row;
            row.clock = world.clock();
            row.phase = world.phase();
            row.speed_sum_ns = world.mean_speed(Road::NS) * cfg.n_ns;
            row.speed_sum_we = world.mean_speed(Road::WE) * cfg.n_we;
            row.cum_stops_ns = world.total_stops(Road::NS);
            row.cum_stops_we = world.total_stops(Road::WE);
            row.cum_wait_ns = world.total_wait(Road::NS);
            row.cum_wait_we = world.total_wait(Road::WE);
            log.seconds.push_back(row);
        }
        incumbent = next;
    }
    return log;
}

static std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_trace_csv(const EpisodeLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "clock,phase,mean_speed_ns,mean_speed_we,cum_stops_ns,cum_stops_we,"
           "cum_wait_ns,cum_wait_we\n";
    for (const auto& r : log.seconds) {
        out << r.clock << "," << (r.phase == Phase::NSGreen ? "NSGreen" : "WEGreen") << ","
            << fmt(log.n_ns > 0 ? r.speed_sum_ns / log.n_ns : 0.0) << ","
            << fmt(log.n_we > 0 ? r.speed_sum_we / log.n_we : 0.0) << ","
            << r.cum_stops_ns << "," << r.cum_stops_we << ","
            << fmt(r.cum_wait_ns) << "," << fmt(r.cum_wait_we) << "\n";
    }
}

SweepResult run_sweep(const std::vector<DemandSpec>& demands,
                      const std::vector<uint64_t>& seeds,
                      const std::vector<PolicySpec>& policies,
                      const ScenarioConfig& base_cfg, int parallelism) {
    if (seeds.empty()) throw std::invalid_argument("run_sweep: need at least one seed");
    if (parallelism < 1) parallelism = 1;

    struct Job {
        ScenarioConfig cfg;
        const PolicySpec* policy;
    };
    std::vector<Job> jobs;
    for (const auto& demand : demands) {
        for (const auto& policy : policies) {
            for (uint64_t seed : seeds) {
                ScenarioConfig cfg = base_cfg;
                cfg.n_ns = demand.n_ns;
                cfg.n_we = demand.n_we;
                cfg.seed = seed;
                jobs.push_back({cfg, &policy});
            }
        }
    }

    SweepResult result;
    result.logs.resize(jobs.size());
    result.reports.resize(jobs.size());

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size() || failed.load()) return;
            try {
                auto policy = jobs[i].policy->make();
                result.logs[i] = run_episode(jobs[i].cfg, *policy);
                result.reports[i] = metrics(result.logs[i]);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(error_mutex);
                if (!failed.exchange(true)) error_msg = e.what();
                return;
            }
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < parallelism; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failed.load()) throw std::runtime_error("sweep episode failed: " + error_msg);

    // aggregate in fixed (demand, policy) order, independent of execution order
    size_t idx = 0;
    for (const auto& demand : demands) {
        for (const auto& policy : policies) {
            SweepCell cell;
            cell.scenario = demand.name;
            cell.policy = policy.id;
            cell.vote_rule = policy.vote_rule;
            cell.n_seeds = static_cast<int>(seeds.size());
            std::vector<double> speeds, stops, waits;
            for (size_t s = 0; s < seeds.size(); ++s, ++idx) {
                speeds.push_back(result.reports[idx].mean_speed_mps);
                stops.push_back(static_cast<double>(result.reports[idx].total_stops));
                waits.push_back(result.reports[idx].mean_wait_s);
            }
            auto mean_std = [](const std::vector<double>& xs, double& mean, double& std) {
                mean = 0.0;
                for (double x : xs) mean += x;
                mean /= static_cast<double>(xs.size());
                double var = 0.0;
                for (double x : xs) var += (x - mean) * (x - mean);
                std = std::sqrt(var / static_cast<double>(xs.size()));
            };
            mean_std(speeds, cell.mean_speed_mean, cell.mean_speed_std);
            mean_std(stops, cell.total_stops_mean, cell.total_stops_std);
            mean_std(waits, cell.mean_wait_mean, cell.mean_wait_std);
            result.cells.push_back(cell);
        }
    }
    return result;
}

void write_sweep_csvs(const SweepResult& sweep, const std::string& per_seed_path,
                      const std::string& aggregate_path) {
    {
        std::ofstream out(per_seed_path);
        if (!out) throw std::runtime_error("cannot write " + per_seed_path);
        out << metrics_csv_header() << "\n";
        for (size_t i = 0; i < sweep.logs.size(); ++i) {
            const auto& log = sweep.logs[i];
            out << metrics_csv_row(log.scenario_id, log.seed, log.policy_id, log.vote_rule,
                                   sweep.reports[i], log.switch_rate())
                << "\n";
        }
    }
    {
        std::ofstream out(aggregate_path);
        if (!out) throw std::runtime_error("cannot write " + aggregate_path);
        out << "scenario,policy,vote_rule,n_seeds,mean_speed_mean,mean_speed_std,"
               "total_stops_mean,total_stops_std,mean_wait_mean,mean_wait_std\n";
        for (const auto& c : sweep.cells) {
            out << c.scenario << "," << c.policy << "," << c.vote_rule << "," << c.n_seeds
                << "," << fmt(c.mean_speed_mean) << "," << fmt(c.mean_speed_std) << ","
                << fmt(c.total_stops_mean) << "," << fmt(c.total_stops_std) << ","
                << fmt(c.mean_wait_mean) << "," << fmt(c.mean_wait_std) << "\n";
        }
    }
}

void emit_radar_data(const SweepResult& sweep, const std::string& path) {
    if (sweep.cells.empty()) throw std::invalid_argument("emit_radar_data: empty sweep");
    nlohmann::ordered_json root;
    for (const auto& c : sweep.cells) {
        std::string policy = c.policy;
        if (!c.vote_rule.empty()) policy += "-" + c.vote_rule;
        root[c.scenario][policy] = {
            {"speed", c.mean_speed_mean},
            {"stops", c.total_stops_mean},
            {"wait", c.mean_wait_mean},
        };
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << root.dump(2) << "\n";
}

std::vector<AgreementRow> alignment_analysis(const std::vector<EpisodeLog>& multi_logs,
                                             const Mlp& stops_net, const Mlp& wait_net) {
    std::map<std::string, std::string> bucket_of;
    for (const auto& d : standard_demands()) bucket_of[d.name] = d.bucket;

    struct Counts {
        int n = 0;
        int agree[3][3] = {};
    };
    std::map<std::pair<std::string, std::string>, Counts> groups;  // (bucket, rule)

    for (const auto& log : multi_logs) {
        if (log.policy_id != "multi")
            throw std::invalid_argument("alignment_analysis expects multi-policy logs");
        auto it = bucket_of.find(log.scenario_id);
        std::string bucket = it == bucket_of.end() ? "other" : it->second;
        Counts& c = groups[{bucket, log.vote_rule}];
        for (const auto& rec : log.decisions) {
            if (static_cast<int>(rec.obs.occupancy.size()) != stops_net.input_dim())
                throw std::invalid_argument("alignment_analysis: observation dim mismatch");
            int inc = static_cast<int>(rec.incumbent);
            int actions[3];
            actions[0] = select_action(forward(stops_net, rec.obs.occupancy), inc);
            actions[1] = select_action(forward(wait_net, rec.obs.occupancy), inc);
            actions[2] = rec.action;
            c.n += 1;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (actions[a] == actions[b]) c.agree[a][b] += 1;
        }
    }

    static const char* names[3] = {"stops", "wait", "multi"};
    std::vector<AgreementRow> rows;
    for (const auto& [key, c] : groups) {
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                AgreementRow row;
                row.bucket = key.first;
                row.vote_rule = key.second;
                row.policy_a = names[a];
                row.policy_b = names[b];
                row.n_decisions = c.n;
                row.agreement = c.n > 0 ? static_cast<double>(c.agree[a][b]) / c.n : 1.0;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_agreement_csv(const std::vector<AgreementRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "bucket,vote_rule,policy_a,policy_b,agreement,n_decisions\n";
    for (const auto& r : rows)
        out << r.bucket << "," << r.vote_rule << "," << r.policy_a << "," << r.policy_b
            << "," << fmt(r.agreement) << "," << r.n_decisions << "\n";
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string make_run_dir(const std::string& root, const std::string& effective_config) {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(effective_config)));
    std::filesystem::path dir = std::filesystem::path(root) / (std::string(stamp) + "_" + hash);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace crossvote
