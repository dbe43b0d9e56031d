#include "crossvote/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crossvote/rewards.hpp"

namespace crossvote {

Mlp make_mlp(const std::vector<int>& dims, SplitMix64& rng) {
    if (dims.size() < 2) throw std::invalid_argument("mlp needs at least input and output dims");
    for (int d : dims)
        if (d <= 0) throw std::invalid_argument("mlp dims must be positive");
    Mlp net;
    net.dims = dims;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        int fan_in = dims[l], fan_out = dims[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::vector<double> w(static_cast<size_t>(fan_in) * fan_out);
        for (double& x : w) x = (rng.uniform() * 2.0 - 1.0) * bound;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

static void forward_cached(const Mlp& net, const std::vector<double>& input,
                           std::vector<std::vector<double>>& acts) {
    if (static_cast<int>(input.size()) != net.input_dim())
        throw std::invalid_argument("forward: input dimension mismatch");
    acts.clear();
    acts.push_back(input);
    const size_t L = net.weights.size();
    for (size_t l = 0; l < L; ++l) {
        int in = net.dims[l], out = net.dims[l + 1];
        std::vector<double> y(out);
        const double* w = net.weights[l].data();
        const double* x = acts.back().data();
        for (int o = 0; o < out; ++o) {
            double s = net.biases[l][o];
            const double* row = w + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) s += row[i] * x[i];
            y[o] = (l + 1 < L && s < 0.0) ? 0.0 : s;  // ReLU on hidden layers
        }
        acts.push_back(std::move(y));
    }
}

std::vector<double> forward(const Mlp& net, const std::vector<double>& input) {
    std::vector<std::vector<double>> acts;
    forward_cached(net, input, acts);
    return acts.back();
}

Grads gradients(const Mlp& net, const std::vector<TrainSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("gradients: empty batch");
    Grads g;
    for (size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.emplace_back(net.weights[l].size(), 0.0);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    const size_t L = net.weights.size();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<std::vector<double>> acts;
    for (const auto& s : batch) {
        forward_cached(net, s.obs, acts);
        if (s.action < 0 || s.action >= net.output_dim())
            throw std::invalid_argument("gradients: action out of range");
        // d(mean squared error)/d(output)
        std::vector<double> delta(net.output_dim(), 0.0);
        delta[s.action] = 2.0 * (acts.back()[s.action] - s.td_target) * inv_b;
        for (size_t l = L; l-- > 0;) {
            int in = net.dims[l], out = net.dims[l + 1];
            const double* x = acts[l].data();
            for (int o = 0; o < out; ++o) {
                double d = delta[o];
                if (d == 0.0) continue;
                g.biases[l][o] += d;
                double* grow = g.weights[l].data() + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) grow[i] += d * x[i];
            }
            if (l == 0) break;
            std::vector<double> prev(in, 0.0);
            const double* w = net.weights[l].data();
            for (int o = 0; o < out; ++o) {
                double d = delta[o];
                if (d == 0.0) continue;
                const double* row = w + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) prev[i] += d * row[i];
            }
            // ReLU gate of the layer below
            for (int i = 0; i < in; ++i)
                if (acts[l][i] <= 0.0) prev[i] = 0.0;
            delta = std::move(prev);
        }
    }
    return g;
}

void optimizer_step(Mlp& net, const Grads& g, double lr) {
    if (g.weights.size() != net.weights.size())
        throw std::invalid_argument("optimizer_step: layer count mismatch");
    for (size_t l = 0; l < net.weights.size(); ++l) {
        if (g.weights[l].size() != net.weights[l].size() ||
            g.biases[l].size() != net.biases[l].size())
            throw std::invalid_argument("optimizer_step: shape mismatch");
        for (size_t i = 0; i < net.weights[l].size(); ++i)
            net.weights[l][i] -= lr * g.weights[l][i];
        for (size_t i = 0; i < net.biases[l].size(); ++i)
            net.biases[l][i] -= lr * g.biases[l][i];
    }
}

std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const Mlp& target_net, double gamma) {
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const auto& t : batch) {
        double boot = 0.0;
        if (!t.terminal) {
            std::vector<double> q = forward(target_net, t.next_obs);
            boot = *std::max_element(q.begin(), q.end());
        }
        targets.push_back(t.reward + gamma * boot);
    }
    return targets;
}

void ReplayBuffer::push(Transition t) {
    if (capacity_ == 0) return;
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(size_t batch_size, SplitMix64& rng) const {
    if (data_.empty()) throw std::runtime_error("sample from empty replay buffer");
    std::vector<Transition> out;
    out.reserve(batch_size);
    for (size_t i = 0; i < batch_size; ++i)
        out.push_back(data_[rng.uniform_int(data_.size())]);
    return out;
}

RewardKind parse_reward_kind(const std::string& name) {
    if (name == "stops") return RewardKind::Stops;
    if (name == "wait") return RewardKind::Wait;
    if (name == "linear") return RewardKind::Linear;
    if (name == "cobb") return RewardKind::Cobb;
    throw std::invalid_argument("unknown reward: " + name +
                                " (expected stops|wait|linear|cobb)");
}

std::string reward_kind_name(RewardKind k) {
    switch (k) {
        case RewardKind::Stops: return "stops";
        case RewardKind::Wait: return "wait";
        case RewardKind::Linear: return "linear";
        case RewardKind::Cobb: return "cobb";
    }
    return "?";
}

void Hyperparams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("hyperparams: " + msg); };
    if (gamma < 0.0 || gamma >= 1.0) fail("gamma must be in [0,1)");
    if (learning_rate <= 0.0) fail("learning_rate must be positive");
    if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 ||
        epsilon_end > epsilon_start)
        fail("epsilon schedule must satisfy 0 <= end <= start <= 1");
    if (epsilon_decay_steps <= 0) fail("epsilon_decay_steps must be positive");
    if (buffer_capacity <= 0 || batch_size <= 0 || target_sync_every <= 0)
        fail("buffer/batch/sync settings must be positive");
    if (train_episodes < 0) fail("train_episodes must be non-negative");
    for (int d : hidden_dims)
        if (d <= 0) fail("hidden dims must be positive");
}

std::string Hyperparams::describe() const {
    std::ostringstream os;
    os << "gamma = " << gamma << "\n"
       << "learning_rate = " << learning_rate << "\n"
       << "epsilon_start = " << epsilon_start << "\n"
       << "epsilon_end = " << epsilon_end << "\n"
       << "epsilon_decay_steps = " << epsilon_decay_steps << "\n"
       << "buffer_capacity = " << buffer_capacity << "\n"
       << "batch_size = " << batch_size << "\n"
       << "target_sync_every = " << target_sync_every << "\n"
       << "train_episodes = " << train_episodes << "\n";
    os << "hidden_dims = ";
    for (size_t i = 0; i < hidden_dims.size(); ++i)
        os << (i ? "," : "") << hidden_dims[i];
    os << "\n"
       << "randomize_demand = " << (randomize_demand ? 1 : 0) << "\n"
       << "seed = " << seed << "\n";
    return os.str();
}

void apply_hyperparam_override(Hyperparams& hp, const std::string& key,
                               const std::string& value) {
    try {
        if (key == "gamma") hp.gamma = std::stod(value);
        else if (key == "learning_rate") hp.learning_rate = std::stod(value);
        else if (key == "epsilon_start") hp.epsilon_start = std::stod(value);
        else if (key == "epsilon_end") hp.epsilon_end = std::stod(value);
        else if (key == "epsilon_decay_steps") hp.epsilon_decay_steps = std::stoi(value);
        else if (key == "buffer_capacity") hp.buffer_capacity = std::stoi(value);
        else if (key == "batch_size") hp.batch_size = std::stoi(value);
        else if (key == "target_sync_every") hp.target_sync_every = std::stoi(value);
        else if (key == "train_episodes") hp.train_episodes = std::stoi(value);
        else if (key == "randomize_demand") hp.randomize_demand = std::stoi(value) != 0;
        else if (key == "seed") hp.seed = std::stoull(value);
        else if (key == "hidden_dims") {
            hp.hidden_dims.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                hp.hidden_dims.push_back(std::stoi(tok));
        } else {
            throw std::invalid_argument("unknown hyperparameter: " + key);
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for hyperparameter " + key + ": " + value);
    }
}

double epsilon_at(const Hyperparams& hp, int64_t step) {
    double frac = static_cast<double>(step) / hp.epsilon_decay_steps;
    if (frac > 1.0) frac = 1.0;
    return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac;
}

DqnTrainer::DqnTrainer(const std::vector<int>& dims, const Hyperparams& hp)
    : hp_(hp),
      rng_(hp.seed),
      online_(make_mlp(dims, rng_)),
      target_(online_),
      buffer_(static_cast<size_t>(hp.buffer_capacity)) {
    hp_.validate();
}

int DqnTrainer::select_action(const std::vector<double>& obs, int fallback) {
    double eps = epsilon_at(hp_, step_count_);
    step_count_ += 1;
    if (rng_.uniform() < eps)
        return static_cast<int>(rng_.uniform_int(online_.output_dim()));
    std::vector<double> q = forward(online_, obs);
    int best = fallback;
    double best_q = q[fallback];
    for (int a = 0; a < static_cast<int>(q.size()); ++a)
        if (q[a] > best_q) { best = a; best_q = q[a]; }
    return best;
}

void DqnTrainer::record(Transition t) {
    buffer_.push(std::move(t));
    if (buffer_.size() >= static_cast<size_t>(hp_.batch_size)) learn_step();
}

void DqnTrainer::learn_step() {
    std::vector<Transition> batch = buffer_.sample(hp_.batch_size, rng_);
    std::vector<double> targets = td_targets(batch, target_, hp_.gamma);
    std::vector<TrainSample> samples(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        samples[i].obs = std::move(batch[i].obs);
        samples[i].action = batch[i].action;
        samples[i].td_target = targets[i];
    }
    optimizer_step(online_, gradients(online_, samples), hp_.learning_rate);
    update_count_ += 1;
    if (update_count_ % hp_.target_sync_every == 0) target_ = online_;
}

const std::vector<DemandSpec>& standard_demands() {
    static const std::vector<DemandSpec> demands = {
        {11, 6, "11x6", "low"},     {11, 11, "11x11", "low"},
        {22, 11, "22x11", "medium"}, {22, 22, "22x22", "medium"},
        {32, 16, "32x16", "high"},  {32, 32, "32x32", "high"},
    };
    return demands;
}

// Interval reward for training. Stops and wait are scaled by fixed whole-
// fleet interval ceilings so the reward scale is constant within an
// episode and TD targets stay in a range plain gradient descent handles;
// the combined rewards use their own approach-based normalization.
static double interval_reward(RewardKind kind, const IntervalEvents& ev,
                              const RewardParams& approach_params,
                              const RewardParams& fleet_params) {
    double r_s = reward_stops(ev);
    double r_w = reward_wait(ev);
    switch (kind) {
        case RewardKind::Stops: return r_s / fleet_params.max_stops_norm;
        case RewardKind::Wait: return r_w / fleet_params.max_wait_norm;
        case RewardKind::Linear: return reward_linear(r_s, r_w, approach_params);
        case RewardKind::Cobb: return reward_cobb_douglas(r_s, r_w, approach_params);
    }
    return 0.0;
}

TrainResult train_dqn(const ScenarioConfig& base_cfg, RewardKind kind,
                      const Hyperparams& hp) {
    base_cfg.validate();
    hp.validate();
    std::vector<int> dims;
    dims.push_back(2 * base_cfg.n_segments);
    for (int h : hp.hidden_dims) dims.push_back(h);
    dims.push_back(2);

    DqnTrainer trainer(dims, hp);
    SplitMix64 demand_rng(derive_seed(hp.seed, 0x5eedULL));

    TrainResult result;
    const auto& demands = standard_demands();
    const int decisions = base_cfg.horizon_steps / base_cfg.t_act;
    for (int ep = 0; ep < hp.train_episodes; ++ep) {
        ScenarioConfig cfg = base_cfg;
        if (hp.randomize_demand) {
            const DemandSpec& d = demands[demand_rng.uniform_int(demands.size())];
            cfg.n_ns = d.n_ns;
            cfg.n_we = d.n_we;
        }
        cfg.seed = derive_seed(hp.seed, static_cast<uint64_t>(ep) + 1);
        SimWorld world = init_scenario(cfg);
        RewardParams fleet_params = default_reward_params(cfg.fleet_size(), cfg.t_act);
        double ep_return = 0.0;
        Phase incumbent = world.phase();
        for (int d = 0; d < decisions; ++d) {
            Observation obs = world.observe();
            RewardParams params = default_reward_params(world.approach_count(), cfg.t_act);
            int action = trainer.select_action(obs.occupancy, static_cast<int>(incumbent));
            world.set_phase(static_cast<Phase>(action));
            for (int t = 0; t < cfg.t_act; ++t) world.tick();
            IntervalEvents ev = world.drain_interval_events();
            double reward = interval_reward(kind, ev, params, fleet_params);
            ep_return += reward;
            Transition tr;
            tr.obs = std::move(obs.occupancy);
            tr.action = action;
            tr.reward = reward;
            tr.next_obs = world.observe().occupancy;
            tr.terminal = (d == decisions - 1);
            trainer.record(std::move(tr));
            incumbent = static_cast<Phase>(action);
        }
        result.episode_returns.push_back(ep_return);
    }
    result.net = trainer.take_online();
    return result;
}

static const char kMagic[] = "CROSSVOTE-NET";
static const uint32_t kVersion = 1;

void save_checkpoint(const Mlp& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof(kMagic) - 1);
    auto write_u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    write_u32(kVersion);
    write_u32(static_cast<uint32_t>(net.dims.size()));
    for (int d : net.dims) write_u32(static_cast<uint32_t>(d));
    for (size_t l = 0; l < net.weights.size(); ++l) {
        out.write(reinterpret_cast<const char*>(net.weights[l].data()),
                  static_cast<std::streamsize>(net.weights[l].size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(net.biases[l].data()),
                  static_cast<std::streamsize>(net.biases[l].size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Mlp load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[sizeof(kMagic) - 1];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("corrupt checkpoint (bad magic): " + path);
    auto read_u32 = [&]() {
        uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        if (!in) throw std::runtime_error("corrupt checkpoint (truncated header): " + path);
        return v;
    };
    uint32_t version = read_u32();
    if (version != kVersion)
        throw std::runtime_error("checkpoint version mismatch in " + path + ": got " +
                                 std::to_string(version));
    uint32_t n_dims = read_u32();
    if (n_dims < 2 || n_dims > 64)
        throw std::runtime_error("corrupt checkpoint (bad layer count): " + path);
    Mlp net;
    for (uint32_t i = 0; i < n_dims; ++i) {
        uint32_t d = read_u32();
        if (d == 0 || d > 1u << 20)
            throw std::runtime_error("corrupt checkpoint (bad dimension): " + path);
        net.dims.push_back(static_cast<int>(d));
    }
    for (size_t l = 0; l + 1 < net.dims.size(); ++l) {
        size_t wn = static_cast<size_t>(net.dims[l]) * net.dims[l + 1];
        std::vector<double> w(wn), b(net.dims[l + 1]);
        in.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(wn * sizeof(double)));
        in.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(b.size() * sizeof(double)));
        if (!in) throw std::runtime_error("corrupt checkpoint (truncated): " + path);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("corrupt checkpoint (trailing bytes): " + path);
    return net;
}

}  // namespace crossvote
