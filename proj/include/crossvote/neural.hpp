#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crossvote/rng.hpp"
#include "crossvote/sim.hpp"

namespace crossvote {

// Feedforward net: ReLU hidden layers, identity output head.
// weights[l] is row-major dims[l+1] x dims[l].
struct Mlp {
    std::vector<int> dims;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
};

// Xavier-uniform initialization from the given stream.
Mlp make_mlp(const std::vector<int>& dims, SplitMix64& rng);

std::vector<double> forward(const Mlp& net, const std::vector<double>& input);

// Same layout as the Mlp parameters.
struct Grads {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

struct TrainSample {
    std::vector<double> obs;
    int action = 0;
    double td_target = 0.0;
};

// Gradient of mean squared error between Q(obs)[action] and td_target
// over the batch. Non-chosen actions get zero loss gradient.
Grads gradients(const Mlp& net, const std::vector<TrainSample>& batch);

// Plain gradient descent.
void optimizer_step(Mlp& net, const Grads& g, double lr);

struct Transition {
    std::vector<double> obs;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_obs;
    bool terminal = false;
};

std::vector<double> td_targets(const std::vector<Transition>& batch,
                               const Mlp& target_net, double gamma);

class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

    void push(Transition t);
    size_t size() const { return data_.size(); }
    const Transition& operator[](size_t i) const { return data_[i]; }
    std::vector<Transition> sample(size_t batch_size, SplitMix64& rng) const;

private:
    size_t capacity_;
    size_t next_ = 0;
    std::vector<Transition> data_;
};

enum class RewardKind { Stops, Wait, Linear, Cobb };

RewardKind parse_reward_kind(const std::string& name);
std::string reward_kind_name(RewardKind k);

struct Hyperparams {
    double gamma = 0.99;
    double learning_rate = 1e-3;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int epsilon_decay_steps = 20000;
    int buffer_capacity = 50000;
    int batch_size = 32;
    int target_sync_every = 500;
    int train_episodes = 200;
    std::vector<int> hidden_dims = {64, 64};
    // when true, each episode draws its demand uniformly from the six
    // standard (N, W) configurations instead of using the base scenario's
    bool randomize_demand = true;
    uint64_t seed = 0;

    void validate() const;
    std::string describe() const;
};

void apply_hyperparam_override(Hyperparams& hp, const std::string& key,
                               const std::string& value);

// Exploration probability after `step` action selections: linear decay
// from epsilon_start to epsilon_end, reaching the floor at decay_steps.
double epsilon_at(const Hyperparams& hp, int64_t step);

// Reusable fitted Q-iteration core: epsilon-greedy action selection plus
// replay-buffer updates against a periodically synced target network.
// Environment-agnostic so the same loop can be driven by the traffic
// world or a hand-built MDP.
class DqnTrainer {
public:
    DqnTrainer(const std::vector<int>& dims, const Hyperparams& hp);

    int select_action(const std::vector<double>& obs, int fallback);
    void record(Transition t);

    const Mlp& online() const { return online_; }
    Mlp take_online() { return std::move(online_); }
    int64_t updates() const { return update_count_; }

private:
    void learn_step();

    Hyperparams hp_;
    SplitMix64 rng_;
    Mlp online_;
    Mlp target_;
    ReplayBuffer buffer_;
    int64_t step_count_ = 0;
    int64_t update_count_ = 0;
};

struct TrainResult {
    Mlp net;
    std::vector<double> episode_returns;
};

TrainResult train_dqn(const ScenarioConfig& base_cfg, RewardKind kind,
                      const Hyperparams& hp);

void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

// The six (N, W) demand configurations.
struct DemandSpec {
    int n_ns;
    int n_we;
    std::string name;    // e.g. "22x11"
    std::string bucket;  // low | medium | high
};
const std::vector<DemandSpec>& standard_demands();

}  // namespace crossvote
