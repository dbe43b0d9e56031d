#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crossvote/episode_log.hpp"
#include "crossvote/neural.hpp"
#include "crossvote/sim.hpp"
#include "crossvote/voting.hpp"

namespace crossvote {

using QVector = std::vector<double>;

// Softmax with max-subtraction; strictly positive, sums to 1, argmax
// preserved.
QVector normalize_q(const QVector& q, double temperature = 1.0);

// q'_a = sum_k w_k * q^k_a
QVector integrate(const std::vector<QVector>& normalized, const Weights& w);

// Argmax with ties broken toward the incumbent action.
int select_action(const QVector& q, int incumbent);

// A decision function over the sim world. Implementations act greedily;
// exploration exists only inside training.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string id() const = 0;
    virtual std::string vote_rule() const { return ""; }
    virtual Phase decide(const SimWorld& world, Phase incumbent, DecisionRecord* rec) = 0;
};

// Greedy argmax over a single trained network.
class GreedyPolicy : public Policy {
public:
    GreedyPolicy(std::string id, Mlp net) : id_(std::move(id)), net_(std::move(net)) {}
    std::string id() const override { return id_; }
    Phase decide(const SimWorld& world, Phase incumbent, DecisionRecord* rec) override;
    const Mlp& net() const { return net_; }

private:
    std::string id_;
    Mlp net_;
};

// Voting-integrated multi-objective policy: per-objective Q-vectors are
// softmax-normalized, weighted by the aggregated votes of the vehicles on
// the approaches, summed per action, and resolved with an argmax.
class MultiObjectivePolicy : public Policy {
public:
    MultiObjectivePolicy(std::vector<Mlp> nets, VoteRule rule, double temperature = 1.0);
    std::string id() const override { return "multi"; }
    std::string vote_rule() const override { return vote_rule_name(rule_); }
    Phase decide(const SimWorld& world, Phase incumbent, DecisionRecord* rec) override;

    // Decision on already-captured inputs; used for log replay.
    int decide_from(const Observation& obs, const VoteTally& tally, Phase incumbent) const;

private:
    std::vector<Mlp> nets_;  // objective order: stops, wait
    VoteRule rule_;
    double temperature_;
};

}  // namespace crossvote
