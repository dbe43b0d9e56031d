#pragma once

#include <string>
#include <vector>

#include "crossvote/sim.hpp"

namespace crossvote {

// Per-objective weights, indexed like VoteTally::votes. Non-negative, sum 1.
using Weights = std::vector<double>;

enum class VoteRule { Majority, Proportional };

VoteRule parse_vote_rule(const std::string& name);
std::string vote_rule_name(VoteRule rule);

// One-hot on the unique argmax; uniform over tied leaders (which covers
// the empty tally as the all-tied case).
Weights majority_weights(const VoteTally& t);

// votes / total; uniform when nobody is polled.
Weights proportional_weights(const VoteTally& t);

Weights aggregate(VoteRule rule, const VoteTally& t);

}  // namespace crossvote
