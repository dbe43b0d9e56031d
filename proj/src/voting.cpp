#include "crossvote/voting.hpp"

#include <stdexcept>

namespace crossvote {

VoteRule parse_vote_rule(const std::string& name) {
    if (name == "majority") return VoteRule::Majority;
    if (name == "proportional") return VoteRule::Proportional;
    throw std::invalid_argument("unknown vote rule: " + name);
}

std::string vote_rule_name(VoteRule rule) {
    return rule == VoteRule::Majority ? "majority" : "proportional";
}

Weights majority_weights(const VoteTally& t) {
    size_t k = t.votes.size();
    Weights w(k, 0.0);
    if (k == 0) return w;
    int best = t.votes[0];
    for (int v : t.votes)
        if (v > best) best = v;
    int leaders = 0;
    for (int v : t.votes)
        if (v == best) ++leaders;
    for (size_t i = 0; i < k; ++i)
        if (t.votes[i] == best) w[i] = 1.0 / leaders;
    return w;
}

Weights proportional_weights(const VoteTally& t) {
    size_t k = t.votes.size();
    Weights w(k, 0.0);
    if (k == 0) return w;
    int total = t.polled();
    if (total == 0) {
        for (double& x : w) x = 1.0 / static_cast<double>(k);
        return w;
    }
    for (size_t i = 0; i < k; ++i)
        w[i] = static_cast<double>(t.votes[i]) / static_cast<double>(total);
    return w;
}

Weights aggregate(VoteRule rule, const VoteTally& t) {
    return rule == VoteRule::Majority ? majority_weights(t) : proportional_weights(t);
}

}  // namespace crossvote
