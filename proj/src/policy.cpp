#include "crossvote/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossvote {

QVector normalize_q(const QVector& q, double temperature) {
    if (q.empty()) throw std::invalid_argument("normalize_q: empty vector");
    if (temperature <= 0.0) throw std::invalid_argument("normalize_q: temperature must be positive");
    for (double x : q)
        if (!std::isfinite(x)) throw std::invalid_argument("normalize_q: non-finite entry");
    double m = *std::max_element(q.begin(), q.end());
    QVector out(q.size());
    double sum = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        out[i] = std::exp((q[i] - m) / temperature);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

QVector integrate(const std::vector<QVector>& normalized, const Weights& w) {
    if (normalized.size() != w.size())
        throw std::invalid_argument("integrate: objective count mismatch");
    if (normalized.empty()) throw std::invalid_argument("integrate: no objectives");
    size_t n_actions = normalized[0].size();
    for (const auto& q : normalized)
        if (q.size() != n_actions)
            throw std::invalid_argument("integrate: action count mismatch");
    QVector out(n_actions, 0.0);
    for (size_t k = 0; k < normalized.size(); ++k)
        for (size_t a = 0; a < n_actions; ++a)
            out[a] += w[k] * normalized[k][a];
    return out;
}

int select_action(const QVector& q, int incumbent) {
    if (q.empty()) throw std::invalid_argument("select_action: empty vector");
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a)
        if (q[a] > q[best]) best = a;
    // keep the incumbent on exact ties
    if (incumbent >= 0 && incumbent < static_cast<int>(q.size()) &&
        q[incumbent] == q[best])
        return incumbent;
    return best;
}

Phase GreedyPolicy::decide(const SimWorld& world, Phase incumbent, DecisionRecord* rec) {
    Observation obs = world.observe();
    QVector q = forward(net_, obs.occupancy);
    int action = select_action(q, static_cast<int>(incumbent));
    if (rec) {
        rec->clock = world.clock();
        rec->incumbent = incumbent;
        rec->obs = obs;
        rec->tally = world.poll_voters();
        rec->q_per_objective = {normalize_q(q)};
        rec->q_integrated = q;
        rec->action = action;
    }
    return static_cast<Phase>(action);
}

MultiObjectivePolicy::MultiObjectivePolicy(std::vector<Mlp> nets, VoteRule rule,
                                           double temperature)
    : nets_(std::move(nets)), rule_(rule), temperature_(temperature) {
    if (nets_.empty()) throw std::invalid_argument("multi policy needs at least one net");
    for (const auto& n : nets_)
        if (n.input_dim() != nets_[0].input_dim() || n.output_dim() != nets_[0].output_dim())
            throw std::invalid_argument("multi policy nets must share dimensions");
}

int MultiObjectivePolicy::decide_from(const Observation& obs, const VoteTally& tally,
                                      Phase incumbent) const {
    Weights w = aggregate(rule_, tally);
    std::vector<QVector> qs;
    qs.reserve(nets_.size());
    for (const auto& net : nets_)
        qs.push_back(normalize_q(forward(net, obs.occupancy), temperature_));
    return select_action(integrate(qs, w), static_cast<int>(incumbent));
}

Phase MultiObjectivePolicy::decide(const SimWorld& world, Phase incumbent,
                                   DecisionRecord* rec) {
    Observation obs = world.observe();
    VoteTally tally = world.poll_voters();
    Weights w = aggregate(rule_, tally);
    std::vector<QVector> qs;
    qs.reserve(nets_.size());
    for (const auto& net : nets_)
        qs.push_back(normalize_q(forward(net, obs.occupancy), temperature_));
    QVector integrated = integrate(qs, w);
    int action = select_action(integrated, static_cast<int>(incumbent));
    if (rec) {
        rec->clock = world.clock();
        rec->incumbent = incumbent;
        rec->obs = obs;
        rec->tally = tally;
        rec->weights = w;
        rec->q_per_objective = qs;
        rec->q_integrated = integrated;
        rec->action = action;
    }
    return static_cast<Phase>(action);
}

}  // namespace crossvote
