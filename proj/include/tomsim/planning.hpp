#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tomsim/core.hpp"
#include "tomsim/rng.hpp"

namespace tomsim::planning {

// Simulator contract (duck-typed):
//   using State = ...;                       copyable
//   int num_actions(const State&) const;
//   bool terminal(const State&) const;
//   // Apply own action; state becomes "awaiting reaction"; returns the exact
//   // distribution over opponent reactions.
//   std::vector<double> act(State&, int own) const;
//   // Apply the reaction; returns the planning agent's reward and advances
//   // the state to the next decision point.
//   double react(State&, int own, int opp) const;

// Exact depth-limited expectimax. depth counts decision levels beyond the
// immediate one: depth 0 returns the expected immediate reward.
template <class Sim>
std::vector<double> expectimax(const Sim& sim, const typename Sim::State& s,
                               int depth, double gamma) {
  const int na = sim.num_actions(s);
  if (na <= 0) throw std::runtime_error("expectimax: no legal actions");
  std::vector<double> q(na, 0.0);
  for (int a = 0; a < na; ++a) {
    typename Sim::State sa = s;
    const std::vector<double> probs = sim.act(sa, a);
    for (size_t o = 0; o < probs.size(); ++o) {
      if (probs[o] <= 0.0) continue;
      typename Sim::State so = sa;
      const double r = sim.react(so, a, static_cast<int>(o));
      double cont = 0.0;
      if (depth > 0 && !sim.terminal(so)) {
        const std::vector<double> qn = expectimax(sim, so, depth - 1, gamma);
        cont = *std::max_element(qn.begin(), qn.end());
      }
      q[a] += probs[o] * (r + gamma * cont);
    }
  }
  return q;
}

template <class State>
struct SearchNode {
  std::vector<double> q;     // running mean return per own action
  std::vector<int> n;        // visit count per own action
  std::vector<double> sum;   // total backed-up return per own action
  int visits = 0;
  struct Edge {
    int node;
    double reward;
  };
  std::map<std::pair<int, int>, Edge> child;    // (own, reaction) -> edge
  std::map<int, std::vector<double>> reaction;  // own -> reaction distribution
  State state;                                  // decision-point state
  bool leaf_terminal = false;
};

struct IpomcpResult {
  std::vector<double> q;
  std::vector<int> visits;
};

// Monte-Carlo tree search over the exact opponent model: reactions are
// sampled from the simulator's exact distribution, rollouts pick own actions
// uniformly. act/react are deterministic given the state (all stochastic
// model machinery is keyed off state-internal streams), so each node caches
// its decision-point state, per-action reaction distributions and edge
// rewards; the nested model advances bit-exactly but runs only once per
// tree edge. A fresh tree is built per call and the result is deterministic
// for a given RandomSource.
template <class Sim>
IpomcpResult ipomcp(const Sim& sim, const typename Sim::State& root, int iterations,
                    double c_uct, double gamma, RandomSource rng) {
  if (iterations < 1) throw std::invalid_argument("planner: iteration budget must be positive");
  const int na = sim.num_actions(root);
  if (na <= 0) throw std::runtime_error("planner: no legal actions");

  using Node = SearchNode<typename Sim::State>;
  std::vector<Node> arena;
  arena.reserve(static_cast<size_t>(iterations) + 1);
  arena.emplace_back();
  arena[0].q.assign(na, 0.0);
  arena[0].n.assign(na, 0);
  arena[0].sum.assign(na, 0.0);
  arena[0].state = root;

  struct PathStep {
    int node;
    int action;
  };
  std::vector<PathStep> path;
  std::vector<double> step_reward;

  for (int it = 0; it < iterations; ++it) {
    path.clear();
    step_reward.clear();
    int node = 0;
    double tail = 0.0;  // rollout return from the frontier

    while (true) {
      int a = -1;
      {
        const Node& nd = arena[node];
        for (size_t i = 0; i < nd.n.size(); ++i)
          if (nd.n[i] == 0) {
            a = static_cast<int>(i);
            break;
          }
        if (a < 0) {
          double best = -std::numeric_limits<double>::infinity();
          const double logn = std::log(static_cast<double>(nd.visits));
          for (size_t i = 0; i < nd.n.size(); ++i) {
            const double u = nd.q[i] + c_uct * std::sqrt(logn / nd.n[i]);
            if (u > best) {
              best = u;
              a = static_cast<int>(i);
            }
          }
        }
      }

      auto it_probs = arena[node].reaction.find(a);
      if (it_probs == arena[node].reaction.end()) {
        typename Sim::State tmp = arena[node].state;
        it_probs = arena[node].reaction.emplace(a, sim.act(tmp, a)).first;
      }
      const int o = sample_index(it_probs->second, rng);
      path.push_back({node, a});

      auto it_child = arena[node].child.find({a, o});
      if (it_child != arena[node].child.end()) {
        step_reward.push_back(it_child->second.reward);
        const int next = it_child->second.node;
        if (arena[next].leaf_terminal) {
          tail = 0.0;
          break;
        }
        node = next;
        continue;
      }

      // New edge: advance the model once, then roll out.
      typename Sim::State s = arena[node].state;
      sim.act(s, a);
      const double r = sim.react(s, a, o);
      step_reward.push_back(r);
      const int fresh = static_cast<int>(arena.size());
      arena.emplace_back();
      Node& leaf = arena[fresh];
      leaf.leaf_terminal = sim.terminal(s);
      if (!leaf.leaf_terminal) {
        const int cna = sim.num_actions(s);
        leaf.q.assign(cna, 0.0);
        leaf.n.assign(cna, 0);
        leaf.sum.assign(cna, 0.0);
      }
      leaf.state = s;
      arena[node].child.emplace(std::make_pair(a, o), typename Node::Edge{fresh, r});
      // Rollout from the new leaf: uniform own actions, exact reactions.
      double w = 1.0;
      while (!sim.terminal(s)) {
        const int ra = static_cast<int>(rng.uniform() * sim.num_actions(s));
        const std::vector<double> rp = sim.act(s, ra);
        const int ro = sample_index(rp, rng);
        tail += w * sim.react(s, ra, ro);
        w *= gamma;
      }
      break;
    }

    // Backup: discounted return from each path step.
    double g = tail;
    for (int i = static_cast<int>(path.size()) - 1; i >= 0; --i) {
      g = step_reward[i] + gamma * g;
      Node& nd = arena[path[i].node];
      nd.visits += 1;
      nd.n[path[i].action] += 1;
      nd.sum[path[i].action] += g;
      nd.q[path[i].action] = nd.sum[path[i].action] / nd.n[path[i].action];
    }
  }

  return {arena[0].q, arena[0].n};
}

}  // namespace tomsim::planning
