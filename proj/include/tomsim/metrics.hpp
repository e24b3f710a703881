#pragma once
#include <vector>

namespace tomsim::metrics {

// A trial holds a false belief when any wrong type carries at least the true
// type's posterior mass.
bool false_belief(const std::vector<double>& belief, int true_type);

// Belief-weighted mean of per-type expectations.
double belief_weighted(const std::vector<double>& belief,
                       const std::vector<double>& per_type);

// observed - expected; negative means the agent did worse than its own model
// predicted.
double regret_estimate(double observed, double expected);

// KL(p || q) with additive smoothing on both arguments.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q,
                     double eps = 1e-3);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  int n = 0;
};

Summary summarize(const std::vector<double>& xs);

}  // namespace tomsim::metrics
