#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tomsim/core.hpp"

namespace tomsim::aleph {

// One flag per modeled opponent type; 1 = still plausible.
using Flags = std::vector<uint8_t>;

// Conjunction with the previous flags: once a flag drops to 0 it stays 0.
Flags combine(const Flags& prev, const Flags& z1, const Flags& z2);

// Out-of-belief behaviour engages only when every type is rejected.
bool triggered(const Flags& f);

// max((T - t) / t, 0.5), t >= 1.
double delta_schedule(int t, int horizon);

// Nearest-rank quantile: q_0 = min, q_1 = max.
double quantile_nearest_rank(std::vector<double> xs, double p);

// Frequency typicality. model_dists[type][tau][action] is the modeled action
// distribution at each past step; empirical frequencies come from `observed`.
// Affirm type iff |F_hat(a) - F_bar(a)| <= delta * F_bar(a) for every action;
// an observed action with F_bar(a) = 0 forces denial. Empty history affirms.
Flags z1_delta(const std::vector<int>& observed,
               const std::vector<std::vector<std::vector<double>>>& model_dists,
               double delta);

// Compression typicality. samples[type] holds N sampled action sequences of
// the same length as `observed`. Affirm iff the observed compression ratio
// lies in [q_delta, q_{1-delta}] of the sampled ratios. Histories shorter
// than 3 affirm everything (warm-up); N < 2 is an error.
Flags z1_gzip(std::string_view observed,
              const std::vector<std::vector<std::string>>& samples, double delta);

// Reward typicality over cumulative rewards. Affirm iff
// q_omega <= observed <= q_{1-omega} (upper bound skipped when lower_only).
// With rewards masked every type affirms; an empty sample set with visible
// rewards is an error.
Flags z2_reward(double observed_cumulative,
                const std::vector<std::vector<double>>& sampled_cumulative,
                double omega, bool lower_only, bool rewards_visible);

// Base policy while any type remains plausible, otherwise the out-of-belief
// policy.
PolicyDistribution aleph_policy(const Flags& f, const PolicyDistribution& base,
                                const PolicyDistribution& oob);

// argmax over rows of the row minimum; lowest index wins ties.
int minmax_row(const MatrixPayoffs& g);

}  // namespace tomsim::aleph
