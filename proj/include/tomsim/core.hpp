#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tomsim/rng.hpp"

namespace tomsim {

inline constexpr const char* kEngineVersion = "0.1.0";

// Offers are decile indices 0..10; value = index / 10.
inline constexpr int kNumOffers = 11;

struct Offer {
  int index;
};
struct Response {
  bool accept;
};
enum class Row : int { T = 0, B = 1 };
enum class Column : int { L = 0, M = 1, R = 2 };

using GameAction = std::variant<Offer, Response, Row, Column>;

std::string action_label(const GameAction& a);

struct TrialRecord {
  int trial = 0;  // 1-based
  GameAction action_a;
  GameAction action_b;
  std::optional<double> reward_a;  // absent while masked
  std::optional<double> reward_b;
};

using History = std::vector<TrialRecord>;

// Row player's payoff by [row][column]; the column player receives the negative.
using MatrixPayoffs = std::array<std::array<double, 3>, 2>;

struct AgentSpec {
  int dom_level = 0;            // -1, 0, 1 or 2
  double threshold = 0.1;       // psi for threshold-utility senders
  bool random_persona = false;  // uniform sender
  bool aleph = false;           // mechanism-gated policy
};

struct EngineConfig {
  int horizon = 12;
  double temperature = 0.1;
  double gamma = 0.99;
  double delta = 0.1;
  double omega = 0.3;
  int mech_samples = 100;
  int planner_iterations = 10000;
  double c_uct_iug = 2.0;       // 2 x reward range
  double c_uct_zerosum = 16.0;  // 2 x reward range
  bool flat_prior = false;
  bool z2_lower_only = false;
  bool z2_realized_own = false;

  void validate() const;
};

class BeliefVector {
 public:
  explicit BeliefVector(std::vector<double> p);
  const std::vector<double>& p() const { return p_; }
  double operator[](size_t i) const { return p_[i]; }
  size_t size() const { return p_.size(); }

 private:
  std::vector<double> p_;
};

class PolicyDistribution {
 public:
  explicit PolicyDistribution(std::vector<double> p);
  const std::vector<double>& p() const { return p_; }
  double operator[](size_t i) const { return p_[i]; }
  size_t size() const { return p_.size(); }
  int sample(RandomSource& rng) const;

 private:
  std::vector<double> p_;
};

// Softmax with max-subtraction; errors on empty input, non-finite values or
// temperature <= 0.
std::vector<double> softmax_policy(const std::vector<double>& q, double temperature);

// Lowest index wins ties.
int argmax_index(const std::vector<double>& q);

int sample_index(const std::vector<double>& probs, RandomSource& rng);

// Posterior from prior and per-type likelihoods. Each likelihood is floored at
// 1e-300 before normalization; a zero total still raises "impossible
// observation".
std::vector<double> bayes_update(const std::vector<double>& prior,
                                 const std::vector<double>& likelihood);

// sum_t rewards[t] * gamma^t, t counted from 0.
double discounted_return(const std::vector<double>& rewards, double gamma);

}  // namespace tomsim
