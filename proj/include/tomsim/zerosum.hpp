#pragma once
#include <array>
#include <vector>

#include "tomsim/aleph.hpp"
#include "tomsim/core.hpp"

namespace tomsim::zerosum {

// Row player's payoffs; the column player receives the negative.
inline constexpr MatrixPayoffs kG1 = {{{4.0, 0.0, 2.0}, {4.0, 0.0, -2.0}}};
inline constexpr MatrixPayoffs kG2 = {{{0.0, 4.0, -2.0}, {0.0, 4.0, 2.0}}};

// Opponent types: 0 = uninformed, 1 = informed of game 1, 2 = informed of
// game 2.
inline constexpr int kTypeUninformed = 0;

const MatrixPayoffs& matrix(int id);  // id in {1, 2}
double row_payoff(int matrix_id, int row, int col);

// (1/2, 1/4, 1/4) by default, uniform when flat.
std::array<double, 3> type_prior(bool flat);

// Reactive row persona: uninformed mixes uniformly; informed types softmax
// their known matrix's row means under a uniform column.
std::array<double, 2> reactive_row_policy(int theta, double temperature);

// P(T | informed of game 1).
double informed_top_prob(double temperature);

// Column's belief over row types after n_top/n_bot observed row actions.
std::array<double, 3> fold_row_belief(const std::array<double, 3>& prior, int n_top,
                                      int n_bot, double temperature);

// Myopic column values against the reactive row personas; the uninformed
// component averages over both matrices.
std::array<double, 3> dom0_col_q(const std::array<double, 3>& belief,
                                 double temperature);
std::vector<double> dom0_col_policy(const std::array<double, 3>& belief,
                                    double temperature);

// Exact finite-horizon planner for an informed row facing the belief-tracking
// column above. The column's belief depends only on the row's own action
// counts, so the full game collapses to states (n_top, n_bot, trial).
class Dom1Row {
 public:
  Dom1Row(int matrix_id, const EngineConfig& cfg);

  std::array<double, 2> q(int n_top, int n_bot, int trial) const;
  std::vector<double> policy(int n_top, int n_bot, int trial) const;
  int matrix_id() const { return matrix_id_; }

 private:
  size_t idx(int n_top, int trial) const;
  int matrix_id_;
  EngineConfig cfg_;
  std::vector<std::array<double, 2>> q_;  // triangular over (trial, n_top)
};

// Stateful informed row: planner output gated by column-frequency typicality.
// Once every modeled column explanation is rejected the row locks to its
// matrix's maximin action.
class Dom1RowAgent {
 public:
  Dom1RowAgent(int matrix_id, const EngineConfig& cfg, bool aleph_on);

  std::vector<double> action_dist() const;  // {P(T), P(B)} for the coming trial
  void observe(int own_action, int col_action);
  bool triggered() const { return aleph_on_ && aleph::triggered(flags_); }
  const aleph::Flags& flags() const { return flags_; }
  int trial() const { return trial_; }

 private:
  Dom1Row dp_;
  EngineConfig cfg_;
  bool aleph_on_;
  int n_top_ = 0, n_bot_ = 0, trial_ = 1;
  std::vector<int> col_hist_;
  std::vector<std::vector<double>> model_dists_;
  aleph::Flags flags_;
};

// Belief-tracking myopic column.
class Dom0ColumnAgent {
 public:
  explicit Dom0ColumnAgent(const EngineConfig& cfg);

  const std::array<double, 3>& belief() const { return belief_; }
  std::array<double, 3> q() const;
  std::vector<double> action_dist() const;
  void observe(int row_action);

 private:
  EngineConfig cfg_;
  std::array<double, 3> belief_;
};

// Column that models the row as the planner above (hypotheses: uninformed,
// informed of game 1, informed of game 2), replicating the row's typicality
// gate from the public action history when the row is augmented.
class Dom2Column {
 public:
  Dom2Column(const EngineConfig& cfg, bool row_aleph);

  const std::array<double, 3>& belief() const { return belief_; }
  std::vector<double> row_dist(int hyp) const;
  std::array<double, 3> q() const;
  std::vector<double> action_dist() const;
  void observe(int row_action, int col_action);

 private:
  EngineConfig cfg_;
  bool row_aleph_;
  Dom1Row m1_, m2_;
  std::array<double, 3> belief_;
  int n_top_ = 0, n_bot_ = 0, trial_ = 1;
  std::vector<int> col_hist_;
  std::vector<std::vector<double>> model_dists_;
  aleph::Flags rep_flags_;
};

}  // namespace tomsim::zerosum
