#include "tomsim/zerosum.hpp"

#include <cmath>
#include <stdexcept>

namespace tomsim::zerosum {

namespace {

// Column values against a uniform row with the matrix unknown.
std::array<double, 3> uninformed_col_q() {
  std::array<double, 3> q{};
  for (int c = 0; c < 3; ++c)
    for (int m = 1; m <= 2; ++m)
      for (int a = 0; a < 2; ++a) q[c] -= 0.25 * matrix(m)[a][c];
  return q;
}

std::vector<double> to_vec(const std::array<double, 3>& a) {
  return {a[0], a[1], a[2]};
}

}  // namespace

const MatrixPayoffs& matrix(int id) {
  static constexpr MatrixPayoffs g1 = kG1, g2 = kG2;
  if (id == 1) return g1;
  if (id == 2) return g2;
  throw std::invalid_argument("unknown matrix id");
}

double row_payoff(int matrix_id, int row, int col) {
  if (row < 0 || row > 1 || col < 0 || col > 2)
    throw std::invalid_argument("action out of range");
  return matrix(matrix_id)[row][col];
}

std::array<double, 3> type_prior(bool flat) {
  if (flat) return {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return {0.5, 0.25, 0.25};
}

std::array<double, 2> reactive_row_policy(int theta, double temperature) {
  if (theta == kTypeUninformed) return {0.5, 0.5};
  const MatrixPayoffs& g = matrix(theta);
  std::vector<double> means(2, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 3; ++c) means[a] += g[a][c] / 3.0;
  const std::vector<double> p = softmax_policy(means, temperature);
  return {p[0], p[1]};
}

double informed_top_prob(double temperature) {
  return reactive_row_policy(1, temperature)[0];
}

std::array<double, 3> fold_row_belief(const std::array<double, 3>& prior, int n_top,
                                      int n_bot, double temperature) {
  if (n_top < 0 || n_bot < 0) throw std::invalid_argument("negative action count");
  std::array<double, 3> b{};
  double tot = 0.0;
  for (int t = 0; t < 3; ++t) {
    const double pt = reactive_row_policy(t, temperature)[0];
    b[t] = prior[t] * std::pow(pt, n_top) * std::pow(1.0 - pt, n_bot);
    tot += b[t];
  }
  if (!(tot > 0.0)) throw std::runtime_error("bayes: impossible observation");
  for (double& x : b) x /= tot;
  return b;
}

std::array<double, 3> dom0_col_q(const std::array<double, 3>& belief,
                                 double temperature) {
  static const std::array<double, 3> q0 = uninformed_col_q();
  std::array<double, 3> q{};
  for (int c = 0; c < 3; ++c) q[c] = belief[0] * q0[c];
  for (int theta = 1; theta <= 2; ++theta) {
    const std::array<double, 2> rp = reactive_row_policy(theta, temperature);
    const MatrixPayoffs& g = matrix(theta);
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 2; ++a) q[c] -= belief[theta] * rp[a] * g[a][c];
  }
  return q;
}

std::vector<double> dom0_col_policy(const std::array<double, 3>& belief,
                                    double temperature) {
  return softmax_policy(to_vec(dom0_col_q(belief, temperature)), temperature);
}

Dom1Row::Dom1Row(int matrix_id, const EngineConfig& cfg)
    : matrix_id_(matrix_id), cfg_(cfg) {
  cfg_.validate();
  matrix(matrix_id);
  const int T = cfg_.horizon;
  const MatrixPayoffs& g = matrix(matrix_id);
  const std::array<double, 3> prior = type_prior(cfg_.flat_prior);
  q_.resize(static_cast<size_t>(T) * (T + 1) / 2);
  std::vector<double> v(q_.size(), 0.0);
  for (int t = T; t >= 1; --t)
    for (int n_top = 0; n_top < t; ++n_top) {
      const int n_bot = t - 1 - n_top;
      const std::array<double, 3> b =
          fold_row_belief(prior, n_top, n_bot, cfg_.temperature);
      const std::vector<double> cp = dom0_col_policy(b, cfg_.temperature);
      std::array<double, 2> q{};
      for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 3; ++c) q[a] += cp[c] * g[a][c];
        if (t < T) q[a] += cfg_.gamma * v[idx(n_top + (a == 0 ? 1 : 0), t + 1)];
      }
      q_[idx(n_top, t)] = q;
      v[idx(n_top, t)] = std::max(q[0], q[1]);
    }
}

size_t Dom1Row::idx(int n_top, int trial) const {
  return static_cast<size_t>(trial - 1) * trial / 2 + n_top;
}

std::array<double, 2> Dom1Row::q(int n_top, int n_bot, int trial) const {
  if (trial < 1 || trial > cfg_.horizon || n_top < 0 || n_bot < 0 ||
      n_top + n_bot != trial - 1)
    throw std::invalid_argument("planner state out of range");
  return q_[idx(n_top, trial)];
}

std::vector<double> Dom1Row::policy(int n_top, int n_bot, int trial) const {
  const std::array<double, 2> qq = q(n_top, n_bot, trial);
  return softmax_policy({qq[0], qq[1]}, cfg_.temperature);
}

Dom1RowAgent::Dom1RowAgent(int matrix_id, const EngineConfig& cfg, bool aleph_on)
    : dp_(matrix_id, cfg), cfg_(cfg), aleph_on_(aleph_on), flags_(1, 1) {}

std::vector<double> Dom1RowAgent::action_dist() const {
  if (trial_ > cfg_.horizon) throw std::runtime_error("horizon exhausted");
  if (triggered()) {
    std::vector<double> p(2, 0.0);
    p[aleph::minmax_row(matrix(dp_.matrix_id()))] = 1.0;
    return p;
  }
  return dp_.policy(n_top_, n_bot_, trial_);
}

void Dom1RowAgent::observe(int own_action, int col_action) {
  if (trial_ > cfg_.horizon) throw std::runtime_error("horizon exhausted");
  if (own_action < 0 || own_action > 1 || col_action < 0 || col_action > 2)
    throw std::invalid_argument("action out of range");
  if (aleph_on_) {
    const std::array<double, 3> b = fold_row_belief(
        type_prior(cfg_.flat_prior), n_top_, n_bot_, cfg_.temperature);
    model_dists_.push_back(dom0_col_policy(b, cfg_.temperature));
    col_hist_.push_back(col_action);
    const aleph::Flags z1 = aleph::z1_delta(
        col_hist_, {model_dists_}, aleph::delta_schedule(trial_, cfg_.horizon));
    const aleph::Flags z2(1, 1);  // rewards are masked in this game
    flags_ = aleph::combine(flags_, z1, z2);
  }
  n_top_ += own_action == 0 ? 1 : 0;
  n_bot_ += own_action == 1 ? 1 : 0;
  trial_ += 1;
}

Dom0ColumnAgent::Dom0ColumnAgent(const EngineConfig& cfg)
    : cfg_(cfg), belief_(type_prior(cfg.flat_prior)) {
  cfg_.validate();
}

std::array<double, 3> Dom0ColumnAgent::q() const {
  return dom0_col_q(belief_, cfg_.temperature);
}

std::vector<double> Dom0ColumnAgent::action_dist() const {
  return dom0_col_policy(belief_, cfg_.temperature);
}

void Dom0ColumnAgent::observe(int row_action) {
  if (row_action < 0 || row_action > 1)
    throw std::invalid_argument("action out of range");
  std::vector<double> lik(3);
  for (int t = 0; t < 3; ++t)
    lik[t] = reactive_row_policy(t, cfg_.temperature)[row_action];
  const std::vector<double> post = bayes_update(to_vec(belief_), lik);
  std::copy(post.begin(), post.end(), belief_.begin());
}

Dom2Column::Dom2Column(const EngineConfig& cfg, bool row_aleph)
    : cfg_(cfg), row_aleph_(row_aleph), m1_(1, cfg), m2_(2, cfg),
      belief_(type_prior(cfg.flat_prior)), rep_flags_(1, 1) {}

std::vector<double> Dom2Column::row_dist(int hyp) const {
  if (trial_ > cfg_.horizon) throw std::runtime_error("horizon exhausted");
  if (hyp == kTypeUninformed) return {0.5, 0.5};
  const Dom1Row& dp = hyp == 1 ? m1_ : m2_;
  if (row_aleph_ && aleph::triggered(rep_flags_)) {
    std::vector<double> p(2, 0.0);
    p[aleph::minmax_row(matrix(hyp))] = 1.0;
    return p;
  }
  return dp.policy(n_top_, n_bot_, trial_);
}

std::array<double, 3> Dom2Column::q() const {
  static const std::array<double, 3> q0 = uninformed_col_q();
  std::array<double, 3> q{};
  for (int c = 0; c < 3; ++c) q[c] = belief_[0] * q0[c];
  for (int hyp = 1; hyp <= 2; ++hyp) {
    const std::vector<double> rd = row_dist(hyp);
    const MatrixPayoffs& g = matrix(hyp);
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < 2; ++a) q[c] -= belief_[hyp] * rd[a] * g[a][c];
  }
  return q;
}

std::vector<double> Dom2Column::action_dist() const {
  return softmax_policy(to_vec(q()), cfg_.temperature);
}

void Dom2Column::observe(int row_action, int col_action) {
  if (trial_ > cfg_.horizon) throw std::runtime_error("horizon exhausted");
  if (row_action < 0 || row_action > 1 || col_action < 0 || col_action > 2)
    throw std::invalid_argument("action out of range");
  std::vector<double> lik(3);
  for (int hyp = 0; hyp < 3; ++hyp) lik[hyp] = row_dist(hyp)[row_action];
  const std::vector<double> post = bayes_update(to_vec(belief_), lik);
  std::copy(post.begin(), post.end(), belief_.begin());
  if (row_aleph_) {
    const std::array<double, 3> b = fold_row_belief(
        type_prior(cfg_.flat_prior), n_top_, n_bot_, cfg_.temperature);
    model_dists_.push_back(dom0_col_policy(b, cfg_.temperature));
    col_hist_.push_back(col_action);
    const aleph::Flags z1 = aleph::z1_delta(
        col_hist_, {model_dists_}, aleph::delta_schedule(trial_, cfg_.horizon));
    rep_flags_ = aleph::combine(rep_flags_, z1, aleph::Flags(1, 1));
  }
  n_top_ += row_action == 0 ? 1 : 0;
  n_bot_ += row_action == 1 ? 1 : 0;
  trial_ += 1;
}

}  // namespace tomsim::zerosum
