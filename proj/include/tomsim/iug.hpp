#pragma once
#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tomsim/aleph.hpp"
#include "tomsim/core.hpp"
#include "tomsim/rng.hpp"

namespace tomsim::iug {

inline constexpr int kTypeRandom = 0;
inline constexpr int kTypePsi01 = 1;
inline constexpr int kTypePsi05 = 2;
inline constexpr std::array<double, 3> kPsi = {0.0, 0.1, 0.5};

// (sender, receiver) rewards for a resolved trial.
std::pair<double, double> trial_reward(int offer, bool accept);

// (1 - a - psi) when accepted, 0 otherwise.
double threshold_utility(int offer, bool accept, double psi);

// lo = last rejected offer, -1 before any rejection (the offer set is open at
// lo, so 0.0 stays available until it is rejected); hi = last accepted offer.
struct SenderBounds {
  int lo = -1;
  int hi = 10;
  friend bool operator==(const SenderBounds&, const SenderBounds&) = default;
};

SenderBounds update_bounds(SenderBounds b, int offer, bool accept);
SenderBounds fold_bounds(const History& h);

// Largest offer index with non-negative threshold utility.
int utility_cap_index(double psi);

// Offer distribution of the reactive sender model. Threshold types play
// softmax((1 - a - psi)/temperature) over {a : lo < a <= min(hi, cap)} and
// repeat last_offer when that set is empty.
std::vector<double> sender_policy(int type, SenderBounds b, int last_offer,
                                  double temperature);

// P(observed offer | type) at the current sender state.
std::vector<double> offer_likelihoods(int offer, SenderBounds b, int last_offer,
                                      double temperature);

// Exact per-type response values over the remaining horizon, memoized over
// (type, bounds, last offer, trial).
class ReceiverValues {
 public:
  explicit ReceiverValues(const EngineConfig& cfg);

  double q(int type, int offer, SenderBounds b, int last_offer, int trial,
           bool accept) const;
  // Optimal continuation value before the trial's offer is seen.
  double v(int type, SenderBounds b, int last_offer, int trial) const;
  const std::array<double, 11>& policy(int type, SenderBounds b, int last_offer) const;
  const EngineConfig& config() const { return cfg_; }

 private:
  size_t sidx(int type, int lo, int hi, int last) const;
  EngineConfig cfg_;
  std::vector<std::array<double, 11>> pol_;
  std::vector<double> val_;  // [state][trial]
};

// Everything the opponent can reconstruct from the public history: belief,
// bounds, and the full mechanism state (sample draws are keyed by the
// mechanism stream and trial indices, not by hidden receiver state).
struct ReceiverState {
  std::array<double, 3> belief{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> prev_belief{1.0 / 3, 1.0 / 3, 1.0 / 3};
  SenderBounds bounds;
  int last_offer = -1;
  int trial = 1;
  int n_offers = 0;
  std::array<char, 32> offers{};

  bool mech_on = false;
  std::array<uint8_t, 3> flags{1, 1, 1};
  double observed_cum = 0.0;
  std::vector<char> traj;    // [(type * N + n) * horizon + t - 1]
  std::vector<double> cum;   // [type * N + n]
  RandomSource mech_rs{0};
};

ReceiverState init_receiver_state(const EngineConfig& cfg, bool mech_on,
                                  RandomSource mech_rs);

class CompressCache;

// Mechanism + Bayes update for an observed offer; returns the response
// distribution {reject, accept}. Bounds fold happens in complete_trial.
PolicyDistribution respond_to_offer(ReceiverState& st, int offer,
                                    const ReceiverValues& rv,
                                    CompressCache* cache = nullptr);

// Reward-sample extension, realized-reward accounting, bounds fold.
void complete_trial(ReceiverState& st, int offer, bool accept,
                    const ReceiverValues& rv);

// Belief-weighted expected (sender, receiver) rewards for the coming trial.
std::pair<double, double> expected_trial_rewards(const ReceiverState& st,
                                                 const ReceiverValues& rv);
// Per-type receiver expectation, same convention.
std::array<double, 3> expected_receiver_reward_per_type(const ReceiverState& st,
                                                        const ReceiverValues& rv);

class CompressCache {
 public:
  double ratio(std::string_view bytes);
  void clear();

 private:
  struct Entry {
    std::string key;
    double ratio;
  };
  std::vector<std::vector<Entry>> buckets_{1 << 12};
  size_t size_ = 0;
};

// Planner-facing simulator for the offer-side agent with utility threshold
// psi; reactions are the receiver's exact response distribution.
class SenderSim {
 public:
  using State = ReceiverState;
  SenderSim(const ReceiverValues* rv, double psi, CompressCache* cache)
      : rv_(rv), psi_(psi), cache_(cache) {}
  int num_actions(const State&) const { return kNumOffers; }
  bool terminal(const State& s) const { return s.trial > rv_->config().horizon; }
  std::vector<double> act(State& s, int offer) const {
    return respond_to_offer(s, offer, *rv_, cache_).p();
  }
  double react(State& s, int offer, int resp) const {
    const bool accept = resp == 1;
    const double u = threshold_utility(offer, accept, psi_);
    complete_trial(s, offer, accept, *rv_);
    return u;
  }

 private:
  const ReceiverValues* rv_;
  double psi_;
  CompressCache* cache_;
};

// Deceptive sender: plans offers against its exact reconstruction of the
// receiver (including the mechanism when the receiver is augmented).
class Dom1Sender {
 public:
  Dom1Sender(const ReceiverValues* rv, double psi, bool receiver_mech,
             RandomSource mech_rs);
  int choose_offer(RandomSource rng);
  void observe(int offer, bool accept);
  const ReceiverState& replica() const { return replica_; }

 private:
  const ReceiverValues* rv_;
  double psi_;
  ReceiverState replica_;
  CompressCache cache_;
};

}  // namespace tomsim::iug
