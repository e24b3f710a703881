#include "tomsim/iug.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tomsim/compress.hpp"
#include "tomsim/planning.hpp"

namespace tomsim::iug {

namespace {

int cdf_pick(const std::array<double, 11>& p, double u) {
  double acc = 0.0;
  for (int i = 0; i < 11; ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return 10;
}

uint64_t fnv64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
  return h;
}

// Nearest-rank band edges; partial selection, scratch order is clobbered.
std::pair<double, double> band(std::vector<double>& xs, double p_lo, double p_hi) {
  const int n = static_cast<int>(xs.size());
  const int r_lo = std::clamp(static_cast<int>(std::ceil(p_lo * n)), 1, n);
  const int r_hi = std::clamp(static_cast<int>(std::ceil(p_hi * n)), 1, n);
  std::nth_element(xs.begin(), xs.begin() + (r_lo - 1), xs.end());
  const double lo = xs[r_lo - 1];
  std::nth_element(xs.begin() + (r_lo - 1), xs.begin() + (r_hi - 1), xs.end());
  return {lo, xs[r_hi - 1]};
}

// P(accept) for a two-point softmax over {reject, accept} values.
double accept_prob(double q_rej, double q_acc, double temperature) {
  return 1.0 / (1.0 + std::exp((q_rej - q_acc) / temperature));
}

}  // namespace

std::pair<double, double> trial_reward(int offer, bool accept) {
  if (offer < 0 || offer >= kNumOffers) throw std::invalid_argument("offer out of range");
  const double a = offer * 0.1;
  return accept ? std::make_pair(1.0 - a, a) : std::make_pair(0.0, 0.0);
}

double threshold_utility(int offer, bool accept, double psi) {
  if (offer < 0 || offer >= kNumOffers) throw std::invalid_argument("offer out of range");
  return accept ? (1.0 - offer * 0.1 - psi) : 0.0;
}

SenderBounds update_bounds(SenderBounds b, int offer, bool accept) {
  if (offer < 0 || offer >= kNumOffers) throw std::invalid_argument("offer out of range");
  if (accept)
    b.hi = offer;
  else
    b.lo = offer;
  return b;
}

SenderBounds fold_bounds(const History& h) {
  SenderBounds b;
  for (const auto& tr : h) {
    const auto* off = std::get_if<Offer>(&tr.action_a);
    const auto* resp = std::get_if<Response>(&tr.action_b);
    if (!off || !resp) throw std::invalid_argument("bounds fold: malformed trial");
    b = update_bounds(b, off->index, resp->accept);
  }
  return b;
}

int utility_cap_index(double psi) {
  return static_cast<int>(std::floor((1.0 - psi) * 10.0 + 1e-9));
}

std::vector<double> sender_policy(int type, SenderBounds b, int last_offer,
                                  double temperature) {
  if (type < 0 || type > 2) throw std::invalid_argument("unknown sender type");
  std::vector<double> p(kNumOffers, 0.0);
  if (type == kTypeRandom) {
    std::fill(p.begin(), p.end(), 1.0 / kNumOffers);
    return p;
  }
  const double psi = kPsi[type];
  const int hi = std::min(b.hi, utility_cap_index(psi));
  std::vector<int> viable;
  for (int i = b.lo + 1; i <= hi; ++i) viable.push_back(i);
  if (viable.empty()) {
    if (last_offer >= 0) {
      p[last_offer] = 1.0;
    } else {
      std::fill(p.begin(), p.end(), 1.0 / kNumOffers);
    }
    return p;
  }
  std::vector<double> q;
  q.reserve(viable.size());
  for (int i : viable) q.push_back(1.0 - i * 0.1 - psi);
  const std::vector<double> sm = softmax_policy(q, temperature);
  for (size_t k = 0; k < viable.size(); ++k) p[viable[k]] = sm[k];
  return p;
}

std::vector<double> offer_likelihoods(int offer, SenderBounds b, int last_offer,
                                      double temperature) {
  if (offer < 0 || offer >= kNumOffers) throw std::invalid_argument("offer out of range");
  std::vector<double> lik(3);
  for (int t = 0; t < 3; ++t) lik[t] = sender_policy(t, b, last_offer, temperature)[offer];
  return lik;
}

ReceiverValues::ReceiverValues(const EngineConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int H = cfg_.horizon;
  pol_.resize(3 * 12 * 11 * 12);
  val_.assign(pol_.size() * (H + 2), 0.0);
  for (int type = 0; type < 3; ++type)
    for (int lo = -1; lo <= 10; ++lo)
      for (int hi = 0; hi <= 10; ++hi)
        for (int last = -1; last <= 10; ++last) {
          const auto v = sender_policy(type, {lo, hi}, last, cfg_.temperature);
          std::array<double, 11> a{};
          std::copy(v.begin(), v.end(), a.begin());
          pol_[sidx(type, lo, hi, last)] = a;
        }
  for (int t = H; t >= 1; --t)
    for (int type = 0; type < 3; ++type)
      for (int lo = -1; lo <= 10; ++lo)
        for (int hi = 0; hi <= 10; ++hi)
          for (int last = -1; last <= 10; ++last) {
            const size_t s = sidx(type, lo, hi, last);
            const auto& pol = pol_[s];
            double ev = 0.0;
            for (int o = 0; o < 11; ++o) {
              if (pol[o] <= 0.0) continue;
              const double qa = q(type, o, {lo, hi}, last, t, true);
              const double qr = q(type, o, {lo, hi}, last, t, false);
              ev += pol[o] * std::max(qa, qr);
            }
            val_[s * (H + 2) + t] = ev;
          }
}

size_t ReceiverValues::sidx(int type, int lo, int hi, int last) const {
  return ((static_cast<size_t>(type) * 12 + (lo + 1)) * 11 + hi) * 12 + (last + 1);
}

double ReceiverValues::q(int type, int offer, SenderBounds b, int last_offer,
                         int trial, bool accept) const {
  if (trial < 1 || trial > cfg_.horizon) throw std::invalid_argument("trial out of range");
  const double imm = accept ? offer * 0.1 : 0.0;
  if (trial == cfg_.horizon) return imm;
  const SenderBounds nb = update_bounds(b, offer, accept);
  return imm + cfg_.gamma * v(type, nb, offer, trial + 1);
}

double ReceiverValues::v(int type, SenderBounds b, int last_offer, int trial) const {
  if (trial > cfg_.horizon) return 0.0;
  return val_[sidx(type, b.lo, b.hi, last_offer) * (cfg_.horizon + 2) + trial];
}

const std::array<double, 11>& ReceiverValues::policy(int type, SenderBounds b,
                                                     int last_offer) const {
  return pol_[sidx(type, b.lo, b.hi, last_offer)];
}

ReceiverState init_receiver_state(const EngineConfig& cfg, bool mech_on,
                                  RandomSource mech_rs) {
  cfg.validate();
  ReceiverState st;
  st.mech_on = mech_on;
  st.mech_rs = mech_rs;
  if (mech_on) {
    st.traj.assign(static_cast<size_t>(3) * cfg.mech_samples * cfg.horizon, '0');
    st.cum.assign(static_cast<size_t>(3) * cfg.mech_samples, 0.0);
  }
  return st;
}

double CompressCache::ratio(std::string_view bytes) {
  auto& bucket = buckets_[fnv64(bytes) & (buckets_.size() - 1)];
  for (const auto& e : bucket)
    if (e.key == bytes) return e.ratio;
  const double r = compression_ratio(bytes);
  bucket.push_back({std::string(bytes), r});
  ++size_;
  return r;
}

void CompressCache::clear() {
  if (size_ == 0) return;
  for (auto& b : buckets_) b.clear();
  size_ = 0;
}

PolicyDistribution respond_to_offer(ReceiverState& st, int offer,
                                    const ReceiverValues& rv, CompressCache* cache) {
  const EngineConfig& cfg = rv.config();
  const int H = cfg.horizon;
  if (st.trial > H) throw std::runtime_error("horizon exhausted");
  if (offer < 0 || offer >= kNumOffers) throw std::invalid_argument("offer out of range");
  st.prev_belief = st.belief;

  if (st.mech_on) {
    // Flags are absorbing, so samples for an already-denied type are dead.
    const int N = cfg.mech_samples;
    const RandomSource traj_rs = st.mech_rs.sub("traj");
    for (int type = 0; type < 3; ++type) {
      if (!st.flags[type]) continue;
      const auto& pol = rv.policy(type, st.bounds, st.last_offer);
      const RandomSource rs_t =
          traj_rs.sub(static_cast<uint64_t>(type)).sub(static_cast<uint64_t>(st.trial));
      for (int n = 0; n < N; ++n) {
        RandomSource rs = rs_t.sub(static_cast<uint64_t>(n));
        st.traj[(static_cast<size_t>(type) * N + n) * H + st.trial - 1] =
            static_cast<char>('0' + cdf_pick(pol, rs.uniform()));
      }
    }
  }
  st.offers[st.n_offers++] = static_cast<char>('0' + offer);

  if (st.mech_on) {
    const int N = cfg.mech_samples;
    std::array<uint8_t, 3> z1{1, 1, 1}, z2{1, 1, 1};
    thread_local std::vector<double> scratch;
    if (st.n_offers >= 3) {
      const std::string_view obs(st.offers.data(), st.n_offers);
      const double c_obs = cache ? cache->ratio(obs) : compression_ratio(obs);
      for (int type = 0; type < 3; ++type) {
        if (!st.flags[type]) continue;
        scratch.clear();
        for (int n = 0; n < N; ++n) {
          const std::string_view s(&st.traj[(static_cast<size_t>(type) * N + n) * H],
                                   st.n_offers);
          scratch.push_back(cache ? cache->ratio(s) : compression_ratio(s));
        }
        const auto [lo, hi] = band(scratch, cfg.delta, 1.0 - cfg.delta);
        if (c_obs < lo || c_obs > hi) z1[type] = 0;
      }
    }
    if (st.trial > 1) {
      for (int type = 0; type < 3; ++type) {
        if (!st.flags[type]) continue;
        scratch.assign(st.cum.begin() + static_cast<size_t>(type) * N,
                       st.cum.begin() + static_cast<size_t>(type + 1) * N);
        const auto [lo, hi] = band(scratch, cfg.omega, 1.0 - cfg.omega);
        if (st.observed_cum < lo || (!cfg.z2_lower_only && st.observed_cum > hi))
          z2[type] = 0;
      }
    }
    for (int i = 0; i < 3; ++i) st.flags[i] &= z1[i] & z2[i];
  }

  std::vector<double> lik(3);
  for (int type = 0; type < 3; ++type)
    lik[type] = rv.policy(type, st.bounds, st.last_offer)[offer];
  const std::vector<double> post =
      bayes_update({st.belief.begin(), st.belief.end()}, lik);
  std::copy(post.begin(), post.end(), st.belief.begin());

  if (st.mech_on && !(st.flags[0] | st.flags[1] | st.flags[2]))
    return PolicyDistribution({1.0, 0.0});

  double q_rej = 0.0, q_acc = 0.0;
  for (int type = 0; type < 3; ++type) {
    q_rej += st.belief[type] * rv.q(type, offer, st.bounds, st.last_offer, st.trial, false);
    q_acc += st.belief[type] * rv.q(type, offer, st.bounds, st.last_offer, st.trial, true);
  }
  return PolicyDistribution(softmax_policy({q_rej, q_acc}, cfg.temperature));
}

void complete_trial(ReceiverState& st, int offer, bool accept, const ReceiverValues& rv) {
  const EngineConfig& cfg = rv.config();
  const bool any_alive = st.flags[0] | st.flags[1] | st.flags[2];
  if (st.mech_on && any_alive) {
    const int N = cfg.mech_samples;
    const RandomSource off_rs = st.mech_rs.sub("z2off");
    const RandomSource own_rs = st.mech_rs.sub("z2own");
    // Hypothetical own response depends only on the sampled offer.
    std::array<double, 11> p_acc{};
    if (!cfg.z2_realized_own) {
      for (int o = 0; o < 11; ++o) {
        std::array<double, 3> bb;
        double tot = 0.0;
        for (int t = 0; t < 3; ++t) {
          const double l =
              std::max(rv.policy(t, st.bounds, st.last_offer)[o], 1e-300);
          bb[t] = st.prev_belief[t] * l;
          tot += bb[t];
        }
        double q_rej = 0.0, q_acc = 0.0;
        for (int t = 0; t < 3; ++t) {
          q_rej += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, false);
          q_acc += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, true);
        }
        p_acc[o] = accept_prob(q_rej, q_acc, cfg.temperature);
      }
    }
    for (int type = 0; type < 3; ++type) {
      if (!st.flags[type]) continue;
      const auto& pol = rv.policy(type, st.bounds, st.last_offer);
      const RandomSource rs_o =
          off_rs.sub(static_cast<uint64_t>(type)).sub(static_cast<uint64_t>(st.trial));
      const RandomSource rs_a =
          own_rs.sub(static_cast<uint64_t>(type)).sub(static_cast<uint64_t>(st.trial));
      for (int n = 0; n < N; ++n) {
        RandomSource ro = rs_o.sub(static_cast<uint64_t>(n));
        const int ohat = cdf_pick(pol, ro.uniform());
        bool ahat;
        if (cfg.z2_realized_own) {
          ahat = accept;
        } else {
          RandomSource ra = rs_a.sub(static_cast<uint64_t>(n));
          ahat = !(ra.uniform() < 1.0 - p_acc[ohat]);
        }
        if (ahat) st.cum[static_cast<size_t>(type) * N + n] += ohat * 0.1;
      }
    }
  }
  st.observed_cum += accept ? offer * 0.1 : 0.0;
  st.bounds = update_bounds(st.bounds, offer, accept);
  st.last_offer = offer;
  st.trial += 1;
}

std::array<double, 3> expected_receiver_reward_per_type(const ReceiverState& st,
                                                        const ReceiverValues& rv) {
  const EngineConfig& cfg = rv.config();
  std::array<double, 3> out{};
  const bool grim = st.mech_on && !(st.flags[0] | st.flags[1] | st.flags[2]);
  for (int type = 0; type < 3; ++type) {
    const auto& pol = rv.policy(type, st.bounds, st.last_offer);
    double er = 0.0;
    for (int o = 0; o < 11; ++o) {
      if (pol[o] <= 0.0) continue;
      if (grim) continue;
      std::array<double, 3> bb;
      double tot = 0.0;
      for (int t = 0; t < 3; ++t) {
        bb[t] = st.belief[t] * std::max(rv.policy(t, st.bounds, st.last_offer)[o], 1e-300);
        tot += bb[t];
      }
      double q_rej = 0.0, q_acc = 0.0;
      for (int t = 0; t < 3; ++t) {
        q_rej += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, false);
        q_acc += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, true);
      }
      const std::vector<double> p = softmax_policy({q_rej, q_acc}, cfg.temperature);
      er += pol[o] * p[1] * o * 0.1;
    }
    out[type] = er;
  }
  return out;
}

std::pair<double, double> expected_trial_rewards(const ReceiverState& st,
                                                 const ReceiverValues& rv) {
  const EngineConfig& cfg = rv.config();
  const bool grim = st.mech_on && !(st.flags[0] | st.flags[1] | st.flags[2]);
  double es = 0.0, er = 0.0;
  for (int type = 0; type < 3; ++type) {
    const auto& pol = rv.policy(type, st.bounds, st.last_offer);
    double es_t = 0.0, er_t = 0.0;
    if (!grim) {
      for (int o = 0; o < 11; ++o) {
        if (pol[o] <= 0.0) continue;
        std::array<double, 3> bb;
        double tot = 0.0;
        for (int t = 0; t < 3; ++t) {
          bb[t] = st.belief[t] * std::max(rv.policy(t, st.bounds, st.last_offer)[o], 1e-300);
          tot += bb[t];
        }
        double q_rej = 0.0, q_acc = 0.0;
        for (int t = 0; t < 3; ++t) {
          q_rej += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, false);
          q_acc += bb[t] / tot * rv.q(t, o, st.bounds, st.last_offer, st.trial, true);
        }
        const std::vector<double> p = softmax_policy({q_rej, q_acc}, cfg.temperature);
        er_t += pol[o] * p[1] * o * 0.1;
        es_t += pol[o] * p[1] * (1.0 - o * 0.1);
      }
    }
    es += st.belief[type] * es_t;
    er += st.belief[type] * er_t;
  }
  return {es, er};
}

Dom1Sender::Dom1Sender(const ReceiverValues* rv, double psi, bool receiver_mech,
                       RandomSource mech_rs)
    : rv_(rv), psi_(psi),
      replica_(init_receiver_state(rv->config(), receiver_mech, mech_rs)) {}

int Dom1Sender::choose_offer(RandomSource rng) {
  const EngineConfig& cfg = rv_->config();
  SenderSim sim(rv_, psi_, &cache_);
  const planning::IpomcpResult res = planning::ipomcp(
      sim, replica_, cfg.planner_iterations, cfg.c_uct_iug, cfg.gamma, rng.sub("tree"));
  std::vector<int> idx;
  std::vector<double> q;
  for (int i = 0; i < kNumOffers; ++i)
    if (res.visits[i] > 0) {
      idx.push_back(i);
      q.push_back(res.q[i]);
    }
  const std::vector<double> p = softmax_policy(q, cfg.temperature);
  RandomSource pick = rng.sub("pick");
  return idx[sample_index(p, pick)];
}

void Dom1Sender::observe(int offer, bool accept) {
  respond_to_offer(replica_, offer, *rv_, &cache_);
  complete_trial(replica_, offer, accept, *rv_);
}

}  // namespace tomsim::iug
