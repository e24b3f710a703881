// Acceptance gate: every release criterion measured end to end at full scale.
// Prints one line per criterion with the measured value and its bound; the
// process exits non-zero if any criterion fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tomsim/aleph.hpp"
#include "tomsim/harness.hpp"
#include "tomsim/iug.hpp"
#include "tomsim/metrics.hpp"
#include "tomsim/planning.hpp"
#include "tomsim/zerosum.hpp"

using namespace tomsim;
using harness::EpisodeResult;
using harness::ExperimentPlan;
using harness::ExperimentSpec;
using harness::Game;

namespace {

int g_failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("[%s] %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void info(const char* id, const std::string& detail) {
  std::printf("[%s] INFO %s\n", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int hw_threads() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<uint64_t> seed_range(uint64_t n) {
  std::vector<uint64_t> s;
  for (uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

std::vector<EpisodeResult> run(const ExperimentSpec& spec, uint64_t seeds,
                               std::vector<double> deltas = {0.1},
                               std::vector<double> omegas = {0.3}) {
  ExperimentPlan plan;
  plan.spec = spec;
  plan.deltas = std::move(deltas);
  plan.omegas = std::move(omegas);
  plan.seeds = seed_range(seeds);
  plan.threads = hw_threads();
  return harness::run_plan(plan);
}

ExperimentSpec deceiver_spec(double psi, bool mech) {
  ExperimentSpec spec;
  spec.game = Game::iug;
  spec.agent_a.dom_level = 1;
  spec.agent_a.threshold = psi;
  spec.agent_b.dom_level = 0;
  spec.agent_b.aleph = mech;
  return spec;
}

double mean(const std::vector<double>& xs) { return metrics::summarize(xs).mean; }

// ---- criteria 1 & 2: undetected deception margins and false belief ----

struct DeceptionRun {
  std::vector<EpisodeResult> results;
  double excess_pct = 0.0;
  double ratio = 0.0;  // aggregate sender/receiver cumulative ratio
};

DeceptionRun deception_run(double psi, bool mech, uint64_t seeds) {
  DeceptionRun out;
  out.results = run(deceiver_spec(psi, mech), seeds);
  std::vector<double> excess;
  double sum_a = 0.0, sum_b = 0.0;
  for (const EpisodeResult& r : out.results) {
    if (r.expected_a_cum > 1e-12)
      excess.push_back(100.0 * (r.cum_a - r.expected_a_cum) / r.expected_a_cum);
    sum_a += r.cum_a;
    sum_b += r.cum_b;
  }
  out.excess_pct = mean(excess);
  out.ratio = sum_b != 0.0 ? sum_a / sum_b : 0.0;
  return out;
}

// ---- criterion 3 info: detection of a planner that ignores the mechanism --

double naive_deceiver_detection_rate(uint64_t seeds) {
  EngineConfig cfg;
  const iug::ReceiverValues rv(cfg);
  int detected = 0;
  for (uint64_t seed = 1; seed <= seeds; ++seed) {
    RandomSource root(seed);
    const RandomSource mech = root.sub("mech");
    iug::ReceiverState actual = iug::init_receiver_state(cfg, true, mech);
    iug::Dom1Sender sender(&rv, 0.1, /*receiver_mech=*/false, mech);
    iug::CompressCache cache;
    RandomSource rs_pl = root.sub("planner");
    RandomSource rs_b = root.sub("agent_b");
    bool tripped = false;
    for (int t = 1; t <= cfg.horizon; ++t) {
      const int offer = sender.choose_offer(rs_pl.sub(static_cast<uint64_t>(t)));
      const PolicyDistribution resp = iug::respond_to_offer(actual, offer, rv, &cache);
      RandomSource rb = rs_b.sub(static_cast<uint64_t>(t));
      const bool accept = resp.sample(rb) == 1;
      iug::complete_trial(actual, offer, accept, rv);
      sender.observe(offer, accept);
      if (!(actual.flags[0] | actual.flags[1] | actual.flags[2])) {
        tripped = true;
        break;
      }
    }
    detected += tripped ? 1 : 0;
  }
  return static_cast<double>(detected) / static_cast<double>(seeds);
}

// ---- criterion 8: module property sweep ----

// Minimal closed-form decision problem for the search-vs-enumeration checks.
struct WalkSim {
  struct State {
    int pos = 0;
    int t = 0;
  };
  int horizon = 3;
  static constexpr std::array<double, 5> kLoot = {0.0, 1.0, -0.5, 2.0, 0.3};

  int num_actions(const State&) const { return 2; }
  bool terminal(const State& s) const { return s.t >= horizon; }
  std::vector<double> act(State& s, int a) const {
    double p0 = a == 0 ? 0.7 : 0.4;
    if (s.pos % 2 == 1) p0 = 1.0 - p0;
    return {p0, 1.0 - p0};
  }
  double react(State& s, int a, int o) const {
    const double r = kLoot[(s.pos + 2 * a + o) % 5];
    s.pos = (s.pos + a + o + 1) % 4;
    s.t += 1;
    return r;
  }
};

std::array<double, 2> walk_table_q(int pos0, int horizon, double gamma) {
  std::vector<std::array<std::array<double, 2>, 4>> q(horizon + 1);
  for (int t = horizon - 1; t >= 0; --t)
    for (int pos = 0; pos < 4; ++pos)
      for (int a = 0; a < 2; ++a) {
        double p0 = a == 0 ? 0.7 : 0.4;
        if (pos % 2 == 1) p0 = 1.0 - p0;
        double qa = 0.0;
        for (int o = 0; o < 2; ++o) {
          const double pr = o == 0 ? p0 : 1.0 - p0;
          const double r = WalkSim::kLoot[(pos + 2 * a + o) % 5];
          const int npos = (pos + a + o + 1) % 4;
          const double cont =
              t + 1 < horizon ? std::max(q[t + 1][npos][0], q[t + 1][npos][1]) : 0.0;
          qa += pr * (r + gamma * cont);
        }
        q[t][pos][a] = qa;
      }
  return q[0][pos0];
}

bool prop_normalization() {
  RandomSource rng(101);
  for (int k = 0; k < 200; ++k) {
    const int lo = static_cast<int>(rng.uniform() * 12) - 1;
    const int hi = static_cast<int>(rng.uniform() * 11);
    const int last = static_cast<int>(rng.uniform() * 12) - 1;
    for (int type = 0; type < 3; ++type) {
      double sum = 0.0;
      for (double x : iug::sender_policy(type, {lo, hi}, last, 0.1)) {
        if (x < 0.0) return false;
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9) return false;
    }
    std::array<double, 3> b{rng.uniform(), rng.uniform(), rng.uniform()};
    const double z = b[0] + b[1] + b[2];
    for (double& x : b) x /= z;
    double sum = 0.0;
    for (double x : zerosum::dom0_col_policy(b, 0.1)) sum += x;
    if (std::abs(sum - 1.0) > 1e-9) return false;
  }
  return true;
}

bool prop_flag_monotonicity() {
  RandomSource rng(102);
  aleph::Flags f{1, 1, 1};
  for (int i = 0; i < 500; ++i) {
    aleph::Flags z1(3), z2(3);
    for (int k = 0; k < 3; ++k) {
      z1[k] = rng.uniform() < 0.7;
      z2[k] = rng.uniform() < 0.7;
    }
    const aleph::Flags g = aleph::combine(f, z1, z2);
    for (int k = 0; k < 3; ++k)
      if (!f[k] && g[k]) return false;
    f = g;
  }
  return true;
}

bool prop_bounds_fold() {
  RandomSource rng(103);
  for (int k = 0; k < 200; ++k) {
    History h;
    iug::SenderBounds direct;
    for (int t = 1; t <= 12; ++t) {
      const int offer = static_cast<int>(rng.uniform() * 11);
      const bool accept = rng.uniform() < 0.5;
      h.push_back({t, Offer{offer}, Response{accept}, 0.0, 0.0});
      direct = iug::update_bounds(direct, offer, accept);
    }
    if (!(iug::fold_bounds(h) == direct)) return false;
    if (!(iug::fold_bounds(h) == iug::fold_bounds(h))) return false;
  }
  return true;
}

bool prop_expectimax_exact() {
  WalkSim sim;
  for (int pos = 0; pos < 4; ++pos) {
    const std::array<double, 2> expect = walk_table_q(pos, 3, 0.9);
    const std::vector<double> got =
        planning::expectimax(sim, WalkSim::State{pos, 0}, 2, 0.9);
    for (int a = 0; a < 2; ++a)
      if (std::abs(got[a] - expect[a]) > 1e-9) return false;
  }
  return true;
}

bool prop_search_matches_enumeration() {
  WalkSim sim;
  const std::array<double, 2> expect = walk_table_q(0, 3, 0.9);
  const planning::IpomcpResult res =
      planning::ipomcp(sim, WalkSim::State{0, 0}, 50000, 2.0, 0.9, RandomSource(55));
  const int best = expect[0] >= expect[1] ? 0 : 1;
  const int got = res.q[0] >= res.q[1] ? 0 : 1;
  return got == best && std::abs(res.q[best] - expect[best]) <= 0.02;
}

bool prop_zero_sum_conservation() {
  const double kG1[2][3] = {{4, 0, 2}, {4, 0, -2}};
  const double kG2[2][3] = {{0, 4, -2}, {0, 4, 2}};
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 3; ++c)
      if (zerosum::row_payoff(1, a, c) != kG1[a][c] ||
          zerosum::row_payoff(2, a, c) != kG2[a][c])
        return false;
  ExperimentSpec spec;
  spec.game = Game::rowcol;
  spec.agent_a.dom_level = -1;
  spec.agent_b.dom_level = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed)
    for (const auto& row : harness::run_episode(spec, seed).rows)
      if (row.reward_a + row.reward_b != 0.0) return false;
  return true;
}

bool prop_reward_masking() {
  // Masked rewards affirm every type regardless of the observed value...
  if (aleph::z2_reward(1e9, {{}, {}, {}}, 0.3, false, false) != aleph::Flags{1, 1, 1})
    return false;
  // ...and the row gate never consults rewards: an extreme streak of payoffs
  // cannot deny while the column's actions remain typical.
  EngineConfig cfg;
  zerosum::Dom1RowAgent row(1, cfg, true);
  int n_bot = 0;
  for (int t = 1; t <= 4; ++t) {
    const std::array<double, 3> b = zerosum::fold_row_belief(
        zerosum::type_prior(false), 0, n_bot, cfg.temperature);
    const int col = argmax_index(zerosum::dom0_col_policy(b, cfg.temperature));
    row.observe(1, col);
    n_bot += 1;
    if (row.triggered()) return false;
  }
  return true;
}

bool prop_byte_identical_reruns() {
  for (const bool mech : {false, true}) {
    ExperimentSpec spec = deceiver_spec(0.1, mech);
    spec.cfg.planner_iterations = 500;
    std::ostringstream a, b;
    harness::write_csv(a, {harness::run_episode(spec, 9)}, Game::iug);
    harness::write_csv(b, {harness::run_episode(spec, 9)}, Game::iug);
    if (a.str() != b.str()) return false;
  }
  return true;
}

bool prop_nested_reconstruction() {
  EngineConfig cfg;
  cfg.mech_samples = 50;
  cfg.planner_iterations = 500;
  const iug::ReceiverValues rv(cfg);
  for (const bool mech : {false, true}) {
    RandomSource root(31);
    const RandomSource rs_mech = root.sub("mech");
    iug::ReceiverState actual = iug::init_receiver_state(cfg, mech, rs_mech);
    iug::Dom1Sender sender(&rv, 0.1, mech, rs_mech);
    iug::CompressCache cache;
    RandomSource rs_pl = root.sub("planner");
    RandomSource rs_b = root.sub("agent_b");
    for (int t = 1; t <= cfg.horizon; ++t) {
      const int offer = sender.choose_offer(rs_pl.sub(static_cast<uint64_t>(t)));
      const PolicyDistribution resp = iug::respond_to_offer(actual, offer, rv, &cache);
      RandomSource rb = rs_b.sub(static_cast<uint64_t>(t));
      const bool accept = resp.sample(rb) == 1;
      iug::complete_trial(actual, offer, accept, rv);
      sender.observe(offer, accept);
      const iug::ReceiverState& rep = sender.replica();
      if (rep.belief != actual.belief || !(rep.bounds == actual.bounds) ||
          rep.flags != actual.flags || rep.traj != actual.traj ||
          rep.cum != actual.cum || rep.observed_cum != actual.observed_cum)
        return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const uint64_t kSeeds = 50;
  std::printf("acceptance sweep: %llu seeds per arm, %d threads\n",
              static_cast<unsigned long long>(kSeeds), hw_threads());

  // -- criterion 1: deception margin without the mechanism ------------------
  Timer t1;
  const DeceptionRun off01 = deception_run(0.1, false, kSeeds);
  const DeceptionRun off05 = deception_run(0.5, false, kSeeds);
  report("C1a", off01.excess_pct >= 25.0 && off01.excess_pct <= 55.0,
         fmt("deception margin psi=0.1: realized sender take exceeds the victim's "
             "forecast by %.1f%%, bound [25,55]%% (%.0fs)",
             off01.excess_pct, t1.secs()));
  report("C1b", off05.excess_pct >= 55.0 && off05.excess_pct <= 85.0,
         fmt("deception margin psi=0.5: measured %.1f%%, bound [55,85]%%",
             off05.excess_pct));

  // -- criterion 2: sustained false belief ----------------------------------
  {
    int fb = 0, total = 0;
    for (const auto* runp : {&off01.results, &off05.results})
      for (const EpisodeResult& r : *runp) {
        fb += r.false_belief_trials;
        total += static_cast<int>(r.rows.size());
      }
    const double rate = static_cast<double>(fb) / total;
    report("C2", rate >= 0.90,
           fmt("victim holds a false belief in %.1f%% of trials, bound >= 90%%",
               100.0 * rate));
  }

  // -- criterion 3: mechanism cuts the exploitation ratio -------------------
  {
    Timer t3;
    const DeceptionRun on01 = deception_run(0.1, true, kSeeds);
    const double reduction =
        off01.ratio > 0.0 ? 100.0 * (1.0 - on01.ratio / off01.ratio) : 0.0;
    report("C3", reduction >= 25.0,
           fmt("sender/receiver take ratio %.2f off -> %.2f on at "
               "(delta=0.1, omega=0.3): reduced %.1f%%, bound >= 25%% "
               "(target > 40%%) (%.0fs)",
               off01.ratio, on01.ratio, reduction, t3.secs()));
    int trig = 0;
    for (const EpisodeResult& r : on01.results) trig += r.first_trigger_trial > 0;
    info("C3", fmt("mechanism-aware planner tripped the gate in %d/%llu episodes",
                   trig, static_cast<unsigned long long>(kSeeds)));
    const double naive = naive_deceiver_detection_rate(kSeeds);
    info("C3", fmt("mechanism-blind planner detected in %.0f%% of episodes "
                   "(reference >= 90%%)",
                   100.0 * naive));
  }

  // -- criterion 4: masquerade margin against the myopic column -------------
  {
    Timer t4;
    ExperimentSpec spec;
    spec.game = Game::rowcol;
    spec.agent_a.dom_level = 1;
    spec.agent_b.dom_level = 0;
    spec.matrix_id = 0;
    const std::vector<EpisodeResult> rr = run(spec, kSeeds);
    std::vector<double> diffs;
    for (const EpisodeResult& r : rr)
      diffs.push_back((r.cum_a - r.cum_b) / static_cast<double>(r.rows.size()));
    const double d = mean(diffs);
    report("C4", d >= 5.5 && d <= 8.5,
           fmt("row-column per-trial margin vs the myopic column: %.2f, "
               "bound [5.5,8.5] (%.0fs)",
               d, t4.secs()));
  }

  // -- criterion 5: the counter-deceiver turns the tables -------------------
  {
    ExperimentSpec spec;
    spec.game = Game::rowcol;
    spec.agent_a.dom_level = 1;
    spec.agent_b.dom_level = 2;
    spec.matrix_id = 0;
    const std::vector<EpisodeResult> rr = run(spec, kSeeds);
    std::vector<double> late;
    for (const EpisodeResult& r : rr) {
      double s = 0.0;
      int n = 0;
      for (const auto& row : r.rows)
        if (row.trial > 3) {
          s += row.reward_b;
          ++n;
        }
      late.push_back(s / n);
    }
    const double m = mean(late);
    report("C5", m > 0.0 && m >= 1.0,
           fmt("column per-trial reward after trial 3 vs the bluffing row: "
               "%.2f, bound >= 1.0",
               m));
  }

  // -- criterion 6: gated row against the counter-deceiver ------------------
  {
    ExperimentSpec spec;
    spec.game = Game::rowcol;
    spec.agent_a.dom_level = 1;
    spec.agent_a.aleph = true;
    spec.agent_b.dom_level = 2;
    spec.matrix_id = 0;
    const std::vector<EpisodeResult> rr = run(spec, kSeeds);
    std::vector<double> absdiff, cum_a, cum_b, trig;
    for (const EpisodeResult& r : rr) {
      double s = 0.0;
      for (const auto& row : r.rows) s += std::abs(row.reward_a - row.reward_b);
      absdiff.push_back(s / static_cast<double>(r.rows.size()));
      cum_a.push_back(r.cum_a);
      cum_b.push_back(r.cum_b);
      if (r.first_trigger_trial > 0) trig.push_back(r.first_trigger_trial);
    }
    const double ad = mean(absdiff), ca = mean(cum_a), cb = mean(cum_b);
    report("C6", ad < 0.5 && std::abs(ca) <= 1.0 && std::abs(cb) <= 1.0,
           fmt("gated row vs counter-deceiver: |row-col| %.2f/trial "
               "(bound < 0.5), mean cums %+.1f/%+.1f (bound within +-1); "
               "gate fired in %zu/%llu episodes, mean trigger trial %.1f",
               ad, ca, cb, trig.size(), static_cast<unsigned long long>(kSeeds),
               trig.empty() ? 0.0 : mean(trig)));
  }

  // -- criterion 7: band width monotonicity against an honest sender --------
  {
    Timer t7;
    ExperimentSpec spec;
    spec.game = Game::iug;
    spec.agent_a.dom_level = -1;
    spec.agent_a.random_persona = true;
    spec.agent_b.dom_level = 0;
    spec.agent_b.aleph = true;
    const std::vector<EpisodeResult> rr =
        run(spec, kSeeds, {0.01, 0.3}, {0.01, 0.3});
    double loose = 0.0, tight = 0.0;
    int nl = 0, nt = 0;
    for (const EpisodeResult& r : rr) {
      const double per_trial = r.cum_b / static_cast<double>(r.rows.size());
      if (r.delta == 0.01 && r.omega == 0.01) {
        loose += per_trial;
        ++nl;
      } else if (r.delta == 0.3 && r.omega == 0.3) {
        tight += per_trial;
        ++nt;
      }
    }
    loose /= nl;
    tight /= nt;
    report("C7", loose - tight >= 0.1,
           fmt("honest-sender receiver take: %.3f/trial at wide bands vs "
               "%.3f at tight: margin %.3f, bound >= 0.1 (%.0fs)",
               loose, tight, loose - tight, t7.secs()));
  }

  // -- criterion 8: module property sweep -----------------------------------
  {
    struct Prop {
      const char* name;
      bool (*fn)();
    };
    const Prop props[] = {
        {"policy-normalization", prop_normalization},
        {"flag-monotonicity", prop_flag_monotonicity},
        {"bounds-fold", prop_bounds_fold},
        {"expectimax-enumeration", prop_expectimax_exact},
        {"search-vs-enumeration", prop_search_matches_enumeration},
        {"zero-sum-conservation", prop_zero_sum_conservation},
        {"reward-masking", prop_reward_masking},
        {"byte-identical-reruns", prop_byte_identical_reruns},
        {"nested-reconstruction", prop_nested_reconstruction},
    };
    int ok = 0;
    std::string failed;
    for (const Prop& p : props) {
      if (p.fn()) {
        ++ok;
      } else {
        failed += std::string(" ") + p.name;
      }
    }
    report("C8", ok == 9,
           fmt("property sweep: %d/9 held%s%s", ok, failed.empty() ? "" : ", failed:",
               failed.c_str()));
  }

  std::printf("acceptance: %d criterion line(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
