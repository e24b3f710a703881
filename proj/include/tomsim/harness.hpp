#pragma once
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tomsim/core.hpp"

namespace tomsim::harness {

enum class Game { iug, rowcol };

// One episode configuration; delta/omega live in cfg.
struct ExperimentSpec {
  Game game = Game::iug;
  EngineConfig cfg;
  AgentSpec agent_a;  // sender / row
  AgentSpec agent_b;  // receiver / column
  int matrix_id = 0;  // rowcol: 1, 2, or 0 = drawn per seed
};

struct TrialLogRow {
  int trial = 0;
  std::string action_a;
  std::string action_b;
  double reward_a = 0.0;
  double reward_b = 0.0;
  std::array<double, 3> belief{};   // victim's posterior after the trial
  std::vector<int> flags;           // one per modeled type (3 iug, 1 rowcol)
  bool triggered = false;
  double expected_reward = 0.0;     // victim's own pre-trial expectation
  double regret = 0.0;              // realized - expected
};

struct EpisodeResult {
  uint64_t seed = 0;
  double delta = 0.0;
  double omega = 0.0;
  int true_type = 0;
  int matrix_id = 0;  // 0 for iug
  std::vector<TrialLogRow> rows;
  double cum_a = 0.0;
  double cum_b = 0.0;
  double expected_a_cum = 0.0;
  double expected_b_cum = 0.0;
  int false_belief_trials = 0;
  int first_trigger_trial = 0;  // 0 = never
};

// Deterministic in (spec, seed); safe to call concurrently.
EpisodeResult run_episode(const ExperimentSpec& spec, uint64_t seed);

struct ExperimentPlan {
  ExperimentSpec spec;
  std::vector<double> deltas{0.1};
  std::vector<double> omegas{0.3};
  std::vector<uint64_t> seeds;
  int threads = 1;
};

// Cartesian product of deltas x omegas x seeds; episodes run in parallel but
// results come back ordered by (delta, omega, seed).
std::vector<EpisodeResult> run_plan(const ExperimentPlan& plan);

// Column order matches TrialLogRow prefixed by (seed, delta, omega); header
// row, 9 significant digits, LF line endings.
void write_csv(std::ostream& os, const std::vector<EpisodeResult>& results,
               Game game);

// Config echo, engine version, per-cell aggregates.
std::string summary_json(const ExperimentPlan& plan,
                         const std::vector<EpisodeResult>& results);

// I/O failures are reported with the path attached.
void write_file(const std::string& path, const std::string& content);

int cli_main(int argc, const char* const* argv);

}  // namespace tomsim::harness
