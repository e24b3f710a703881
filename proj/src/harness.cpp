#include "tomsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "tomsim/iug.hpp"
#include "tomsim/metrics.hpp"
#include "tomsim/zerosum.hpp"

namespace tomsim::harness {

namespace {

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

EpisodeResult run_iug_episode(const ExperimentSpec& spec, uint64_t seed) {
  const EngineConfig& cfg = spec.cfg;
  RandomSource root(seed);
  const RandomSource rs_a = root.sub("agent_a");
  const RandomSource rs_b = root.sub("agent_b");
  const RandomSource rs_pl = root.sub("planner");
  const RandomSource rs_mech = root.sub("mech");

  const int true_type = spec.agent_a.random_persona
                            ? iug::kTypeRandom
                            : (spec.agent_a.threshold > 0.3 ? iug::kTypePsi05
                                                            : iug::kTypePsi01);

  const iug::ReceiverValues rv(cfg);
  const bool mech_on = spec.agent_b.aleph;
  iug::ReceiverState rst = iug::init_receiver_state(cfg, mech_on, rs_mech);
  iug::CompressCache rcache;

  iug::SenderBounds sb;
  int sender_last = -1;
  std::optional<iug::Dom1Sender> dom1;
  if (spec.agent_a.dom_level == 1)
    dom1.emplace(&rv, spec.agent_a.threshold, mech_on, rs_mech);

  EpisodeResult res;
  res.seed = seed;
  res.delta = cfg.delta;
  res.omega = cfg.omega;
  res.true_type = true_type;

  for (int t = 1; t <= cfg.horizon; ++t) {
    const auto [es, er] = iug::expected_trial_rewards(rst, rv);

    int offer;
    if (dom1) {
      offer = dom1->choose_offer(rs_pl.sub(static_cast<uint64_t>(t)));
    } else {
      const std::vector<double> pol =
          iug::sender_policy(true_type, sb, sender_last, cfg.temperature);
      RandomSource r = rs_a.sub(static_cast<uint64_t>(t));
      offer = sample_index(pol, r);
    }

    const PolicyDistribution resp = iug::respond_to_offer(rst, offer, rv, &rcache);
    RandomSource rb = rs_b.sub(static_cast<uint64_t>(t));
    const bool accept = resp.sample(rb) == 1;
    const auto [ra, rbw] = iug::trial_reward(offer, accept);

    TrialLogRow row;
    row.trial = t;
    row.action_a = action_label(Offer{offer});
    row.action_b = action_label(Response{accept});
    row.reward_a = ra;
    row.reward_b = rbw;
    row.belief = rst.belief;
    row.flags = {rst.flags[0], rst.flags[1], rst.flags[2]};
    row.triggered = mech_on && !(rst.flags[0] | rst.flags[1] | rst.flags[2]);
    row.expected_reward = er;
    row.regret = metrics::regret_estimate(rbw, er);

    iug::complete_trial(rst, offer, accept, rv);
    if (dom1) {
      dom1->observe(offer, accept);
    } else {
      sb = iug::update_bounds(sb, offer, accept);
      sender_last = offer;
    }

    res.cum_a += ra;
    res.cum_b += rbw;
    res.expected_a_cum += es;
    res.expected_b_cum += er;
    if (metrics::false_belief({row.belief.begin(), row.belief.end()}, true_type))
      ++res.false_belief_trials;
    if (row.triggered && res.first_trigger_trial == 0) res.first_trigger_trial = t;
    res.rows.push_back(std::move(row));
  }
  return res;
}

EpisodeResult run_rowcol_episode(const ExperimentSpec& spec, uint64_t seed) {
  const EngineConfig& cfg = spec.cfg;
  RandomSource root(seed);
  RandomSource rs_nature = root.sub("nature");
  const RandomSource rs_a = root.sub("agent_a");
  const RandomSource rs_b = root.sub("agent_b");

  int matrix_id = spec.matrix_id;
  if (matrix_id == 0) matrix_id = rs_nature.uniform() < 0.5 ? 1 : 2;

  int theta;
  if (spec.agent_a.dom_level == 1) {
    theta = matrix_id;  // the planner is always informed
  } else {
    const double p_inf = cfg.flat_prior ? 2.0 / 3.0 : 0.5;
    theta = rs_nature.uniform() < p_inf ? matrix_id : 0;
  }

  std::optional<zerosum::Dom1RowAgent> row_agent;
  if (spec.agent_a.dom_level == 1)
    row_agent.emplace(matrix_id, cfg, spec.agent_a.aleph);

  std::optional<zerosum::Dom0ColumnAgent> col0;
  std::optional<zerosum::Dom2Column> col2;
  if (spec.agent_b.dom_level == 2)
    col2.emplace(cfg, spec.agent_a.aleph);
  else
    col0.emplace(cfg);

  EpisodeResult res;
  res.seed = seed;
  res.delta = cfg.delta;
  res.omega = cfg.omega;
  res.true_type = theta;
  res.matrix_id = matrix_id;

  for (int t = 1; t <= cfg.horizon; ++t) {
    const std::array<double, 3> cq = col0 ? col0->q() : col2->q();
    const std::vector<double> cpol =
        col0 ? col0->action_dist() : col2->action_dist();
    double er = 0.0;
    for (int c = 0; c < 3; ++c) er += cpol[c] * cq[c];

    std::vector<double> rdist;
    if (row_agent) {
      rdist = row_agent->action_dist();
    } else {
      const std::array<double, 2> rp =
          zerosum::reactive_row_policy(theta, cfg.temperature);
      rdist = {rp[0], rp[1]};
    }
    RandomSource ra_rng = rs_a.sub(static_cast<uint64_t>(t));
    const int a = sample_index(rdist, ra_rng);
    RandomSource rb_rng = rs_b.sub(static_cast<uint64_t>(t));
    const int c = sample_index(cpol, rb_rng);

    const double r_row = zerosum::row_payoff(matrix_id, a, c);
    const double r_col = -r_row;

    if (row_agent) row_agent->observe(a, c);
    if (col0)
      col0->observe(a);
    else
      col2->observe(a, c);

    TrialLogRow row;
    row.trial = t;
    row.action_a = action_label(static_cast<Row>(a));
    row.action_b = action_label(static_cast<Column>(c));
    row.reward_a = r_row;
    row.reward_b = r_col;
    row.belief = col0 ? col0->belief() : col2->belief();
    const bool gated = row_agent && spec.agent_a.aleph;
    row.flags = {gated ? static_cast<int>(row_agent->flags()[0]) : 1};
    row.triggered = row_agent && row_agent->triggered();
    row.expected_reward = er;
    row.regret = metrics::regret_estimate(r_col, er);

    res.cum_a += r_row;
    res.cum_b += r_col;
    res.expected_a_cum += -er;
    res.expected_b_cum += er;
    if (metrics::false_belief({row.belief.begin(), row.belief.end()},
                              res.true_type))
      ++res.false_belief_trials;
    if (row.triggered && res.first_trigger_trial == 0) res.first_trigger_trial = t;
    res.rows.push_back(std::move(row));
  }
  return res;
}

nlohmann::json config_json(const ExperimentSpec& spec) {
  const EngineConfig& c = spec.cfg;
  nlohmann::json agents = {
      {"a",
       {{"dom", spec.agent_a.dom_level},
        {"threshold", spec.agent_a.threshold},
        {"random_persona", spec.agent_a.random_persona},
        {"aleph", spec.agent_a.aleph}}},
      {"b",
       {{"dom", spec.agent_b.dom_level},
        {"threshold", spec.agent_b.threshold},
        {"random_persona", spec.agent_b.random_persona},
        {"aleph", spec.agent_b.aleph}}}};
  return {{"game", spec.game == Game::iug ? "iug" : "rowcol"},
          {"matrix", spec.matrix_id},
          {"horizon", c.horizon},
          {"temperature", c.temperature},
          {"gamma", c.gamma},
          {"delta", c.delta},
          {"omega", c.omega},
          {"mech_samples", c.mech_samples},
          {"planner_iterations", c.planner_iterations},
          {"c_uct_iug", c.c_uct_iug},
          {"c_uct_zerosum", c.c_uct_zerosum},
          {"flat_prior", c.flat_prior},
          {"z2_lower_only", c.z2_lower_only},
          {"z2_realized_own", c.z2_realized_own},
          {"agents", agents}};
}

nlohmann::json cell_aggregates(const ExperimentPlan& plan,
                               const std::vector<EpisodeResult>& results) {
  nlohmann::json cells = nlohmann::json::array();
  const size_t ns = plan.seeds.size();
  const int H = plan.spec.cfg.horizon;
  size_t base = 0;
  for (double d : plan.deltas)
    for (double o : plan.omegas) {
      std::vector<double> cum_a, cum_b, creg, exp_a, exp_b;
      double abs_diff = 0.0;
      int fb = 0, triggered = 0;
      double trig_sum = 0.0;
      for (size_t s = 0; s < ns; ++s) {
        const EpisodeResult& r = results[base + s];
        cum_a.push_back(r.cum_a);
        cum_b.push_back(r.cum_b);
        creg.push_back(r.cum_b - r.expected_b_cum);
        exp_a.push_back(r.expected_a_cum);
        exp_b.push_back(r.expected_b_cum);
        fb += r.false_belief_trials;
        if (r.first_trigger_trial > 0) {
          ++triggered;
          trig_sum += r.first_trigger_trial;
        }
        for (const TrialLogRow& row : r.rows)
          abs_diff += std::abs(row.reward_a - row.reward_b);
      }
      const metrics::Summary sa = metrics::summarize(cum_a);
      const metrics::Summary sb = metrics::summarize(cum_b);
      const metrics::Summary sr = metrics::summarize(creg);
      double sum_a = 0.0, sum_b = 0.0;
      for (double x : cum_a) sum_a += x;
      for (double x : cum_b) sum_b += x;
      nlohmann::json cell = {
          {"delta", d},
          {"omega", o},
          {"n", static_cast<int>(ns)},
          {"cum_reward_a", {{"mean", sa.mean}, {"sd", sa.sd}}},
          {"cum_reward_b", {{"mean", sb.mean}, {"sd", sb.sd}}},
          {"mean_trial_reward_a", sa.mean / H},
          {"mean_trial_reward_b", sb.mean / H},
          {"mean_abs_trial_diff", abs_diff / (ns * H)},
          {"expected_cum_a_mean", metrics::summarize(exp_a).mean},
          {"expected_cum_b_mean", metrics::summarize(exp_b).mean},
          {"false_belief_rate", static_cast<double>(fb) / (ns * H)},
          {"trigger_rate", static_cast<double>(triggered) / ns},
          {"cum_regret_b", {{"mean", sr.mean}, {"sd", sr.sd}}}};
      if (std::abs(sum_b) > 1e-12)
        cell["reward_ratio_a_over_b"] = sum_a / sum_b;
      else
        cell["reward_ratio_a_over_b"] = nullptr;
      if (triggered > 0)
        cell["mean_first_trigger_trial"] = trig_sum / triggered;
      else
        cell["mean_first_trigger_trial"] = nullptr;
      cells.push_back(std::move(cell));
      base += ns;
    }
  return cells;
}

}  // namespace

EpisodeResult run_episode(const ExperimentSpec& spec, uint64_t seed) {
  spec.cfg.validate();
  if (spec.game == Game::iug) return run_iug_episode(spec, seed);
  return run_rowcol_episode(spec, seed);
}

std::vector<EpisodeResult> run_plan(const ExperimentPlan& plan) {
  if (plan.seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (plan.deltas.empty() || plan.omegas.empty())
    throw std::invalid_argument("grid axis is empty");
  struct Task {
    double d, o;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (double d : plan.deltas)
    for (double o : plan.omegas)
      for (uint64_t s : plan.seeds) tasks.push_back({d, o, s});

  std::vector<EpisodeResult> out(tasks.size());
  auto run_task = [&](size_t i) {
    ExperimentSpec s = plan.spec;
    s.cfg.delta = tasks[i].d;
    s.cfg.omega = tasks[i].o;
    out[i] = run_episode(s, tasks[i].seed);
  };

  const int nth = std::max(1, plan.threads);
  if (nth == 1 || tasks.size() <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        run_task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < nth; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

void write_csv(std::ostream& os, const std::vector<EpisodeResult>& results,
               Game game) {
  const int nflags = game == Game::iug ? 3 : 1;
  os << "seed,delta,omega,trial,action_a,action_b,reward_a,reward_b,"
        "belief_0,belief_1,belief_2";
  for (int i = 0; i < nflags; ++i) os << ",flag_" << i;
  os << ",triggered,expected_reward,regret\n";
  for (const EpisodeResult& r : results)
    for (const TrialLogRow& row : r.rows) {
      os << r.seed << ',' << fmt9(r.delta) << ',' << fmt9(r.omega) << ','
         << row.trial << ',' << row.action_a << ',' << row.action_b << ','
         << fmt9(row.reward_a) << ',' << fmt9(row.reward_b);
      for (double b : row.belief) os << ',' << fmt9(b);
      for (int i = 0; i < nflags; ++i) os << ',' << row.flags[i];
      os << ',' << (row.triggered ? 1 : 0) << ',' << fmt9(row.expected_reward)
         << ',' << fmt9(row.regret) << '\n';
    }
}

std::string summary_json(const ExperimentPlan& plan,
                         const std::vector<EpisodeResult>& results) {
  nlohmann::json j;
  j["version"] = kEngineVersion;
  j["config"] = config_json(plan.spec);
  j["grid"] = {{"deltas", plan.deltas},
               {"omegas", plan.omegas},
               {"seeds", plan.seeds}};
  j["cells"] = cell_aggregates(plan, results);
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  os << content;
  os.flush();
  if (!os) throw std::runtime_error(path + ": write failed");
}

namespace {

std::vector<uint64_t> parse_seeds(const std::string& s) {
  std::vector<uint64_t> seeds;
  const size_t dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      const uint64_t lo = std::stoull(s.substr(0, dots));
      const uint64_t hi = std::stoull(s.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("descending seed range");
      for (uint64_t x = lo; x <= hi; ++x) seeds.push_back(x);
    } else {
      std::stringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse seed list '" + s + "'");
  }
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  return seeds;
}

struct CliOptions {
  std::string game = "iug";
  int sender_dom = -1;
  int receiver_dom = 0;
  std::string threshold = "0.1";
  std::string matrix = "random";
  int trials = 12;
  double temperature = 0.1;
  double gamma = 0.99;
  double delta = 0.1;
  double omega = 0.3;
  int samples = 100;
  int planner_iterations = 10000;
  std::string seeds = "1..50";
  std::string aleph = "off";
  std::string out;
  std::string format = "both";
  int threads = 0;  // 0 = hardware concurrency
  bool flat_prior = false;
  bool z2_lower_only = false;
  bool z2_realized_own = false;
  std::vector<double> deltas;
  std::vector<double> omegas;
  std::string config_path;
};

void preload_config(CliOptions& o, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument(path + ": cannot open config file");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) j.at(key).get_to(slot);
  };
  get("game", o.game);
  get("sender_dom", o.sender_dom);
  get("receiver_dom", o.receiver_dom);
  get("threshold", o.threshold);
  get("matrix", o.matrix);
  get("trials", o.trials);
  get("temperature", o.temperature);
  get("gamma", o.gamma);
  get("delta", o.delta);
  get("omega", o.omega);
  get("samples", o.samples);
  get("planner_iterations", o.planner_iterations);
  get("seeds", o.seeds);
  get("aleph", o.aleph);
  get("out", o.out);
  get("format", o.format);
  get("threads", o.threads);
  get("flat_prior", o.flat_prior);
  get("z2_lower_only", o.z2_lower_only);
  get("z2_realized_own", o.z2_realized_own);
  get("deltas", o.deltas);
  get("omegas", o.omegas);
}

ExperimentPlan build_plan(const CliOptions& o, bool aleph_on) {
  ExperimentPlan plan;
  ExperimentSpec& spec = plan.spec;
  if (o.game == "iug")
    spec.game = Game::iug;
  else if (o.game == "rowcol")
    spec.game = Game::rowcol;
  else
    throw std::invalid_argument("unknown game '" + o.game + "'");

  EngineConfig& cfg = spec.cfg;
  cfg.horizon = o.trials;
  cfg.temperature = o.temperature;
  cfg.gamma = o.gamma;
  cfg.delta = o.delta;
  cfg.omega = o.omega;
  cfg.mech_samples = o.samples;
  cfg.planner_iterations = o.planner_iterations;
  cfg.flat_prior = o.flat_prior;
  cfg.z2_lower_only = o.z2_lower_only;
  cfg.z2_realized_own = o.z2_realized_own;
  cfg.validate();

  spec.agent_a.dom_level = o.sender_dom;
  spec.agent_b.dom_level = o.receiver_dom;

  if (spec.game == Game::iug) {
    if (o.sender_dom != -1 && o.sender_dom != 1)
      throw std::invalid_argument("iug sender dom must be -1 or 1");
    if (o.receiver_dom != 0)
      throw std::invalid_argument("iug receiver dom must be 0");
    if (o.threshold == "random") {
      if (o.sender_dom == 1)
        throw std::invalid_argument("planner sender needs a fixed threshold");
      spec.agent_a.random_persona = true;
    } else if (o.threshold == "0.1") {
      spec.agent_a.threshold = 0.1;
    } else if (o.threshold == "0.5") {
      spec.agent_a.threshold = 0.5;
    } else {
      throw std::invalid_argument("threshold must be 0.1, 0.5 or random");
    }
    spec.agent_b.aleph = aleph_on;
  } else {
    if (o.sender_dom != -1 && o.sender_dom != 1)
      throw std::invalid_argument("row dom must be -1 or 1");
    if (o.receiver_dom != 0 && o.receiver_dom != 2)
      throw std::invalid_argument("column dom must be 0 or 2");
    if (o.matrix == "random")
      spec.matrix_id = 0;
    else if (o.matrix == "1")
      spec.matrix_id = 1;
    else if (o.matrix == "2")
      spec.matrix_id = 2;
    else
      throw std::invalid_argument("matrix must be 1, 2 or random");
    if (aleph_on && o.sender_dom != 1)
      throw std::invalid_argument("row-side mechanism requires the planner row");
    spec.agent_a.aleph = aleph_on;
  }

  plan.deltas = {cfg.delta};
  plan.omegas = {cfg.omega};
  plan.seeds = parse_seeds(o.seeds);
  plan.threads = o.threads > 0
                     ? o.threads
                     : std::max(1u, std::thread::hardware_concurrency());
  return plan;
}

std::string out_dir(const CliOptions& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("TOMSIM_OUT"); env && *env) return env;
  return ".";
}

void export_plan(const ExperimentPlan& plan,
                 const std::vector<EpisodeResult>& results,
                 const std::string& dir, const std::string& format,
                 const std::string& csv_name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": " + ec.message());
  if (format != "csv" && format != "json" && format != "both")
    throw std::invalid_argument("format must be csv, json or both");
  if (format == "csv" || format == "both") {
    std::ostringstream os;
    write_csv(os, results, plan.spec.game);
    write_file(dir + "/" + csv_name, os.str());
  }
  if (format == "json" || format == "both")
    write_file(dir + "/summary.json", summary_json(plan, results));
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CliOptions o;
  // The config file loads first so explicit flags can override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      o.config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      o.config_path = arg.substr(9);
  }
  try {
    if (!o.config_path.empty()) preload_config(o, o.config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  CLI::App app{"Theory-of-mind deception simulator"};
  app.add_option("--game", o.game, "iug or rowcol")->capture_default_str();
  app.add_option("--sender-dom", o.sender_dom,
                 "depth of mind of the sender / row player (-1 or 1)")
      ->capture_default_str();
  app.add_option("--receiver-dom", o.receiver_dom,
                 "depth of mind of the receiver / column player (0 or 2)")
      ->capture_default_str();
  app.add_option("--threshold", o.threshold,
                 "sender persona: 0.1, 0.5 or random (iug)")
      ->capture_default_str();
  app.add_option("--matrix", o.matrix, "payoff matrix: 1, 2 or random (rowcol)")
      ->capture_default_str();
  app.add_option("--trials", o.trials, "trials per episode")
      ->capture_default_str();
  app.add_option("--temperature", o.temperature, "softmax temperature")
      ->capture_default_str();
  app.add_option("--gamma", o.gamma, "discount factor")->capture_default_str();
  app.add_option("--delta", o.delta, "typicality band parameter")
      ->capture_default_str();
  app.add_option("--omega", o.omega, "reward band parameter")
      ->capture_default_str();
  app.add_option("--samples", o.samples, "mechanism sample count")
      ->capture_default_str();
  app.add_option("--planner-iterations", o.planner_iterations,
                 "tree-search iterations per decision")
      ->capture_default_str();
  app.add_option("--seeds", o.seeds, "seed list: A..B or comma separated")
      ->capture_default_str();
  app.add_option("--aleph", o.aleph, "mechanism switch: on or off")
      ->capture_default_str();
  app.add_option("--out", o.out,
                 "output directory (default: $TOMSIM_OUT or '.')");
  app.add_option("--format", o.format, "csv, json or both")
      ->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_flag("--flat-prior", o.flat_prior, "uniform type prior");
  app.add_flag("--z2-lower-only", o.z2_lower_only,
               "reward band checks the lower tail only");
  app.add_flag("--z2-realized-own", o.z2_realized_own,
               "reward samples reuse the realized own action");
  app.add_option("--deltas", o.deltas, "grid deltas (grid subcommand)")
      ->delimiter(',');
  app.add_option("--omegas", o.omegas, "grid omegas (grid subcommand)")
      ->delimiter(',');
  app.add_option("--config", o.config_path,
                 "JSON config file; flags override its values");

  CLI::App* cmd_run = app.add_subcommand("run", "one cell, full trace");
  CLI::App* cmd_grid = app.add_subcommand("grid", "delta x omega sweep");
  CLI::App* cmd_base = app.add_subcommand("baseline", "mechanism off");
  CLI::App* cmd_cmp =
      app.add_subcommand("compare", "paired mechanism off-vs-on runs");
  for (CLI::App* c : {cmd_run, cmd_grid, cmd_base, cmd_cmp}) c->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (o.aleph != "on" && o.aleph != "off") {
    std::fprintf(stderr, "config error: --aleph must be on or off\n");
    return 2;
  }

  try {

    if (cmd_run->parsed() || cmd_base->parsed()) {
      const bool aleph_on = cmd_base->parsed() ? false : o.aleph == "on";
      ExperimentPlan plan;
      try {
        plan = build_plan(o, aleph_on);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
      }
      const std::vector<EpisodeResult> results = run_plan(plan);
      export_plan(plan, results, out_dir(o), o.format,
                  cmd_base->parsed() ? "baseline.csv" : "trace.csv");
      return 0;
    }

    if (cmd_grid->parsed()) {
      ExperimentPlan plan;
      try {
        plan = build_plan(o, o.aleph == "on");
        plan.deltas = o.deltas.empty()
                          ? std::vector<double>{0.01, 0.05, 0.1, 0.2, 0.3}
                          : o.deltas;
        plan.omegas = o.omegas.empty()
                          ? std::vector<double>{0.01, 0.05, 0.1, 0.2, 0.3}
                          : o.omegas;
        for (double d : plan.deltas)
          if (!(d >= 0.0 && d <= 1.0))
            throw std::invalid_argument("grid delta out of range");
        for (double w : plan.omegas)
          if (!(w >= 0.0 && w < 0.5))
            throw std::invalid_argument("grid omega out of range");
      } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
      }
      const std::vector<EpisodeResult> results = run_plan(plan);
      export_plan(plan, results, out_dir(o), o.format, "grid.csv");
      return 0;
    }

    // compare: identical seeds, mechanism off vs on.
    ExperimentPlan off_plan, on_plan;
    try {
      off_plan = build_plan(o, false);
      on_plan = build_plan(o, true);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    }
    const std::vector<EpisodeResult> off = run_plan(off_plan);
    const std::vector<EpisodeResult> on = run_plan(on_plan);
    const std::string dir = out_dir(o);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error(dir + ": " + ec.message());
    if (o.format == "csv" || o.format == "both") {
      std::ostringstream os_off, os_on;
      write_csv(os_off, off, off_plan.spec.game);
      write_csv(os_on, on, on_plan.spec.game);
      write_file(dir + "/baseline.csv", os_off.str());
      write_file(dir + "/aleph.csv", os_on.str());
    }
    if (o.format == "json" || o.format == "both") {
      nlohmann::json j;
      j["version"] = kEngineVersion;
      j["config"] = config_json(on_plan.spec);
      j["grid"] = {{"deltas", on_plan.deltas},
                   {"omegas", on_plan.omegas},
                   {"seeds", on_plan.seeds}};
      j["baseline"] = cell_aggregates(off_plan, off);
      j["aleph"] = cell_aggregates(on_plan, on);
      double off_a = 0, off_b = 0, on_a = 0, on_b = 0;
      for (const EpisodeResult& r : off) {
        off_a += r.cum_a;
        off_b += r.cum_b;
      }
      for (const EpisodeResult& r : on) {
        on_a += r.cum_a;
        on_b += r.cum_b;
      }
      nlohmann::json paired;
      if (std::abs(off_b) > 1e-12 && std::abs(on_b) > 1e-12) {
        const double r_off = off_a / off_b, r_on = on_a / on_b;
        paired["ratio_off"] = r_off;
        paired["ratio_on"] = r_on;
        paired["ratio_reduction"] =
            std::abs(r_off) > 1e-12 ? 1.0 - r_on / r_off : 0.0;
      } else {
        paired = nullptr;
      }
      j["paired"] = paired;
      write_file(dir + "/compare.json", j.dump(2));
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace tomsim::harness
