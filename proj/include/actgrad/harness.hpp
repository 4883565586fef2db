#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "actgrad/agents.hpp"
#include "actgrad/envs.hpp"
#include "actgrad/features.hpp"
#include "actgrad/rng.hpp"

namespace actgrad {

enum class Phase { kTrain, kTest };

inline std::string to_string(Phase p) { return p == Phase::kTrain ? "train" : "test"; }

inline Phase phase_from_string(const std::string& s) {
  if (s == "train") return Phase::kTrain;
  if (s == "test") return Phase::kTest;
  throw std::invalid_argument("records: unknown phase '" + s + "'");
}

/// One episode's outcome. `ret` stays finite unless the trial diverged.
struct RunRecord {
  int trial = 0;
  int episode = 0;
  Phase phase = Phase::kTrain;
  double ret = 0.0;
  long steps = 0;
  bool solved = false;
  bool diverged = false;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct AgentSetup {
  std::string name;
  AgentConfig config;
};

struct ExperimentConfig {
  std::string env_kind = "cartpole";
  std::vector<AgentSetup> agents;
  int episodes = 1500;
  long train_step_cap = 250;
  long test_step_cap = 0;  // 0 means: use the train cap
  int trials = 10;
  int test_episodes = 100;
  std::uint64_t base_seed = 0;
  std::string output_dir = "runs";
  std::optional<EncoderConfig> encoder;
  int ma_window = 50;

  long resolved_test_cap() const { return test_step_cap > 0 ? test_step_cap : train_step_cap; }

  void validate() const {
    if (env_kind != "cartpole" && env_kind != "lander")
      throw std::invalid_argument("config: env must be 'cartpole' or 'lander'");
    if (agents.empty()) throw std::invalid_argument("config: agents must not be empty");
    if (episodes < 0) throw std::invalid_argument("config: episodes must be non-negative");
    if (trials <= 0) throw std::invalid_argument("config: trials must be positive");
    if (train_step_cap <= 0) throw std::invalid_argument("config: train_step_cap must be positive");
    if (test_step_cap < 0) throw std::invalid_argument("config: test_step_cap must be non-negative");
    if (test_episodes < 0) throw std::invalid_argument("config: test_episodes must be non-negative");
    if (ma_window <= 0) throw std::invalid_argument("config: ma_window must be positive");
    for (const auto& a : agents) a.config.validate();
  }
};

/// Protocol defaults per environment: 1500 episodes / cap 250 on cartpole,
/// 700 episodes / cap 500 on the lander; 10 trials, 100 test episodes.
inline ExperimentConfig default_experiment_config(const std::string& env_kind) {
  ExperimentConfig c;
  c.env_kind = env_kind;
  if (env_kind == "lander") {
    c.episodes = 700;
    c.train_step_cap = 500;
  }
  for (AgentKind kind : {AgentKind::kActgrad, AgentKind::kOffpac, AgentKind::kQlambda}) {
    AgentConfig ac;
    ac.kind = kind;
    c.agents.push_back({to_string(kind), ac});
  }
  return c;
}

inline void to_json(nlohmann::json& j, const AgentConfig& c) {
  j = nlohmann::json{{"kind", to_string(c.kind)},
                     {"alpha_theta", c.alpha_theta},
                     {"alpha_v", c.alpha_v},
                     {"alpha_w", c.alpha_w},
                     {"gamma", c.gamma},
                     {"lambda", c.lambda},
                     {"epsilon_behavior", c.epsilon_behavior}};
}

inline void from_json(const nlohmann::json& j, AgentConfig& c) {
  c = AgentConfig{};
  c.kind = agent_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("alpha_theta")) j.at("alpha_theta").get_to(c.alpha_theta);
  if (j.contains("alpha_v")) j.at("alpha_v").get_to(c.alpha_v);
  if (j.contains("alpha_w")) j.at("alpha_w").get_to(c.alpha_w);
  if (j.contains("gamma")) j.at("gamma").get_to(c.gamma);
  if (j.contains("lambda")) j.at("lambda").get_to(c.lambda);
  if (j.contains("epsilon_behavior")) j.at("epsilon_behavior").get_to(c.epsilon_behavior);
}

/// Parses an experiment config; unknown/missing fields fall back to the
/// per-environment protocol defaults. Agent entries are either a kind string
/// or an object with "kind" plus hyperparameter overrides.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  const std::string env = j.value("env", std::string("cartpole"));
  ExperimentConfig c = default_experiment_config(env);
  if (j.contains("agents")) {
    c.agents.clear();
    for (const auto& entry : j.at("agents")) {
      AgentSetup setup;
      if (entry.is_string()) {
        setup.config.kind = agent_kind_from_string(entry.get<std::string>());
        setup.name = entry.get<std::string>();
      } else {
        entry.get_to(setup.config);
        setup.name = entry.value("name", to_string(setup.config.kind));
      }
      c.agents.push_back(std::move(setup));
    }
  }
  if (j.contains("episodes")) j.at("episodes").get_to(c.episodes);
  if (j.contains("train_step_cap")) j.at("train_step_cap").get_to(c.train_step_cap);
  if (j.contains("test_step_cap")) j.at("test_step_cap").get_to(c.test_step_cap);
  if (j.contains("trials")) j.at("trials").get_to(c.trials);
  if (j.contains("test_episodes")) j.at("test_episodes").get_to(c.test_episodes);
  if (j.contains("seed")) j.at("seed").get_to(c.base_seed);
  if (j.contains("output_dir")) j.at("output_dir").get_to(c.output_dir);
  if (j.contains("ma_window")) j.at("ma_window").get_to(c.ma_window);
  if (j.contains("encoder")) c.encoder = j.at("encoder").get<EncoderConfig>();
  return c;
}

namespace detail {

struct EpisodeOutcome {
  double ret = 0.0;
  long steps = 0;
  bool solved = false;
  bool diverged = false;
};

/// Runs one episode; learning happens only in train mode. A non-finite
/// update surfaces as diverged, never as a thrown NaN.
inline EpisodeOutcome run_episode(Env& env, const Encoder& encoder, AgentState& agent,
                                  const AgentConfig& config, Mode mode, long step_cap, Rng& rng) {
  EpisodeOutcome out;
  try {
    std::vector<double> obs = env.reset(rng);
    SparseVec x = encoder.encode(obs);
    agent.begin_episode();
    while (out.steps < step_cap) {
      const ActResult chosen = act(agent, config, x, mode, rng);
      const EnvStep step = env.step(chosen.action);
      SparseVec x_next = encoder.encode(step.observation);
      out.ret += step.reward;
      ++out.steps;
      if (mode == Mode::kTrain) {
        const Transition t{x, chosen.action, step.reward, x_next, step.terminal,
                           chosen.behavior_prob};
        agent_step(agent, config, t);
        if (agent.diverged) break;
      }
      x = std::move(x_next);
      if (step.terminal) break;
    }
    if (mode == Mode::kTrain && !agent.params_finite()) agent.diverged = true;
  } catch (const std::runtime_error&) {
    agent.diverged = true;
  }
  out.diverged = agent.diverged;
  out.solved = !out.diverged && env.episode_solved(out.steps, step_cap);
  return out;
}

}  // namespace detail

/**
 * One trial of the protocol: `episodes` training episodes with the behavior
 * policy active, then `test_episodes` greedy episodes with learning frozen.
 * The trial's random stream is seeded with base_seed + trial_index only, so
 * trials are reproducible independent of scheduling. Divergence marks the
 * remaining episodes and the trial keeps emitting records.
 */
inline std::vector<RunRecord> run_trial(const ExperimentConfig& config,
                                        const AgentConfig& agent_config, int trial_index) {
  Rng rng(config.base_seed + static_cast<std::uint64_t>(trial_index));
  auto env = make_env(config.env_kind);
  const Encoder encoder(config.encoder ? *config.encoder : env->default_encoder());
  AgentState agent(agent_config, encoder.dim(), env->num_actions());

  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(config.episodes) + config.test_episodes);
  for (int ep = 0; ep < config.episodes; ++ep) {
    if (agent.diverged) {
      records.push_back({trial_index, ep, Phase::kTrain, 0.0, 0, false, true});
      continue;
    }
    const auto out = detail::run_episode(*env, encoder, agent, agent_config, Mode::kTrain,
                                         config.train_step_cap, rng);
    records.push_back({trial_index, ep, Phase::kTrain, out.ret, out.steps, out.solved, out.diverged});
  }
  for (int ep = 0; ep < config.test_episodes; ++ep) {
    if (agent.diverged) {
      records.push_back({trial_index, ep, Phase::kTest, 0.0, 0, false, true});
      continue;
    }
    const auto out = detail::run_episode(*env, encoder, agent, agent_config, Mode::kTest,
                                         config.resolved_test_cap(), rng);
    records.push_back({trial_index, ep, Phase::kTest, out.ret, out.steps, out.solved, out.diverged});
  }
  return records;
}

struct ExperimentResult {
  std::vector<std::string> agent_names;
  std::vector<std::vector<RunRecord>> records;  // per agent, sorted
};

inline unsigned worker_count(std::size_t tasks) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("ACTGRAD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) workers = static_cast<unsigned>(std::min<long>(v, 4096));
  }
  if (tasks == 0) return 1;
  return static_cast<unsigned>(std::min<std::size_t>(workers, tasks));
}

/**
 * Runs every (agent, trial) pair, possibly concurrently. Each task derives
 * its randomness from (base_seed, trial_index) alone and records are merged
 * in a fixed order, so the result is identical at any worker count.
 */
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t num_agents = config.agents.size();
  const std::size_t tasks = num_agents * static_cast<std::size_t>(config.trials);
  std::vector<std::vector<std::vector<RunRecord>>> slots(
      num_agents, std::vector<std::vector<RunRecord>>(config.trials));

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        const std::size_t agent_idx = i / config.trials;
        const int trial = static_cast<int>(i % config.trials);
        slots[agent_idx][trial] = run_trial(config, config.agents[agent_idx].config, trial);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const unsigned workers = worker_count(tasks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  ExperimentResult result;
  for (std::size_t a = 0; a < num_agents; ++a) {
    result.agent_names.push_back(config.agents[a].name);
    std::vector<RunRecord> merged;
    for (int t = 0; t < config.trials; ++t)
      merged.insert(merged.end(), slots[a][t].begin(), slots[a][t].end());
    std::sort(merged.begin(), merged.end(), [](const RunRecord& x, const RunRecord& y) {
      if (x.trial != y.trial) return x.trial < y.trial;
      if (x.phase != y.phase) return x.phase == Phase::kTrain;
      return x.episode < y.episode;
    });
    result.records.push_back(std::move(merged));
  }
  return result;
}

struct TestSummary {
  double mean = 0.0;
  double std_error = 0.0;
  double solved_pct = 0.0;
  long episodes = 0;
};

struct SummaryStats {
  std::optional<TestSummary> test;
  std::vector<double> train_curve;  // per-episode mean return across trials
};

/**
 * Pools test episodes across trials into mean / standard error / solved
 * percentage and averages training returns per episode index (the learning
 * curve). Order-independent over the input records.
 */
inline SummaryStats aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  SummaryStats stats;
  double sum = 0.0, sum_sq = 0.0;
  long n = 0, solved = 0;
  std::vector<double> episode_sum;
  std::vector<long> episode_count;
  for (const auto& r : records) {
    if (r.phase == Phase::kTest) {
      sum += r.ret;
      sum_sq += r.ret * r.ret;
      solved += r.solved ? 1 : 0;
      ++n;
    } else {
      if (episode_sum.size() <= static_cast<std::size_t>(r.episode)) {
        episode_sum.resize(r.episode + 1, 0.0);
        episode_count.resize(r.episode + 1, 0);
      }
      episode_sum[r.episode] += r.ret;
      episode_count[r.episode] += 1;
    }
  }
  if (n > 0) {
    TestSummary t;
    t.episodes = n;
    t.mean = sum / n;
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - n * t.mean * t.mean) / (n - 1));
      t.std_error = std::sqrt(var / n);
    }
    t.solved_pct = 100.0 * static_cast<double>(solved) / static_cast<double>(n);
    stats.test = t;
  }
  stats.train_curve.resize(episode_sum.size());
  for (std::size_t i = 0; i < episode_sum.size(); ++i)
    stats.train_curve[i] = episode_count[i] > 0 ? episode_sum[i] / episode_count[i] : 0.0;
  return stats;
}

/// Per-trial mean test returns, keyed by trial id (for variance reports).
inline std::vector<double> per_trial_test_means(const std::vector<RunRecord>& records) {
  std::vector<double> sums;
  std::vector<long> counts;
  for (const auto& r : records) {
    if (r.phase != Phase::kTest) continue;
    if (sums.size() <= static_cast<std::size_t>(r.trial)) {
      sums.resize(r.trial + 1, 0.0);
      counts.resize(r.trial + 1, 0);
    }
    sums[r.trial] += r.ret;
    counts[r.trial] += 1;
  }
  std::vector<double> means;
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (counts[i] > 0) means.push_back(sums[i] / counts[i]);
  return means;
}

inline double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

namespace detail {

inline std::string format_double(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

/// CSV schema: trial,episode,phase,return,steps,solved,diverged with returns
/// at 6 decimal places and LF line endings (bit-exact golden files).
inline std::string format_records_csv(const std::vector<RunRecord>& records) {
  std::string out = "trial,episode,phase,return,steps,solved,diverged\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.episode);
    out += ',';
    out += to_string(r.phase);
    out += ',';
    out += detail::format_double(r.ret, 6);
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += r.solved ? '1' : '0';
    out += ',';
    out += r.diverged ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::vector<RunRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "trial,episode,phase,return,steps,solved,diverged")
    throw std::invalid_argument("records: bad or missing CSV header");
  std::vector<RunRecord> records;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 7)
      throw std::invalid_argument("records: line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected 7");
    RunRecord r;
    r.trial = std::stoi(fields[0]);
    r.episode = std::stoi(fields[1]);
    r.phase = phase_from_string(fields[2]);
    r.ret = std::stod(fields[3]);
    r.steps = std::stol(fields[4]);
    r.solved = fields[5] == "1";
    r.diverged = fields[6] == "1";
    records.push_back(r);
  }
  return records;
}

/// Trailing moving average with the window clamped at the front.
inline std::vector<double> moving_average(const std::vector<double>& xs, int window) {
  std::vector<double> out(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += xs[i];
    if (i >= static_cast<std::size_t>(window)) acc -= xs[i - window];
    out[i] = acc / static_cast<double>(std::min<std::size_t>(i + 1, window));
  }
  return out;
}

/**
 * Self-contained SVG with one faint raw polyline and one solid
 * moving-average polyline per agent, labeled axes and a legend.
 */
inline std::string render_curves_svg(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& curves,
                                     int ma_window) {
  constexpr int kWidth = 860, kHeight = 520;
  constexpr int kLeft = 70, kRight = 24, kTop = 24, kBottom = 56;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;

  std::size_t max_len = 0;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& c : curves) {
    max_len = std::max(max_len, c.size());
    for (double v : c) {
      if (!any) {
        lo = hi = v;
        any = true;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!any) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double x_max = max_len > 1 ? static_cast<double>(max_len - 1) : 1.0;

  auto px = [&](double episode) { return kLeft + episode / x_max * plot_w; };
  auto py = [&](double value) { return kTop + (hi - value) / (hi - lo) * plot_h; };
  auto fmt = [](double v) { return detail::format_double(v, 2); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
         " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes and ticks
  svg += "<g stroke=\"#333\" stroke-width=\"1\">";
  svg += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop + plot_h) +
         "\" x2=\"" + std::to_string(kLeft + plot_w) + "\" y2=\"" + std::to_string(kTop + plot_h) +
         "\"/>";
  svg += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop) + "\" x2=\"" +
         std::to_string(kLeft) + "\" y2=\"" + std::to_string(kTop + plot_h) + "\"/>";
  svg += "</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double e = x_max * i / 4.0;
    const double v = lo + (hi - lo) * i / 4.0;
    svg += "<text x=\"" + fmt(px(e)) + "\" y=\"" + std::to_string(kTop + plot_h + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">" + fmt(e) + "</text>\n";
    svg += "<text x=\"" + std::to_string(kLeft - 6) + "\" y=\"" + fmt(py(v) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">" + fmt(v) + "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(kLeft + plot_w / 2) + "\" y=\"" +
         std::to_string(kHeight - 14) +
         "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111\">episode</text>\n";
  svg += "<text x=\"16\" y=\"" + std::to_string(kTop + plot_h / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111\" transform=\"rotate(-90 16 " +
         std::to_string(kTop + plot_h / 2) +
         ")\">mean training return</text>\n";

  auto polyline = [&](const std::vector<double>& ys, const char* color, const char* extra) {
    std::string pts;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      pts += fmt(px(static_cast<double>(i)));
      pts += ',';
      pts += fmt(py(ys[i]));
      pts += ' ';
    }
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" " + extra +
           " points=\"" + pts + "\"/>\n";
  };

  for (std::size_t a = 0; a < curves.size(); ++a) {
    if (curves[a].empty()) continue;
    const char* color = kPalette[a % std::size(kPalette)];
    svg += polyline(curves[a], color, "stroke-width=\"1\" opacity=\"0.3\"");
    svg += polyline(moving_average(curves[a], ma_window), color, "stroke-width=\"2\"");
  }

  // legend
  for (std::size_t a = 0; a < names.size(); ++a) {
    const char* color = kPalette[a % std::size(kPalette)];
    const int y = kTop + 16 + static_cast<int>(a) * 18;
    svg += "<line x1=\"" + std::to_string(kLeft + plot_w - 170) + "\" y1=\"" + std::to_string(y) +
           "\" x2=\"" + std::to_string(kLeft + plot_w - 140) + "\" y2=\"" + std::to_string(y) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + std::to_string(kLeft + plot_w - 132) + "\" y=\"" + std::to_string(y + 4) +
           "\" font-size=\"12\" fill=\"#111\">" + names[a] + " (ma" + std::to_string(ma_window) +
           ")</text>\n";
  }
  svg += "<text x=\"" + std::to_string(kLeft + 8) + "\" y=\"" + std::to_string(kTop + 14) +
         "\" font-size=\"11\" fill=\"#666\">faint: per-episode mean, solid: moving average</text>\n";
  svg += "</svg>\n";
  return svg;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/**
 * Writes records.csv, summary.json and curves.svg into the output directory.
 * Multiple agents share records.csv in agent-config order; summary.json maps
 * each agent name to its pooled test statistics.
 */
inline void emit_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir.string());

  std::vector<RunRecord> flat;
  for (const auto& recs : result.records) flat.insert(flat.end(), recs.begin(), recs.end());
  write_file(dir / "records.csv", format_records_csv(flat));

  nlohmann::ordered_json summary;
  summary["env"] = config.env_kind;
  summary["trials"] = config.trials;
  summary["episodes"] = config.episodes;
  summary["agents"] = nlohmann::ordered_json::object();
  std::vector<std::vector<double>> curves;
  for (std::size_t a = 0; a < result.records.size(); ++a) {
    const SummaryStats stats = aggregate(result.records[a]);
    nlohmann::ordered_json entry = nlohmann::ordered_json::object();
    if (stats.test) {
      entry["test"] = {{"mean", stats.test->mean},
                       {"stderr", stats.test->std_error},
                       {"solved_pct", stats.test->solved_pct}};
      entry["trial_variance"] = sample_variance(per_trial_test_means(result.records[a]));
    }
    long diverged = 0;
    for (const auto& r : result.records[a]) diverged += r.diverged ? 1 : 0;
    entry["diverged_episodes"] = diverged;
    summary["agents"][result.agent_names[a]] = std::move(entry);
    curves.push_back(stats.train_curve);
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  write_file(dir / "curves.svg", render_curves_svg(result.agent_names, curves, config.ma_window));
}

}  // namespace actgrad
