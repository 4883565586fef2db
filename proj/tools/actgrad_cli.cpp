#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actgrad/harness.hpp"
#include "actgrad/verify.hpp"

namespace {

struct TrainOptions {
  std::string config_path;
  std::string env;
  std::vector<std::string> agents;
  std::optional<int> trials;
  std::optional<int> episodes;
  std::optional<int> test_episodes;
  std::optional<long> train_cap;
  std::optional<long> test_cap;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> ma_window;
  std::optional<double> alpha_theta, alpha_v, alpha_w, gamma, lambda, epsilon;
};

actgrad::ExperimentConfig build_config(const TrainOptions& opt) {
  using namespace actgrad;
  ExperimentConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("config: cannot open file '" + opt.config_path + "'");
    nlohmann::json j;
    in >> j;
    config = experiment_config_from_json(j);
    if (!opt.env.empty() && opt.env != config.env_kind) {
      ExperimentConfig base = default_experiment_config(opt.env);
      base.agents = config.agents;
      base.trials = config.trials;
      base.test_episodes = config.test_episodes;
      base.base_seed = config.base_seed;
      base.output_dir = config.output_dir;
      base.ma_window = config.ma_window;
      config = base;
    }
  } else {
    config = default_experiment_config(opt.env.empty() ? "cartpole" : opt.env);
  }
  if (!opt.agents.empty()) {
    config.agents.clear();
    for (const auto& name : opt.agents) {
      AgentConfig ac;
      ac.kind = agent_kind_from_string(name);
      config.agents.push_back({name, ac});
    }
  }
  if (opt.trials) config.trials = *opt.trials;
  if (opt.episodes) config.episodes = *opt.episodes;
  if (opt.test_episodes) config.test_episodes = *opt.test_episodes;
  if (opt.train_cap) config.train_step_cap = *opt.train_cap;
  if (opt.test_cap) config.test_step_cap = *opt.test_cap;
  if (opt.seed) config.base_seed = *opt.seed;
  if (opt.out) config.output_dir = *opt.out;
  if (opt.ma_window) config.ma_window = *opt.ma_window;
  for (auto& agent : config.agents) {
    if (opt.alpha_theta) agent.config.alpha_theta = *opt.alpha_theta;
    if (opt.alpha_v) agent.config.alpha_v = *opt.alpha_v;
    if (opt.alpha_w) agent.config.alpha_w = *opt.alpha_w;
    if (opt.gamma) agent.config.gamma = *opt.gamma;
    if (opt.lambda) agent.config.lambda = *opt.lambda;
    if (opt.epsilon) agent.config.epsilon_behavior = *opt.epsilon;
  }
  return config;
}

int run_train(const TrainOptions& opt) {
  using namespace actgrad;
  const ExperimentConfig config = build_config(opt);
  config.validate();
  std::printf("env=%s trials=%d episodes=%d test_episodes=%d seed=%llu\n", config.env_kind.c_str(),
              config.trials, config.episodes, config.test_episodes,
              static_cast<unsigned long long>(config.base_seed));
  const ExperimentResult result = run_experiment(config);
  emit_outputs(result, config, config.output_dir);
  for (std::size_t a = 0; a < result.records.size(); ++a) {
    const SummaryStats stats = aggregate(result.records[a]);
    if (stats.test) {
      std::printf("%-10s test mean %.2f +/- %.2f  solved %.1f%%  (n=%ld)\n",
                  result.agent_names[a].c_str(), stats.test->mean, stats.test->std_error,
                  stats.test->solved_pct, stats.test->episodes);
    } else {
      std::printf("%-10s no test episodes\n", result.agent_names[a].c_str());
    }
  }
  std::printf("wrote %s/records.csv, summary.json, curves.svg\n", config.output_dir.c_str());
  return 0;
}

int run_verify(std::uint64_t seed, int lemma_mdps, int decomposition_mdps) {
  using namespace actgrad;
  const auto checks = run_identity_checks(seed, lemma_mdps, decomposition_mdps);
  bool all_pass = true;
  for (const auto& c : checks) {
    std::printf("[%s] %-50s worst %.3e  tol %.0e  (%d cases)\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.worst, c.tolerance, c.cases);
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}

int run_bench(const std::string& env_kind, const std::string& agent_kind, long steps,
              std::uint64_t seed) {
  using namespace actgrad;
  auto env = make_env(env_kind);
  const Encoder encoder(env->default_encoder());
  AgentConfig config;
  config.kind = agent_kind_from_string(agent_kind);
  AgentState agent(config, encoder.dim(), env->num_actions());
  Rng rng(seed);

  long done = 0;
  const auto start = std::chrono::steady_clock::now();
  while (done < steps) {
    std::vector<double> obs = env->reset(rng);
    SparseVec x = encoder.encode(obs);
    agent.begin_episode();
    long in_episode = 0;
    while (done < steps && in_episode < 10000) {
      const ActResult chosen = act(agent, config, x, Mode::kTrain, rng);
      const EnvStep step = env->step(chosen.action);
      SparseVec x_next = encoder.encode(step.observation);
      agent_step(agent, config,
                 {x, chosen.action, step.reward, x_next, step.terminal, chosen.behavior_prob});
      x = std::move(x_next);
      ++done;
      ++in_episode;
      if (step.terminal) break;
    }
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  std::printf("%ld steps in %.3f s -> %.0f steps/s (%s on %s)\n", done, elapsed.count(),
              done / std::max(1e-9, elapsed.count()), agent_kind.c_str(), env_kind.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic off-policy action-value-gradient actor-critic experiments"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "run the multi-trial train/test protocol");
  train->add_option("--config", train_opt.config_path, "JSON experiment config file");
  train->add_option("--env", train_opt.env, "environment: cartpole | lander");
  train->add_option("--agent", train_opt.agents, "agent kind (repeatable): actgrad | offpac | qlambda");
  train->add_option("--trials", train_opt.trials, "independent trials");
  train->add_option("--episodes", train_opt.episodes, "training episodes per trial");
  train->add_option("--test-episodes", train_opt.test_episodes, "greedy test episodes per trial");
  train->add_option("--train-cap", train_opt.train_cap, "step cap per training episode");
  train->add_option("--test-cap", train_opt.test_cap, "step cap per test episode (0: train cap)");
  train->add_option("--seed", train_opt.seed, "base seed; trial i uses seed+i");
  train->add_option("--out", train_opt.out, "output directory");
  train->add_option("--ma-window", train_opt.ma_window, "moving-average window for curves.svg");
  train->add_option("--alpha-theta", train_opt.alpha_theta, "actor step size");
  train->add_option("--alpha-v", train_opt.alpha_v, "value critic step size");
  train->add_option("--alpha-w", train_opt.alpha_w, "advantage critic step size");
  train->add_option("--gamma", train_opt.gamma, "discount factor");
  train->add_option("--lambda", train_opt.lambda, "trace decay");
  train->add_option("--epsilon", train_opt.epsilon, "behavior exploration epsilon");

  std::uint64_t verify_seed = 12345;
  int lemma_mdps = 120;
  int decomposition_mdps = 60;
  auto* verify = app.add_subcommand("verify", "run the exact-DP identity suite");
  verify->add_option("--seed", verify_seed, "seed for the random MDP suite");
  verify->add_option("--mdps", lemma_mdps, "random MDPs for the lemma check");
  verify->add_option("--decomp", decomposition_mdps, "random MDPs for the decomposition check");

  std::string bench_env = "cartpole";
  std::string bench_agent = "actgrad";
  long bench_steps = 200000;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "agent+env steps-per-second microbenchmark");
  bench->add_option("--env", bench_env, "environment");
  bench->add_option("--agent", bench_agent, "agent kind");
  bench->add_option("--steps", bench_steps, "training steps to time");
  bench->add_option("--seed", bench_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(train_opt);
    if (*verify) return run_verify(verify_seed, lemma_mdps, decomposition_mdps);
    if (*bench) return run_bench(bench_env, bench_agent, bench_steps, bench_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
