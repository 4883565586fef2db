#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "actgrad/critic.hpp"
#include "actgrad/features.hpp"
#include "actgrad/policy.hpp"
#include "actgrad/rng.hpp"
#include "actgrad/sparse.hpp"

namespace actgrad {

enum class AgentKind { kActgrad, kOffpac, kQlambda };

inline std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kActgrad: return "actgrad";
    case AgentKind::kOffpac: return "offpac";
    case AgentKind::kQlambda: return "qlambda";
  }
  throw std::invalid_argument("unknown agent kind");
}

inline AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "actgrad") return AgentKind::kActgrad;
  if (s == "offpac") return AgentKind::kOffpac;
  if (s == "qlambda") return AgentKind::kQlambda;
  throw std::invalid_argument("agent: unknown kind '" + s + "'");
}

struct AgentConfig {
  AgentKind kind = AgentKind::kActgrad;
  double alpha_theta = 0.01;
  double alpha_v = 0.1;
  double alpha_w = 0.01;
  double gamma = 0.99;
  double lambda = 0.8;
  double epsilon_behavior = 0.1;

  void validate() const {
    if (!(alpha_theta > 0.0)) throw std::invalid_argument("agent: alpha_theta must be positive");
    if (!(alpha_v > 0.0)) throw std::invalid_argument("agent: alpha_v must be positive");
    if (!(alpha_w > 0.0)) throw std::invalid_argument("agent: alpha_w must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent: gamma must be in [0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("agent: lambda must be in [0,1]");
    if (!(epsilon_behavior >= 0.0 && epsilon_behavior < 1.0))
      throw std::invalid_argument("agent: epsilon_behavior must be in [0,1)");
  }
};

/// One environment step as seen by the learners.
struct Transition {
  SparseVec state_features;
  int action = 0;
  double reward = 0.0;
  SparseVec next_features;
  bool terminal = false;
  double behavior_prob = 1.0;
};

/**
 * Learner state. Actor-critics use (policy, critic, traces); the Q(lambda)
 * agent uses q_weights and reuses e_theta as its state-action trace. A
 * non-finite update marks the state diverged instead of propagating NaN.
 */
struct AgentState {
  std::uint32_t state_dim = 0;
  int num_actions = 0;
  PolicyParams policy;
  CriticParams critic;
  std::vector<double> q_weights;
  TraceState traces;
  std::uint64_t steps = 0;
  bool diverged = false;

  AgentState(const AgentConfig& config, std::uint32_t state_dim_, int num_actions_)
      : state_dim(state_dim_),
        num_actions(num_actions_),
        traces(state_dim_, state_dim_ * static_cast<std::uint32_t>(num_actions_), config.lambda,
               config.gamma) {
    if (num_actions_ < 2) throw std::invalid_argument("agent: need at least 2 actions");
    const std::size_t sa_dim = static_cast<std::size_t>(state_dim_) * num_actions_;
    policy.theta.assign(sa_dim, 0.0);
    critic.nu.assign(state_dim_, 0.0);
    critic.omega.assign(sa_dim, 0.0);
    q_weights.assign(sa_dim, 0.0);
  }

  void begin_episode() { traces.reset(); }

  bool params_finite() const {
    return all_finite(policy.theta) && all_finite(critic.nu) && all_finite(critic.omega) &&
           all_finite(q_weights) && traces.e_v.finite() && traces.e_theta.finite();
  }
};

inline std::vector<SparseVec> per_action_features(const SparseVec& x_s, int num_actions) {
  std::vector<SparseVec> feats;
  feats.reserve(num_actions);
  for (int a = 0; a < num_actions; ++a)
    feats.push_back(state_action_features(x_s, a, num_actions));
  return feats;
}

namespace detail {

inline int greedy_q_action(std::span<const double> weights, const SparseVec& x_s,
                           int num_actions) {
  int best = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_actions; ++a) {
    const double q = dot(weights, state_action_features(x_s, a, num_actions));
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

inline double max_q(std::span<const double> weights, const SparseVec& x_s, int num_actions) {
  double best_q = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_actions; ++a)
    best_q = std::max(best_q, dot(weights, state_action_features(x_s, a, num_actions)));
  return best_q;
}

}  // namespace detail

enum class Mode { kTrain, kTest };

struct ActResult {
  int action = 0;
  double target_prob = 1.0;
  double behavior_prob = 1.0;
};

/**
 * Action selection. Training draws from the behavior policy (epsilon mixture
 * with the current softmax for the actor-critics, epsilon-greedy for
 * Q(lambda)) and reports both probabilities so phi can be formed. Test mode
 * is the deterministic greedy action, ties toward the lowest index.
 */
inline ActResult act(const AgentState& state, const AgentConfig& config, const SparseVec& x_s,
                     Mode mode, Rng& rng) {
  if (x_s.dim != state.state_dim) throw std::invalid_argument("act: feature dimension mismatch");
  if (config.kind == AgentKind::kQlambda) {
    const int greedy = detail::greedy_q_action(state.q_weights, x_s, state.num_actions);
    if (mode == Mode::kTest) return {greedy, 1.0, 1.0};
    const double eps = config.epsilon_behavior;
    int action = greedy;
    if (rng.next_uniform() < eps)
      action = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(state.num_actions)));
    const double behavior_prob = eps / state.num_actions + (action == greedy ? 1.0 - eps : 0.0);
    return {action, action == greedy ? 1.0 : 0.0, behavior_prob};
  }

  const auto feats = per_action_features(x_s, state.num_actions);
  const ActionDistribution target = action_probabilities(state.policy, feats);
  if (mode == Mode::kTest) {
    const int action = greedy_action(target);
    return {action, target.probs[action], target.probs[action]};
  }
  const BehaviorPolicy bp{BehaviorKind::kEpsilonMixture, config.epsilon_behavior, {}};
  const ActionDistribution behavior = behavior_distribution(bp, target, feats);
  const int action = sample(behavior, rng);
  return {action, target.probs[action], behavior.probs[action]};
}

/**
 * Action-value-gradient actor-critic update. After the value and advantage
 * critics step, the actor ascends
 *   theta <- theta + alpha_theta * phi * psi(s,a) * (psi(s,a)' omega).
 * Per sample phi * psi psi' estimates the Fisher matrix G(theta); at the
 * compatible optimum omega* = G^+ grad~J the expected step is G omega* =
 * grad~J, so the positive sign is the ascent direction on J.
 */
inline void actgrad_update(AgentState& state, const AgentConfig& config, const Transition& t) {
  const auto feats = per_action_features(t.state_features, state.num_actions);
  const ActionDistribution target = action_probabilities(state.policy, feats);
  if (!(t.behavior_prob > 0.0))
    throw std::invalid_argument("actgrad_update: behavior probability must be positive");
  const double phi = target.probs[t.action] / t.behavior_prob;
  const double v_now = state_value(state.critic, t.state_features);
  const double v_next = t.terminal ? 0.0 : state_value(state.critic, t.next_features);
  const double delta = td_error(t.reward, config.gamma, v_next, v_now, t.terminal);
  update_critic(state.critic, state.traces, phi, t.state_features, delta, config.alpha_v);
  const SparseVec psi = score(state.policy, feats, t.action);
  update_omega(state.critic, phi, delta, psi, config.alpha_w);
  const double adv = advantage(state.critic, psi);
  axpy(state.policy.theta, config.alpha_theta * phi * adv, psi);
  if (!std::isfinite(delta) || !std::isfinite(phi) || !std::isfinite(adv) ||
      !std::isfinite(delta * config.alpha_v * state.traces.e_v.max_abs()) ||
      !std::isfinite(config.alpha_theta * phi * adv))
    state.diverged = true;
}

/**
 * Off-policy actor-critic update: shared critic step, then the actor trace
 *   e_theta <- phi * (gamma * lambda * e_theta + psi(s,a))
 *   theta   <- theta + alpha_theta * delta * e_theta.
 */
inline void offpac_update(AgentState& state, const AgentConfig& config, const Transition& t) {
  const auto feats = per_action_features(t.state_features, state.num_actions);
  const ActionDistribution target = action_probabilities(state.policy, feats);
  if (!(t.behavior_prob > 0.0))
    throw std::invalid_argument("offpac_update: behavior probability must be positive");
  const double phi = target.probs[t.action] / t.behavior_prob;
  const double v_now = state_value(state.critic, t.state_features);
  const double v_next = t.terminal ? 0.0 : state_value(state.critic, t.next_features);
  const double delta = td_error(t.reward, config.gamma, v_next, v_now, t.terminal);
  update_critic(state.critic, state.traces, phi, t.state_features, delta, config.alpha_v);
  const SparseVec psi = score(state.policy, feats, t.action);
  state.traces.e_theta.scale(phi * config.gamma * config.lambda);
  state.traces.e_theta.add(psi, phi);
  state.traces.e_theta.axpy_into(state.policy.theta, config.alpha_theta * delta);
  if (!std::isfinite(delta) || !std::isfinite(phi) ||
      !std::isfinite(delta * (config.alpha_v * state.traces.e_v.max_abs() +
                              config.alpha_theta * state.traces.e_theta.max_abs())))
    state.diverged = true;
}

/**
 * Watkins Q(lambda):
 *   delta = r + gamma * max_a' w' x(s',a') - w' x(s,a)
 *   e <- gamma * lambda * e + x(s,a) if a was greedy, else e <- x(s,a)
 *        after zeroing
 *   w <- w + alpha_v * delta * e
 */
inline void qlambda_update(AgentState& state, const AgentConfig& config, const Transition& t) {
  const SparseVec x_sa = state_action_features(t.state_features, t.action, state.num_actions);
  const double q_sa = dot(state.q_weights, x_sa);
  const double q_next =
      t.terminal ? 0.0 : detail::max_q(state.q_weights, t.next_features, state.num_actions);
  const double delta = t.reward + config.gamma * q_next - q_sa;
  const int greedy = detail::greedy_q_action(state.q_weights, t.state_features, state.num_actions);
  if (t.action == greedy)
    state.traces.e_theta.scale(config.gamma * config.lambda);
  else
    state.traces.e_theta.reset();
  state.traces.e_theta.add(x_sa);
  state.traces.e_theta.axpy_into(state.q_weights, config.alpha_v * delta);
  if (!std::isfinite(delta)) state.diverged = true;
}

/// Applies exactly one per-kind update and advances the step counter.
inline void agent_step(AgentState& state, const AgentConfig& config, const Transition& t) {
  if (state.diverged) return;
  if (t.state_features.dim != state.state_dim || t.next_features.dim != state.state_dim)
    throw std::invalid_argument("agent_step: transition feature dimension mismatch");
  if (t.action < 0 || t.action >= state.num_actions)
    throw std::invalid_argument("agent_step: action out of range");
  switch (config.kind) {
    case AgentKind::kActgrad: actgrad_update(state, config, t); break;
    case AgentKind::kOffpac: offpac_update(state, config, t); break;
    case AgentKind::kQlambda: qlambda_update(state, config, t); break;
    default: throw std::invalid_argument("agent_step: unknown agent kind");
  }
  ++state.steps;
}

}  // namespace actgrad
