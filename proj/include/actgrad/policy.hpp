#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "actgrad/rng.hpp"
#include "actgrad/sparse.hpp"

namespace actgrad {

/// Actor parameters theta over state-action features.
struct PolicyParams {
  std::vector<double> theta;
};

/// Probabilities of a discrete action distribution; softmax output is
/// strictly positive and sums to 1 up to rounding.
struct ActionDistribution {
  std::vector<double> probs;

  int num_actions() const { return static_cast<int>(probs.size()); }
};

enum class BehaviorKind { kEpsilonMixture, kUniform, kFixedSoftmax };

/**
 * Behavior policy b generating training actions. The epsilon mixture keeps
 * every action probability >= epsilon/|A|, so importance ratios stay bounded
 * by 1/(1-epsilon).
 */
struct BehaviorPolicy {
  BehaviorKind kind = BehaviorKind::kEpsilonMixture;
  double epsilon = 0.1;
  PolicyParams frozen;  // kFixedSoftmax only
};

/**
 * Softmax over linear preferences theta' x(s,a), shifted by the max
 * preference so large preferences cannot overflow exp.
 */
inline ActionDistribution action_probabilities(const PolicyParams& params,
                                               const std::vector<SparseVec>& per_action_features) {
  const std::size_t num_actions = per_action_features.size();
  if (num_actions < 2)
    throw std::invalid_argument("action_probabilities: need at least 2 actions");
  std::vector<double> prefs(num_actions);
  for (std::size_t a = 0; a < num_actions; ++a) {
    if (per_action_features[a].dim != params.theta.size())
      throw std::invalid_argument("action_probabilities: feature/parameter dimension mismatch");
    prefs[a] = dot(params.theta, per_action_features[a]);
    if (!std::isfinite(prefs[a]))
      throw std::runtime_error("action_probabilities: non-finite preference");
  }
  const double shift = *std::max_element(prefs.begin(), prefs.end());
  double z = 0.0;
  ActionDistribution dist;
  dist.probs.resize(num_actions);
  for (std::size_t a = 0; a < num_actions; ++a) {
    dist.probs[a] = std::exp(prefs[a] - shift);
    z += dist.probs[a];
  }
  for (double& p : dist.probs) p /= z;
  return dist;
}

/**
 * Score (compatible feature) vector psi(s,a) = x(s,a) - sum_b pi(b|s) x(s,b),
 * i.e. the gradient of log pi at the current parameters. Policy-weighted
 * scores sum to the zero vector.
 */
inline SparseVec score(const PolicyParams& params,
                       const std::vector<SparseVec>& per_action_features, int action) {
  const ActionDistribution dist = action_probabilities(params, per_action_features);
  if (action < 0 || action >= dist.num_actions())
    throw std::invalid_argument("score: action out of range");
  std::vector<std::pair<std::uint32_t, double>> terms;
  for (int b = 0; b < dist.num_actions(); ++b) {
    const double coeff = (b == action ? 1.0 : 0.0) - dist.probs[b];
    if (coeff == 0.0) continue;
    for (const auto& [idx, val] : per_action_features[b].entries)
      terms.emplace_back(idx, coeff * val);
  }
  return make_sparse(per_action_features[action].dim, std::move(terms));
}

/// Greedy action with ties broken toward the lowest index.
inline int greedy_action(const ActionDistribution& dist) {
  return static_cast<int>(std::max_element(dist.probs.begin(), dist.probs.end()) -
                          dist.probs.begin());
}

/// Inverse-CDF draw; consumes exactly one uniform from the stream.
inline int sample(const ActionDistribution& dist, Rng& rng) {
  const double u = rng.next_uniform();
  double cum = 0.0;
  for (std::size_t a = 0; a + 1 < dist.probs.size(); ++a) {
    cum += dist.probs[a];
    if (u < cum) return static_cast<int>(a);
  }
  return static_cast<int>(dist.probs.size()) - 1;
}

/// Importance sampling ratio pi(a|s)/b(a|s).
inline double importance_ratio(const ActionDistribution& target,
                               const ActionDistribution& behavior, int action) {
  if (action < 0 || action >= target.num_actions() || action >= behavior.num_actions())
    throw std::invalid_argument("importance_ratio: action out of range");
  const double b = behavior.probs[action];
  if (b <= 0.0)
    throw std::invalid_argument("importance_ratio: zero behavior probability");
  return target.probs[action] / b;
}

inline ActionDistribution behavior_distribution(const BehaviorPolicy& behavior,
                                                const ActionDistribution& target,
                                                const std::vector<SparseVec>& per_action_features) {
  const int num_actions = target.num_actions();
  ActionDistribution dist;
  switch (behavior.kind) {
    case BehaviorKind::kEpsilonMixture: {
      dist.probs.resize(num_actions);
      const double eps = behavior.epsilon;
      for (int a = 0; a < num_actions; ++a)
        dist.probs[a] = (1.0 - eps) * target.probs[a] + eps / num_actions;
      break;
    }
    case BehaviorKind::kUniform:
      dist.probs.assign(num_actions, 1.0 / num_actions);
      break;
    case BehaviorKind::kFixedSoftmax:
      dist = action_probabilities(behavior.frozen, per_action_features);
      break;
  }
  return dist;
}

}  // namespace actgrad
