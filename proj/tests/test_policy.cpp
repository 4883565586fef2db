#include <gtest/gtest.h>

#include <cmath>

#include "actgrad/features.hpp"
#include "actgrad/policy.hpp"
#include "actgrad/rng.hpp"
#include "actgrad/verify.hpp"

using namespace actgrad;

namespace {

// Tabular layout: one state, x(s,a) = onehot(a), so preferences == theta.
std::vector<SparseVec> tabular_feats(int num_actions) {
  std::vector<SparseVec> feats;
  for (int a = 0; a < num_actions; ++a)
    feats.push_back(SparseVec::one_hot(static_cast<std::uint32_t>(a), num_actions));
  return feats;
}

}  // namespace

TEST(Softmax, zero_theta_is_uniform) {
  for (int num_actions : {2, 5}) {
    PolicyParams params{std::vector<double>(num_actions, 0.0)};
    const ActionDistribution dist = action_probabilities(params, tabular_feats(num_actions));
    for (double p : dist.probs) EXPECT_NEAR(p, 1.0 / num_actions, 1e-15);
  }
}

TEST(Softmax, analytic_two_action_case) {
  PolicyParams params{{std::log(3.0), 0.0}};
  const ActionDistribution dist = action_probabilities(params, tabular_feats(2));
  EXPECT_NEAR(dist.probs[0], 0.75, 1e-12);
  EXPECT_NEAR(dist.probs[1], 0.25, 1e-12);
}

TEST(Softmax, large_preferences_do_not_overflow) {
  PolicyParams params{{1000.0, 0.0}};
  const ActionDistribution dist = action_probabilities(params, tabular_feats(2));
  EXPECT_TRUE(std::isfinite(dist.probs[0]));
  EXPECT_TRUE(std::isfinite(dist.probs[1]));
  EXPECT_NEAR(dist.probs[0], 1.0, 1e-12);
  EXPECT_NEAR(dist.probs[0] + dist.probs[1], 1.0, 1e-12);
}

TEST(Softmax, invariant_to_constant_preference_shift) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const int num_actions = 2 + static_cast<int>(rng.next_below(4));
    PolicyParams params{random_theta(rng, num_actions, 3.0)};
    PolicyParams shifted = params;
    const double c = rng.uniform(-50.0, 50.0);
    for (double& t : shifted.theta) t += c;
    const auto a = action_probabilities(params, tabular_feats(num_actions));
    const auto b = action_probabilities(shifted, tabular_feats(num_actions));
    for (int k = 0; k < num_actions; ++k) EXPECT_NEAR(a.probs[k], b.probs[k], 1e-12);
  }
}

TEST(Softmax, rejects_dimension_mismatch_and_single_action) {
  PolicyParams params{{0.0, 0.0, 0.0}};
  EXPECT_THROW(action_probabilities(params, tabular_feats(2)), std::invalid_argument);
  PolicyParams one{{0.0}};
  EXPECT_THROW(action_probabilities(one, tabular_feats(1)), std::invalid_argument);
}

TEST(Score, uniform_policy_example) {
  PolicyParams params{{0.0, 0.0}};
  const SparseVec psi = score(params, tabular_feats(2), 0);
  std::vector<double> dense(2, 0.0);
  axpy(dense, 1.0, psi);
  EXPECT_NEAR(dense[0], 0.5, 1e-15);
  EXPECT_NEAR(dense[1], -0.5, 1e-15);
}

TEST(Score, zero_mean_property) {
  const CheckResult r = check_zero_mean(17, 500);
  EXPECT_TRUE(r.pass) << r.name << " worst " << r.worst;
}

TEST(Score, matches_finite_differences_of_log_pi) {
  const CheckResult r = check_score_finite_differences(19, 30);
  EXPECT_TRUE(r.pass) << r.name << " worst " << r.worst;
}

TEST(Sample, deterministic_under_fixed_seed) {
  const ActionDistribution dist{{0.5, 0.5}};
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(dist, a), sample(dist, b));
}

TEST(Sample, near_degenerate_distribution) {
  const ActionDistribution dist{{1.0 - 1e-15, 1e-15}};
  for (std::uint64_t seed : {1u, 2u, 3u, 42u, 99u}) {
    Rng rng(seed);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample(dist, rng), 0);
  }
}

TEST(Sample, monte_carlo_frequencies) {
  const ActionDistribution dist{{0.75, 0.25}};
  Rng rng(7);
  long counts[2] = {0, 0};
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) counts[sample(dist, rng)]++;
  EXPECT_NEAR(static_cast<double>(counts[0]) / draws, 0.75, 0.002);
  EXPECT_NEAR(static_cast<double>(counts[1]) / draws, 0.25, 0.002);
}

TEST(ImportanceRatio, basic_cases) {
  const ActionDistribution target{{0.75, 0.25}};
  const ActionDistribution behavior{{0.5, 0.5}};
  EXPECT_DOUBLE_EQ(importance_ratio(target, target, 0), 1.0);
  EXPECT_DOUBLE_EQ(importance_ratio(target, behavior, 0), 1.5);
  const ActionDistribution zero{{1.0, 0.0}};
  EXPECT_THROW(importance_ratio(target, zero, 1), std::invalid_argument);
}

TEST(ImportanceRatio, product_with_behavior_recovers_target) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const int num_actions = 2 + static_cast<int>(rng.next_below(3));
    PolicyParams params{random_theta(rng, num_actions, 2.0)};
    const auto target = action_probabilities(params, tabular_feats(num_actions));
    const BehaviorPolicy bp{BehaviorKind::kEpsilonMixture, 0.1, {}};
    const auto behavior = behavior_distribution(bp, target, tabular_feats(num_actions));
    const int a = static_cast<int>(rng.next_below(num_actions));
    EXPECT_NEAR(importance_ratio(target, behavior, a) * behavior.probs[a], target.probs[a], 1e-15);
  }
}

// phi for the argmax action under the eps-mixture is bounded by
// 1/(1 - eps + eps/|A|); with eps = 0.1, |A| = 2 that is ~1.0526.
TEST(ImportanceRatio, epsilon_mixture_bound) {
  Rng rng(29);
  const double eps = 0.1;
  const double bound = 1.0 / (1.0 - eps + eps / 2.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    PolicyParams params{random_theta(rng, 2, 5.0)};
    const auto target = action_probabilities(params, tabular_feats(2));
    const BehaviorPolicy bp{BehaviorKind::kEpsilonMixture, eps, {}};
    const auto behavior = behavior_distribution(bp, target, tabular_feats(2));
    const int argmax = greedy_action(target);
    worst = std::max(worst, importance_ratio(target, behavior, argmax));
  }
  EXPECT_LE(worst, bound + 1e-12);
  EXPECT_NEAR(bound, 1.0526315789473684, 1e-12);
}

TEST(BehaviorDistribution, mixture_cases) {
  const ActionDistribution target{{0.9, 0.1}};
  const auto feats = tabular_feats(2);

  const BehaviorPolicy none{BehaviorKind::kEpsilonMixture, 0.0, {}};
  const auto unchanged = behavior_distribution(none, target, feats);
  EXPECT_DOUBLE_EQ(unchanged.probs[0], 0.9);
  EXPECT_DOUBLE_EQ(unchanged.probs[1], 0.1);

  const BehaviorPolicy full{BehaviorKind::kEpsilonMixture, 1.0, {}};
  const auto uniform = behavior_distribution(full, target, feats);
  EXPECT_DOUBLE_EQ(uniform.probs[0], 0.5);

  const BehaviorPolicy tenth{BehaviorKind::kEpsilonMixture, 0.1, {}};
  const auto mixed = behavior_distribution(tenth, target, feats);
  EXPECT_NEAR(mixed.probs[0], 0.86, 1e-15);
  EXPECT_NEAR(mixed.probs[1], 0.14, 1e-15);

  const BehaviorPolicy flat{BehaviorKind::kUniform, 0.0, {}};
  const auto u2 = behavior_distribution(flat, target, feats);
  EXPECT_DOUBLE_EQ(u2.probs[0], 0.5);

  BehaviorPolicy fixed{BehaviorKind::kFixedSoftmax, 0.0, {{std::log(3.0), 0.0}}};
  const auto frozen = behavior_distribution(fixed, target, feats);
  EXPECT_NEAR(frozen.probs[0], 0.75, 1e-12);
}

TEST(GreedyAction, ties_break_toward_lowest_index) {
  EXPECT_EQ(greedy_action(ActionDistribution{{0.25, 0.25, 0.25, 0.25}}), 0);
  EXPECT_EQ(greedy_action(ActionDistribution{{0.2, 0.4, 0.4}}), 1);
}
