#include <gtest/gtest.h>

#include <cmath>

#include "actgrad/critic.hpp"
#include "actgrad/features.hpp"
#include "actgrad/fixtures.hpp"
#include "actgrad/mdp_oracle.hpp"
#include "actgrad/policy.hpp"
#include "actgrad/rng.hpp"

using namespace actgrad;

namespace {

std::vector<SparseVec> tabular_sa_feats(int s, int num_states, int num_actions) {
  std::vector<SparseVec> feats;
  const SparseVec x = SparseVec::one_hot(static_cast<std::uint32_t>(s), num_states);
  for (int a = 0; a < num_actions; ++a)
    feats.push_back(state_action_features(x, a, num_actions));
  return feats;
}

int sample_index(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = rng.next_uniform();
  double cum = 0.0;
  for (Eigen::Index i = 0; i + 1 < probs.size(); ++i) {
    cum += probs(i);
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

TEST(StateValue, trivial_cases) {
  CriticParams params;
  params.nu.assign(5, 0.0);
  EXPECT_DOUBLE_EQ(state_value(params, SparseVec::one_hot(2, 5)), 0.0);
  params.nu[3] = 7.5;
  EXPECT_DOUBLE_EQ(state_value(params, SparseVec::one_hot(3, 5)), 7.5);
  EXPECT_THROW(state_value(params, SparseVec::one_hot(0, 4)), std::invalid_argument);
}

TEST(Advantage, trivial_cases) {
  CriticParams params;
  params.omega.assign(2, 0.0);
  const SparseVec psi = make_sparse(2, {{0, 1.0}, {1, -1.0}});
  EXPECT_DOUBLE_EQ(advantage(params, psi), 0.0);
  params.omega = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(advantage(params, psi), -1.0);
}

TEST(Advantage, policy_weighted_mean_is_zero_for_any_omega) {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const int num_actions = 2 + static_cast<int>(rng.next_below(3));
    const int num_states = 3;
    PolicyParams policy{random_theta(rng, static_cast<std::size_t>(num_states) * num_actions, 2.0)};
    CriticParams critic;
    critic.omega = random_theta(rng, policy.theta.size(), 5.0);
    const int s = static_cast<int>(rng.next_below(num_states));
    const auto feats = tabular_sa_feats(s, num_states, num_actions);
    const ActionDistribution dist = action_probabilities(policy, feats);
    double acc = 0.0;
    for (int a = 0; a < num_actions; ++a)
      acc += dist.probs[a] * advantage(critic, score(policy, feats, a));
    EXPECT_LE(std::abs(acc), 1e-12);
  }
}

TEST(TdError, arithmetic) {
  EXPECT_DOUBLE_EQ(td_error(1.0, 1.0, 10.0, 10.5, false), 0.5);
  EXPECT_DOUBLE_EQ(td_error(-100.0, 0.9, 123.0, 0.0, true), -100.0);
  EXPECT_DOUBLE_EQ(td_error(0.0, 0.5, 2.0, 1.0, false), 0.0);
}

// On an exactly-solved MDP the behavior-expected weighted TD error vanishes
// in every state: sum_a b phi E_s'[delta] = sum_a pi (Q - V) = 0.
TEST(TdError, zero_mean_at_fixed_point) {
  const MdpSpec mdp = parse_mdp_fixture(kTwoStateMdpJson);
  Rng rng(37);
  const auto theta = random_theta(rng, static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 1.0);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::MatrixXd behavior = epsilon_mixture_matrix(pi, 0.1);
  const Eigen::VectorXd v = solve_v(mdp, pi);
  for (int s = 0; s < mdp.num_states; ++s) {
    double acc = 0.0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double phi = pi(s, a) / behavior(s, a);
      for (int s2 = 0; s2 < mdp.num_states; ++s2)
        acc += behavior(s, a) * mdp.p(s, a, s2) * phi *
               td_error(mdp.r(s, a), mdp.gamma, v(s2), v(s), false);
    }
    EXPECT_LE(std::abs(acc), 1e-8);
  }
}

TEST(UpdateCritic, lambda_zero_reduces_to_td0) {
  CriticParams params;
  params.nu.assign(4, 0.0);
  TraceState trace(4, 8, /*lambda=*/0.0, /*gamma=*/0.9);
  const SparseVec x = SparseVec::one_hot(1, 4);
  update_critic(params, trace, 1.0, x, 2.0, 0.1);
  EXPECT_DOUBLE_EQ(params.nu[1], 0.2);  // alpha * delta * x
  EXPECT_DOUBLE_EQ(params.nu[0], 0.0);
}

TEST(UpdateCritic, zero_phi_cuts_trace_and_freezes_value) {
  CriticParams params;
  params.nu.assign(4, 1.0);
  TraceState trace(4, 8, 0.9, 0.9);
  trace.e_v.add(SparseVec::one_hot(0, 4));
  update_critic(params, trace, 0.0, SparseVec::one_hot(2, 4), 5.0, 0.1);
  EXPECT_EQ(trace.e_v.active_count(), 0u);
  for (double v : params.nu) EXPECT_DOUBLE_EQ(v, 1.0);
}

// Deterministic 5-state cycle with action-independent dynamics: the TD fixed
// point zeroes every sampled delta, so off-policy TD(lambda) converges to the
// exact DP values.
TEST(UpdateCritic, converges_to_exact_values_on_chain) {
  const int S = 5;
  const int A = 2;
  MdpSpec mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.gamma = 0.9;
  mdp.transitions.assign(static_cast<std::size_t>(S) * A * S, 0.0);
  mdp.rewards.assign(static_cast<std::size_t>(S) * A, 0.0);
  const double rewards[S] = {0.3, -0.2, 0.5, 0.0, 0.8};
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      mdp.transitions[(static_cast<std::size_t>(s) * A + a) * S + (s + 1) % S] = 1.0;
      mdp.rewards[static_cast<std::size_t>(s) * A + a] = rewards[s];
    }
  mdp.validate();

  Rng rng(41);
  const auto theta = random_theta(rng, static_cast<std::size_t>(S) * A, 1.0);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::MatrixXd behavior = epsilon_mixture_matrix(pi, 0.1);
  const Eigen::VectorXd v_exact = solve_v(mdp, pi);

  CriticParams params;
  params.nu.assign(S, 0.0);
  TraceState trace(S, S * A, /*lambda=*/0.5, /*gamma=*/mdp.gamma);
  int s = 0;
  for (long step = 0; step < 100000; ++step) {
    const int a = sample_index(behavior.row(s).transpose(), rng);
    const double phi = pi(s, a) / behavior(s, a);
    const int s2 = (s + 1) % S;
    const double delta =
        td_error(mdp.r(s, a), mdp.gamma, params.nu[s2], params.nu[s], false);
    update_critic(params, trace, phi, SparseVec::one_hot(s, S), delta, 0.05);
    s = s2;
  }
  double err = 0.0;
  for (int i = 0; i < S; ++i) err = std::max(err, std::abs(params.nu[i] - v_exact(i)));
  EXPECT_LE(err, 1e-6);
  EXPECT_LE(err, 0.05);
}

TEST(UpdateOmega, fixed_point_and_arithmetic) {
  CriticParams params;
  params.omega = {2.0, 3.0};
  const SparseVec psi = make_sparse(2, {{0, 1.0}, {1, -1.0}});
  update_omega(params, 1.0, -1.0, psi, 0.1);  // delta == psi' omega already
  EXPECT_DOUBLE_EQ(params.omega[0], 2.0);
  EXPECT_DOUBLE_EQ(params.omega[1], 3.0);

  CriticParams zero;
  zero.omega = {0.0, 0.0};
  update_omega(zero, 1.0, 1.0, make_sparse(2, {{0, 1.0}}), 0.1);
  EXPECT_DOUBLE_EQ(zero.omega[0], 0.1);
  EXPECT_DOUBLE_EQ(zero.omega[1], 0.0);
}

// LMS with exact advantage targets on a frozen policy converges to the
// weighted least-squares solution of the lemma check (the natural gradient).
TEST(UpdateOmega, converges_to_compatible_solution) {
  const MdpSpec mdp = parse_mdp_fixture(kTwoStateMdpJson);
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  Rng rng(43);
  const auto theta = random_theta(rng, static_cast<std::size_t>(S) * A, 1.0);
  PolicyParams policy{theta};
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::MatrixXd behavior = epsilon_mixture_matrix(pi, 0.1);
  const Eigen::VectorXd v = solve_v(mdp, pi);
  const Eigen::MatrixXd q = q_values(mdp, v);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  const Lemma1Report lemma = lemma1_check(mdp, theta, behavior);

  CriticParams params;
  params.omega.assign(static_cast<std::size_t>(S) * A, 0.0);
  for (long step = 0; step < 1000000; ++step) {
    // draw (s, a) ~ d^b x b
    double u = rng.next_uniform();
    int s = S - 1;
    for (int i = 0; i < S; ++i) {
      u -= d(i);
      if (u < 0.0) {
        s = i;
        break;
      }
    }
    const int a = sample_index(behavior.row(s).transpose(), rng);
    const double phi = pi(s, a) / behavior(s, a);
    const auto feats = tabular_sa_feats(s, S, A);
    const SparseVec psi = score(policy, feats, a);
    update_omega(params, phi, q(s, a) - v(s), psi, 0.05);
  }
  double err = 0.0;
  for (int i = 0; i < static_cast<int>(params.omega.size()); ++i)
    err = std::max(err, std::abs(params.omega[i] - lemma.omega_star(i)));
  EXPECT_LE(err, 1e-3);
}

TEST(Trace, add_scale_reset_bookkeeping) {
  Trace trace(6, 1e-8);
  trace.add(SparseVec::one_hot(1, 6), 2.0);
  trace.add(make_sparse(6, {{1, 0.5}, {4, 1.0}}));
  EXPECT_DOUBLE_EQ(trace.value(1), 2.5);
  EXPECT_DOUBLE_EQ(trace.value(4), 1.0);
  EXPECT_EQ(trace.active_count(), 2u);
  trace.scale(0.5);
  EXPECT_DOUBLE_EQ(trace.value(1), 1.25);
  std::vector<double> target(6, 0.0);
  trace.axpy_into(target, 2.0);
  EXPECT_DOUBLE_EQ(target[1], 2.5);
  EXPECT_DOUBLE_EQ(target[4], 1.0);
  trace.reset();
  EXPECT_EQ(trace.active_count(), 0u);
  EXPECT_DOUBLE_EQ(trace.value(1), 0.0);
}

TEST(Trace, tiny_entries_are_purged) {
  Trace trace(3, 1e-8);
  trace.add(SparseVec::one_hot(0, 3));
  for (int i = 0; i < 200; ++i) trace.scale(0.5);
  EXPECT_EQ(trace.active_count(), 0u);
}
