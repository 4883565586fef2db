#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "actgrad/agents.hpp"
#include "actgrad/fixtures.hpp"
#include "actgrad/mdp_oracle.hpp"
#include "actgrad/policy.hpp"
#include "actgrad/rng.hpp"

namespace actgrad {

struct CheckResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  bool pass = false;
};

namespace detail {

inline CheckResult make_result(std::string name, double worst, double tolerance, int cases) {
  return {std::move(name), worst, tolerance, cases, worst <= tolerance};
}

/// Random per-action sparse features plus parameters for generic (non
/// tabular) policy checks.
struct RandomPolicyCase {
  PolicyParams params;
  std::vector<SparseVec> feats;
};

inline RandomPolicyCase random_policy_case(Rng& rng) {
  const int num_actions = 2 + static_cast<int>(rng.next_below(4));
  const std::uint32_t dim = 4 + static_cast<std::uint32_t>(rng.next_below(12));
  RandomPolicyCase c;
  c.params.theta = random_theta(rng, dim, 1.5);
  for (int a = 0; a < num_actions; ++a) {
    std::vector<std::pair<std::uint32_t, double>> terms;
    for (std::uint32_t i = 0; i < dim; ++i)
      if (rng.next_uniform() < 0.6) terms.emplace_back(i, rng.uniform(-1.0, 1.0));
    if (terms.empty()) terms.emplace_back(rng.next_below(dim), 1.0);
    c.feats.push_back(make_sparse(dim, std::move(terms)));
  }
  return c;
}

/// One agent_step's actor displacement on a tabular MDP with frozen critics.
inline Eigen::VectorXd agent_actor_displacement(const MdpSpec& mdp, const AgentConfig& config,
                                                const std::vector<double>& theta,
                                                const Eigen::VectorXd& nu,
                                                const Eigen::VectorXd& omega, int s, int a, int s2,
                                                double behavior_prob) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  AgentState state(config, static_cast<std::uint32_t>(S), A);
  state.policy.theta = theta;
  for (int i = 0; i < S; ++i) state.critic.nu[i] = nu(i);
  for (Eigen::Index i = 0; i < omega.size(); ++i) state.critic.omega[i] = omega(i);
  const Transition t{SparseVec::one_hot(static_cast<std::uint32_t>(s), S),
                     a,
                     mdp.r(s, a),
                     SparseVec::one_hot(static_cast<std::uint32_t>(s2), S),
                     false,
                     behavior_prob};
  agent_step(state, config, t);
  Eigen::VectorXd diff(static_cast<Eigen::Index>(A) * S);
  for (Eigen::Index i = 0; i < diff.size(); ++i) diff(i) = state.policy.theta[i] - theta[i];
  return diff;
}

/// Exact expectation of the agent's actor step over (s, a, s') under d^b x b x P.
inline Eigen::VectorXd expected_agent_actor_step(const MdpSpec& mdp, const AgentConfig& config,
                                                 const std::vector<double>& theta,
                                                 const Eigen::MatrixXd& behavior,
                                                 const Eigen::VectorXd& nu,
                                                 const Eigen::VectorXd& omega) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A) * S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a)
      for (int s2 = 0; s2 < S; ++s2) {
        const double w = d(s) * behavior(s, a) * mdp.p(s, a, s2);
        if (w == 0.0) continue;
        total += w * agent_actor_displacement(mdp, config, theta, nu, omega, s, a, s2,
                                              behavior(s, a));
      }
  return total;
}

}  // namespace detail

/// || omega* - G^+ grad~J ||_inf <= tol over random small MDPs and policies.
inline CheckResult check_lemma1(std::uint64_t seed, int num_mdps, double tolerance = 1e-8) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const int A = 2 + static_cast<int>(rng.next_below(2));
    const MdpSpec mdp = random_mdp(rng, S, A, 0.8 + 0.15 * rng.next_uniform());
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * A, 1.5);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(tabular_policy(mdp, theta), 0.1);
    worst = std::max(worst, lemma1_check(mdp, theta, behavior).residual);
  }
  return detail::make_result("lemma1 natural-gradient identity", worst, tolerance, num_mdps);
}

/// Bundled fixture MDPs through the same lemma check.
inline CheckResult check_fixture_lemma1(double tolerance = 1e-8) {
  Rng rng(7);
  double worst = 0.0;
  int cases = 0;
  for (const auto& [name, mdp] : fixture_mdps()) {
    const auto theta =
        random_theta(rng, static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 1.0);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(tabular_policy(mdp, theta), 0.1);
    worst = std::max(worst, lemma1_check(mdp, theta, behavior).residual);
    ++cases;
  }
  return detail::make_result("lemma1 on bundled fixtures", worst, tolerance, cases);
}

/// Finite-difference gradient of J versus the two-term decomposition.
inline CheckResult check_gradient_decomposition(std::uint64_t seed, int num_mdps,
                                                double fd_step = 1e-5, double tolerance = 1e-6) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const MdpSpec mdp = random_mdp(rng, 3, 2, 0.8 + 0.15 * rng.next_uniform());
    const auto theta = random_theta(rng, static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 1.0);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(tabular_policy(mdp, theta), 0.1);
    worst = std::max(worst,
                     full_gradient_decomposition_check(mdp, theta, behavior, fd_step).residual);
  }
  return detail::make_result("gradient decomposition (finite differences)", worst, tolerance,
                             num_mdps);
}

/// Expected agent actor step at omega = omega* equals the exact off-policy
/// gradient: the cancellation claim behind the action-value-gradient actor.
inline CheckResult check_actgrad_direction(std::uint64_t seed, int num_mdps,
                                           double tolerance = 1e-8) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const int A = 2;
    const MdpSpec mdp = random_mdp(rng, S, A, 0.85);
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * A, 1.0);
    const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(pi, 0.1);
    const Eigen::VectorXd v = solve_v(mdp, pi);
    const Lemma1Report lemma = lemma1_check(mdp, theta, behavior);
    const Eigen::VectorXd grad = offpolicy_gradient_exact(mdp, theta, behavior);

    AgentConfig config;
    config.kind = AgentKind::kActgrad;
    config.alpha_theta = 1.0;
    config.alpha_v = 0.0;  // critics frozen: measure the actor direction only
    config.alpha_w = 0.0;
    config.gamma = mdp.gamma;
    config.lambda = 0.0;
    const Eigen::VectorXd step =
        detail::expected_agent_actor_step(mdp, config, theta, behavior, v, lemma.omega_star);
    worst = std::max(worst, (step - grad).lpNorm<Eigen::Infinity>());

    // exact-sum route through the oracle as well
    const Eigen::VectorXd oracle_step =
        expected_actgrad_direction(mdp, theta, behavior, lemma.omega_star);
    worst = std::max(worst, (oracle_step - grad).lpNorm<Eigen::Infinity>());
  }
  return detail::make_result("actgrad expected step = off-policy gradient", worst, tolerance,
                             num_mdps);
}

/// With an exact value baseline and lambda = 0, the TD actor's expected step
/// coincides with the actgrad step at omega = omega*.
inline CheckResult check_offpac_coincidence(std::uint64_t seed, int num_mdps,
                                            double tolerance = 1e-8) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(2));
    const MdpSpec mdp = random_mdp(rng, S, 2, 0.85);
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * 2, 1.0);
    const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(pi, 0.1);
    const Eigen::VectorXd v = solve_v(mdp, pi);
    const Lemma1Report lemma = lemma1_check(mdp, theta, behavior);

    AgentConfig config;
    config.alpha_theta = 1.0;
    config.alpha_v = 0.0;
    config.alpha_w = 0.0;
    config.gamma = mdp.gamma;
    config.lambda = 0.0;

    config.kind = AgentKind::kOffpac;
    const Eigen::VectorXd offpac_step =
        detail::expected_agent_actor_step(mdp, config, theta, behavior, v, lemma.omega_star);
    config.kind = AgentKind::kActgrad;
    const Eigen::VectorXd actgrad_step =
        detail::expected_agent_actor_step(mdp, config, theta, behavior, v, lemma.omega_star);
    worst = std::max(worst, (offpac_step - actgrad_step).lpNorm<Eigen::Infinity>());
  }
  return detail::make_result("offpac/actgrad expected steps coincide at omega*", worst, tolerance,
                             num_mdps);
}

/// On-policy reduction: with behavior = target (phi = 1) the expected
/// actgrad step at omega* equals the on-policy gradient.
inline CheckResult check_onpolicy_reduction(std::uint64_t seed, int num_mdps,
                                            double tolerance = 1e-8) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const MdpSpec mdp = random_mdp(rng, S, 2, 0.85);
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * 2, 1.0);
    const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
    const Lemma1Report lemma = lemma1_check(mdp, theta, pi);
    const Eigen::VectorXd grad = offpolicy_gradient_exact(mdp, theta, pi);
    const Eigen::VectorXd step = expected_actgrad_direction(mdp, theta, pi, lemma.omega_star);
    worst = std::max(worst, (step - grad).lpNorm<Eigen::Infinity>());
  }
  return detail::make_result("on-policy reduction (behavior = target)", worst, tolerance, num_mdps);
}

/// || sum_a pi(a|s) psi(s,a) ||_inf <= tol over random features and thetas.
inline CheckResult check_zero_mean(std::uint64_t seed, int draws, double tolerance = 1e-12) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto c = detail::random_policy_case(rng);
    const ActionDistribution dist = action_probabilities(c.params, c.feats);
    std::vector<double> acc(c.params.theta.size(), 0.0);
    for (int a = 0; a < dist.num_actions(); ++a)
      axpy(acc, dist.probs[a], score(c.params, c.feats, a));
    for (double v : acc) worst = std::max(worst, std::abs(v));
  }
  return detail::make_result("compatible features zero mean", worst, tolerance, draws);
}

/// score versus central finite differences of log pi, per coordinate, with
/// relative error |fd - psi_i| / max(1, |psi_i|).
inline CheckResult check_score_finite_differences(std::uint64_t seed, int draws,
                                                  double fd_step = 1e-5,
                                                  double tolerance = 1e-6) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto c = detail::random_policy_case(rng);
    const int action = static_cast<int>(rng.next_below(c.feats.size()));
    const SparseVec psi = score(c.params, c.feats, action);
    std::vector<double> psi_dense(c.params.theta.size(), 0.0);
    axpy(psi_dense, 1.0, psi);
    PolicyParams perturbed = c.params;
    for (std::size_t k = 0; k < perturbed.theta.size(); ++k) {
      const double saved = perturbed.theta[k];
      perturbed.theta[k] = saved + fd_step;
      const double log_plus = std::log(action_probabilities(perturbed, c.feats).probs[action]);
      perturbed.theta[k] = saved - fd_step;
      const double log_minus = std::log(action_probabilities(perturbed, c.feats).probs[action]);
      perturbed.theta[k] = saved;
      const double fd = (log_plus - log_minus) / (2.0 * fd_step);
      worst = std::max(worst, std::abs(fd - psi_dense[k]) / std::max(1.0, std::abs(psi_dense[k])));
    }
  }
  return detail::make_result("score matches finite differences of log pi", worst, tolerance, draws);
}

/// Fisher matrices are symmetric positive semidefinite.
inline CheckResult check_fisher_psd(std::uint64_t seed, int num_mdps, double tolerance = 1e-12) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(3));
    const MdpSpec mdp = random_mdp(rng, S, 2, 0.85);
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * 2, 1.0);
    const Eigen::MatrixXd behavior = epsilon_mixture_matrix(tabular_policy(mdp, theta), 0.1);
    const Eigen::MatrixXd g = fisher_exact(mdp, theta, behavior);
    worst = std::max(worst, (g - g.transpose()).lpNorm<Eigen::Infinity>());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    worst = std::max(worst, std::max(0.0, -eig.eigenvalues().minCoeff()));
  }
  return detail::make_result("fisher matrix symmetric PSD", worst, tolerance, num_mdps);
}

/// Bellman residual of the direct policy-evaluation solve.
inline CheckResult check_bellman_residual(std::uint64_t seed, int num_mdps,
                                          double tolerance = 1e-10) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < num_mdps; ++i) {
    const int S = 2 + static_cast<int>(rng.next_below(4));
    const int A = 2 + static_cast<int>(rng.next_below(2));
    const MdpSpec mdp = random_mdp(rng, S, A, 0.9);
    const auto theta = random_theta(rng, static_cast<std::size_t>(S) * A, 1.0);
    const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
    const Eigen::VectorXd v = solve_v(mdp, pi);
    const Eigen::MatrixXd q = q_values(mdp, v);
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int a = 0; a < A; ++a) acc += pi(s, a) * q(s, a);
      residual = std::max(residual, std::abs(acc - v(s)));
    }
    worst = std::max(worst, residual);
  }
  return detail::make_result("bellman residual of solve_v", worst, tolerance, num_mdps);
}

/// Full identity suite with the counts used by the `verify` subcommand.
inline std::vector<CheckResult> run_identity_checks(std::uint64_t seed, int lemma_mdps = 120,
                                                    int decomposition_mdps = 60,
                                                    int direction_mdps = 40,
                                                    int zero_mean_draws = 10000,
                                                    int fd_draws = 100) {
  return {
      check_lemma1(seed, lemma_mdps),
      check_fixture_lemma1(),
      check_gradient_decomposition(seed + 1, decomposition_mdps),
      check_actgrad_direction(seed + 2, direction_mdps),
      check_offpac_coincidence(seed + 3, direction_mdps),
      check_onpolicy_reduction(seed + 4, direction_mdps),
      check_zero_mean(seed + 5, zero_mean_draws),
      check_score_finite_differences(seed + 6, fd_draws),
      check_fisher_psd(seed + 7, direction_mdps),
      check_bellman_residual(seed + 8, direction_mdps),
  };
}

}  // namespace actgrad
