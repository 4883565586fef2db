#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "actgrad/rng.hpp"

namespace actgrad {

/**
 * Exact tabular MDP: transition tensor P[s][a][s'], reward tensor R[s][a]
 * and discount gamma in [0,1). States listed in `terminals` must be encoded
 * as absorbing with zero reward; they end episodes in the tabular
 * environment and are replaced by the restart distribution when computing
 * the behavior visitation d^b.
 */
struct MdpSpec {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transitions;  // (s * A + a) * S + s2
  std::vector<double> rewards;      // s * A + a
  double gamma = 0.9;
  std::vector<int> terminals;
  std::vector<double> start;  // restart distribution; empty means uniform

  double p(int s, int a, int s2) const {
    return transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2];
  }
  double r(int s, int a) const {
    return rewards[static_cast<std::size_t>(s) * num_actions + a];
  }
  bool is_terminal(int s) const {
    for (int t : terminals)
      if (t == s) return true;
    return false;
  }

  void validate() const {
    if (num_states <= 0 || num_actions <= 0)
      throw std::invalid_argument("MdpSpec: num_states and num_actions must be positive");
    const auto S = static_cast<std::size_t>(num_states);
    const auto A = static_cast<std::size_t>(num_actions);
    if (transitions.size() != S * A * S) throw std::invalid_argument("MdpSpec: transition tensor size");
    if (rewards.size() != S * A) throw std::invalid_argument("MdpSpec: reward tensor size");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("MdpSpec: gamma must be in [0,1)");
    for (int s = 0; s < num_states; ++s)
      for (int a = 0; a < num_actions; ++a) {
        double sum = 0.0;
        for (int s2 = 0; s2 < num_states; ++s2) {
          const double pr = p(s, a, s2);
          if (pr < 0.0) throw std::invalid_argument("MdpSpec: negative transition probability");
          sum += pr;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          throw std::invalid_argument("MdpSpec: transition row does not sum to 1");
      }
    for (int t : terminals) {
      if (t < 0 || t >= num_states) throw std::invalid_argument("MdpSpec: terminal state out of range");
      for (int a = 0; a < num_actions; ++a)
        if (std::abs(p(t, a, t) - 1.0) > 1e-12 || r(t, a) != 0.0)
          throw std::invalid_argument("MdpSpec: terminal states must be absorbing with zero reward");
    }
    if (!start.empty()) {
      if (start.size() != S) throw std::invalid_argument("MdpSpec: start distribution size");
      double sum = 0.0;
      for (double pr : start) {
        if (pr < 0.0) throw std::invalid_argument("MdpSpec: negative start probability");
        sum += pr;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("MdpSpec: start distribution does not sum to 1");
    }
  }
};

inline void to_json(nlohmann::json& j, const MdpSpec& m) {
  j = nlohmann::json{{"num_states", m.num_states},
                     {"num_actions", m.num_actions},
                     {"gamma", m.gamma},
                     {"transitions", m.transitions},
                     {"rewards", m.rewards}};
  if (!m.terminals.empty()) j["terminals"] = m.terminals;
  if (!m.start.empty()) j["start"] = m.start;
}

inline void from_json(const nlohmann::json& j, MdpSpec& m) {
  m = MdpSpec{};
  j.at("num_states").get_to(m.num_states);
  j.at("num_actions").get_to(m.num_actions);
  j.at("gamma").get_to(m.gamma);
  j.at("transitions").get_to(m.transitions);
  j.at("rewards").get_to(m.rewards);
  if (j.contains("terminals")) j.at("terminals").get_to(m.terminals);
  if (j.contains("start")) j.at("start").get_to(m.start);
  m.validate();
}

inline Eigen::VectorXd restart_distribution(const MdpSpec& mdp) {
  Eigen::VectorXd d(mdp.num_states);
  if (mdp.start.empty())
    d.setConstant(1.0 / mdp.num_states);
  else
    for (int s = 0; s < mdp.num_states; ++s) d(s) = mdp.start[s];
  return d;
}

/// Softmax policy over tabular state-action features: the preference of
/// action a in state s sits at theta[a * S + s] (block one-hot layout).
inline Eigen::MatrixXd tabular_policy(const MdpSpec& mdp, std::span<const double> theta) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  if (theta.size() != static_cast<std::size_t>(S) * A)
    throw std::invalid_argument("tabular_policy: theta dimension mismatch");
  Eigen::MatrixXd pi(S, A);
  for (int s = 0; s < S; ++s) {
    double shift = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) shift = std::max(shift, theta[static_cast<std::size_t>(a) * S + s]);
    double z = 0.0;
    for (int a = 0; a < A; ++a) {
      pi(s, a) = std::exp(theta[static_cast<std::size_t>(a) * S + s] - shift);
      z += pi(s, a);
    }
    pi.row(s) /= z;
  }
  return pi;
}

/// Dense score vector psi(s,a) of the tabular softmax policy, dim A*S.
inline Eigen::VectorXd tabular_score(const MdpSpec& mdp, const Eigen::MatrixXd& policy, int s,
                                     int a) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A) * S);
  for (int b = 0; b < A; ++b)
    psi(static_cast<Eigen::Index>(b) * S + s) = (b == a ? 1.0 : 0.0) - policy(s, b);
  return psi;
}

inline Eigen::MatrixXd epsilon_mixture_matrix(const Eigen::MatrixXd& policy, double epsilon) {
  const double u = epsilon / policy.cols();
  return (1.0 - epsilon) * policy + Eigen::MatrixXd::Constant(policy.rows(), policy.cols(), u);
}

namespace detail {

inline void check_behavior(const MdpSpec& mdp, const Eigen::MatrixXd& behavior) {
  if (behavior.rows() != mdp.num_states || behavior.cols() != mdp.num_actions)
    throw std::invalid_argument("behavior policy matrix has wrong shape");
  if ((behavior.array() <= 0.0).any())
    throw std::invalid_argument("behavior policy must be strictly positive everywhere");
}

}  // namespace detail

/**
 * Exact policy evaluation: solves (I - gamma * P_pi) V = R_pi directly and
 * verifies the Bellman residual is below 1e-10.
 */
inline Eigen::VectorXd solve_v(const MdpSpec& mdp, const Eigen::MatrixXd& policy) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  if (policy.rows() != S || policy.cols() != A)
    throw std::invalid_argument("solve_v: policy matrix has wrong shape");
  Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
  Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      r_pi(s) += policy(s, a) * mdp.r(s, a);
      for (int s2 = 0; s2 < S; ++s2) p_pi(s, s2) += policy(s, a) * mdp.p(s, a, s2);
    }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi;
  const Eigen::VectorXd v = m.partialPivLu().solve(r_pi);
  if (!v.allFinite() || (m * v - r_pi).lpNorm<Eigen::Infinity>() > 1e-10)
    throw std::runtime_error("solve_v: linear system is singular or ill-conditioned");
  return v;
}

/// Q(s,a) = R(s,a) + gamma * sum_s' P(s,a,s') V(s')
inline Eigen::MatrixXd q_values(const MdpSpec& mdp, const Eigen::VectorXd& v) {
  Eigen::MatrixXd q(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      double acc = mdp.r(s, a);
      for (int s2 = 0; s2 < mdp.num_states; ++s2) acc += mdp.gamma * mdp.p(s, a, s2) * v(s2);
      q(s, a) = acc;
    }
  return q;
}

/// Fixed-point iteration V <- R_pi + gamma * P_pi * V; cross-check for solve_v.
inline Eigen::VectorXd iterative_policy_evaluation(const MdpSpec& mdp,
                                                   const Eigen::MatrixXd& policy, long iters) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states);
  for (long k = 0; k < iters; ++k) {
    Eigen::VectorXd next(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) {
      double acc = 0.0;
      for (int a = 0; a < mdp.num_actions; ++a) {
        double qa = mdp.r(s, a);
        for (int s2 = 0; s2 < mdp.num_states; ++s2) qa += mdp.gamma * mdp.p(s, a, s2) * v(s2);
        acc += policy(s, a) * qa;
      }
      next(s) = acc;
    }
    v = next;
  }
  return v;
}

/// Optimal action values by value iteration on Q.
inline Eigen::MatrixXd value_iteration_q(const MdpSpec& mdp, double tol = 1e-12,
                                         long max_iters = 1'000'000) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(mdp.num_states, mdp.num_actions);
  for (long k = 0; k < max_iters; ++k) {
    Eigen::MatrixXd next(mdp.num_states, mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s)
      for (int a = 0; a < mdp.num_actions; ++a) {
        double acc = mdp.r(s, a);
        for (int s2 = 0; s2 < mdp.num_states; ++s2)
          acc += mdp.gamma * mdp.p(s, a, s2) * q.row(s2).maxCoeff();
        next(s, a) = acc;
      }
    const double diff = (next - q).lpNorm<Eigen::Infinity>();
    q = next;
    if (diff <= tol) return q;
  }
  return q;
}

/// State chain under the behavior policy; rows of terminal states are
/// replaced by the restart distribution so episodic specs become ergodic.
inline Eigen::MatrixXd behavior_chain(const MdpSpec& mdp, const Eigen::MatrixXd& behavior) {
  detail::check_behavior(mdp, behavior);
  const int S = mdp.num_states;
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(S, S);
  const Eigen::VectorXd restart = restart_distribution(mdp);
  for (int s = 0; s < S; ++s) {
    if (mdp.is_terminal(s)) {
      chain.row(s) = restart.transpose();
      continue;
    }
    for (int a = 0; a < mdp.num_actions; ++a)
      for (int s2 = 0; s2 < S; ++s2) chain(s, s2) += behavior(s, a) * mdp.p(s, a, s2);
  }
  return chain;
}

namespace detail {

inline bool strongly_connected(const Eigen::MatrixXd& chain) {
  const auto n = static_cast<int>(chain.rows());
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = (i == j) || chain(i, j) > 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[i][k])
        for (int j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!reach[i][j]) return false;
  return true;
}

}  // namespace detail

/**
 * Stationary distribution of a stochastic matrix by power iteration on the
 * lazy chain (I + P)/2, which shares the stationary distribution of P and is
 * aperiodic whenever P is irreducible. Throws if the chain is not ergodic.
 */
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& chain, double tol = 1e-13,
                                               long max_iters = 2'000'000) {
  const auto n = static_cast<int>(chain.rows());
  if (chain.cols() != n) throw std::invalid_argument("stationary_distribution: square matrix required");
  if (!detail::strongly_connected(chain))
    throw std::runtime_error(
        "stationary_distribution: chain is not ergodic; episodic specs need a restart distribution");
  const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + chain);
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (long k = 0; k < max_iters; ++k) {
    Eigen::VectorXd next = lazy.transpose() * d;
    next /= next.sum();
    const double diff = (next - d).lpNorm<Eigen::Infinity>();
    d = next;
    if (diff <= tol) return d;
  }
  throw std::runtime_error("stationary_distribution: power iteration did not converge");
}

/// Behavior visitation d^b: stationary distribution of the behavior chain
/// with terminal states restarted.
inline Eigen::VectorXd behavior_distribution_exact(const MdpSpec& mdp,
                                                   const Eigen::MatrixXd& behavior) {
  return stationary_distribution(behavior_chain(mdp, behavior));
}

/**
 * Exact off-policy gradient approximation
 *   sum_s d^b(s) sum_a b(a|s) phi(s,a) psi(s,a) Q^pi(s,a),
 * with phi = pi/b, summed term by term (the b * phi product cancels to pi
 * analytically; computing it this way exercises the identity).
 */
inline Eigen::VectorXd offpolicy_gradient_exact(const MdpSpec& mdp, std::span<const double> theta,
                                                const Eigen::MatrixXd& behavior) {
  detail::check_behavior(mdp, behavior);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::VectorXd v = solve_v(mdp, pi);
  const Eigen::MatrixXd q = q_values(mdp, v);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_actions) * mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double phi = pi(s, a) / behavior(s, a);
      grad += d(s) * behavior(s, a) * phi * q(s, a) * tabular_score(mdp, pi, s, a);
    }
  return grad;
}

/// Fisher information matrix G = sum_s d^b(s) sum_a b(a|s) phi psi psi'.
inline Eigen::MatrixXd fisher_exact(const MdpSpec& mdp, std::span<const double> theta,
                                    const Eigen::MatrixXd& behavior) {
  detail::check_behavior(mdp, behavior);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  const Eigen::Index n = static_cast<Eigen::Index>(mdp.num_actions) * mdp.num_states;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double phi = pi(s, a) / behavior(s, a);
      const Eigen::VectorXd psi = tabular_score(mdp, pi, s, a);
      g += d(s) * behavior(s, a) * phi * (psi * psi.transpose());
    }
  return g;
}

/// Moore-Penrose pseudoinverse; singular values below the absolute cutoff
/// are treated as zero (tabular softmax features always carry a null
/// direction from constant preference shifts).
inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double cutoff = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd inv = svd.singularValues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct Lemma1Report {
  Eigen::VectorXd omega_star;        // weighted least-squares advantage fit
  Eigen::VectorXd natural_gradient;  // G^+ grad~J
  double residual = 0.0;             // || omega_star - natural_gradient ||_inf
};

/**
 * Checks that the optimal compatible-advantage parameters equal the natural
 * policy gradient. omega* minimizes
 *   sum_s d^b(s) sum_a pi(a|s) (A^pi(s,a) - psi' omega)^2
 * (min-norm solution via SVD) and is compared against G^+ grad~J computed
 * from the Fisher matrix and the exact off-policy gradient.
 */
inline Lemma1Report lemma1_check(const MdpSpec& mdp, std::span<const double> theta,
                                 const Eigen::MatrixXd& behavior) {
  detail::check_behavior(mdp, behavior);
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::VectorXd v = solve_v(mdp, pi);
  const Eigen::MatrixXd q = q_values(mdp, v);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);

  const Eigen::Index n = static_cast<Eigen::Index>(A) * S;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(S) * A, n);
  Eigen::VectorXd target(static_cast<Eigen::Index>(S) * A);
  Eigen::Index row = 0;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a, ++row) {
      const double w = std::sqrt(d(s) * pi(s, a));
      design.row(row) = w * tabular_score(mdp, pi, s, a).transpose();
      target(row) = w * (q(s, a) - v(s));
    }

  Lemma1Report report;
  report.omega_star = pseudo_inverse(design) * target;
  report.natural_gradient =
      pseudo_inverse(fisher_exact(mdp, theta, behavior)) * offpolicy_gradient_exact(mdp, theta, behavior);
  report.residual = (report.omega_star - report.natural_gradient).lpNorm<Eigen::Infinity>();
  return report;
}

struct DecompositionReport {
  Eigen::VectorXd gradient_fd;        // central differences of J(theta), d^b frozen
  Eigen::VectorXd policy_term;        // exact off-policy gradient term
  Eigen::VectorXd action_value_term;  // E[phi * dQ/dtheta] via central differences of Q
  double residual = 0.0;
};

/**
 * Splits grad J = E[phi psi Q] + E[phi dQ/dtheta] and checks the two routes
 * agree: the left side by central finite differences of J(theta) with d^b
 * frozen, the right side from the exact policy term plus finite differences
 * of the exact Q in theta.
 */
inline DecompositionReport full_gradient_decomposition_check(const MdpSpec& mdp,
                                                             std::span<const double> theta,
                                                             const Eigen::MatrixXd& behavior,
                                                             double fd_step = 1e-5) {
  detail::check_behavior(mdp, behavior);
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const Eigen::Index n = static_cast<Eigen::Index>(A) * S;
  const Eigen::MatrixXd pi0 = tabular_policy(mdp, theta);
  const Eigen::VectorXd d0 = behavior_distribution_exact(mdp, behavior);

  DecompositionReport report;
  report.policy_term = offpolicy_gradient_exact(mdp, theta, behavior);
  report.gradient_fd.resize(n);
  report.action_value_term.resize(n);

  std::vector<double> perturbed(theta.begin(), theta.end());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double saved = perturbed[i];
    perturbed[i] = saved + fd_step;
    const Eigen::VectorXd v_plus = solve_v(mdp, tabular_policy(mdp, perturbed));
    const Eigen::MatrixXd q_plus = q_values(mdp, v_plus);
    perturbed[i] = saved - fd_step;
    const Eigen::VectorXd v_minus = solve_v(mdp, tabular_policy(mdp, perturbed));
    const Eigen::MatrixXd q_minus = q_values(mdp, v_minus);
    perturbed[i] = saved;

    report.gradient_fd(i) = (d0.dot(v_plus) - d0.dot(v_minus)) / (2.0 * fd_step);
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        const double phi = pi0(s, a) / behavior(s, a);
        acc += d0(s) * behavior(s, a) * phi * (q_plus(s, a) - q_minus(s, a)) / (2.0 * fd_step);
      }
    report.action_value_term(i) = acc;
  }
  report.residual = (report.gradient_fd - (report.policy_term + report.action_value_term))
                        .lpNorm<Eigen::Infinity>();
  return report;
}

/// Exact expected actor direction sum_s d^b sum_a b phi psi (psi' omega);
/// with omega at the compatible optimum this equals G omega* = grad~J.
inline Eigen::VectorXd expected_actgrad_direction(const MdpSpec& mdp, std::span<const double> theta,
                                                  const Eigen::MatrixXd& behavior,
                                                  const Eigen::VectorXd& omega) {
  detail::check_behavior(mdp, behavior);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_actions) * mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double phi = pi(s, a) / behavior(s, a);
      const Eigen::VectorXd psi = tabular_score(mdp, pi, s, a);
      dir += d(s) * behavior(s, a) * phi * psi.dot(omega) * psi;
    }
  return dir;
}

/// Exact expected one-step actor direction of the TD actor with an exact
/// baseline: sum_s d^b sum_a b phi psi A^pi(s,a).
inline Eigen::VectorXd expected_offpac_direction(const MdpSpec& mdp, std::span<const double> theta,
                                                 const Eigen::MatrixXd& behavior) {
  detail::check_behavior(mdp, behavior);
  const Eigen::MatrixXd pi = tabular_policy(mdp, theta);
  const Eigen::VectorXd v = solve_v(mdp, pi);
  const Eigen::MatrixXd q = q_values(mdp, v);
  const Eigen::VectorXd d = behavior_distribution_exact(mdp, behavior);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mdp.num_actions) * mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double phi = pi(s, a) / behavior(s, a);
      dir += d(s) * behavior(s, a) * phi * (q(s, a) - v(s)) * tabular_score(mdp, pi, s, a);
    }
  return dir;
}

/// Random ergodic MDP: Dirichlet-like transition rows mixed with 5% uniform
/// mass, rewards uniform in [-1, 1].
inline MdpSpec random_mdp(Rng& rng, int num_states, int num_actions, double gamma = 0.9) {
  MdpSpec m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.gamma = gamma;
  m.transitions.resize(static_cast<std::size_t>(num_states) * num_actions * num_states);
  m.rewards.resize(static_cast<std::size_t>(num_states) * num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      m.rewards[static_cast<std::size_t>(s) * num_actions + a] = rng.uniform(-1.0, 1.0);
      std::vector<double> row(num_states);
      double sum = 0.0;
      for (int s2 = 0; s2 < num_states; ++s2) {
        row[s2] = -std::log(1.0 - rng.next_uniform());
        sum += row[s2];
      }
      for (int s2 = 0; s2 < num_states; ++s2) {
        const double pr = 0.95 * row[s2] / sum + 0.05 / num_states;
        m.transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2] = pr;
      }
      // renormalize exactly against accumulated rounding
      double check = 0.0;
      for (int s2 = 0; s2 < num_states; ++s2)
        check += m.transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2];
      for (int s2 = 0; s2 < num_states; ++s2)
        m.transitions[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s2] /= check;
    }
  m.validate();
  return m;
}

inline std::vector<double> random_theta(Rng& rng, std::size_t dim, double scale = 1.0) {
  std::vector<double> theta(dim);
  for (double& t : theta) t = rng.uniform(-scale, scale);
  return theta;
}

}  // namespace actgrad
