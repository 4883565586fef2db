#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "actgrad/sparse.hpp"

namespace actgrad {

/// Critic parameters: nu for the state value V(s), omega for the compatible
/// advantage psi(s,a)' omega (same dimension as the actor parameters).
struct CriticParams {
  std::vector<double> nu;
  std::vector<double> omega;
};

/**
 * Eligibility trace: a decayed accumulation of sparse feature vectors kept as
 * a dense value array plus an active-index list. Entries decayed below the
 * drop threshold are purged, which keeps per-step work proportional to the
 * decay horizon instead of the feature dimension.
 */
class Trace {
 public:
  explicit Trace(std::uint32_t dim, double drop_threshold = 1e-8)
      : values_(dim, 0.0), active_flag_(dim, 0), drop_threshold_(drop_threshold) {}

  void reset() {
    for (std::uint32_t idx : active_) {
      values_[idx] = 0.0;
      active_flag_[idx] = 0;
    }
    active_.clear();
  }

  /// trace *= c, purging entries with |value| below the drop threshold.
  void scale(double c) {
    if (c == 0.0) {
      reset();
      return;
    }
    std::size_t kept = 0;
    for (std::uint32_t idx : active_) {
      const double v = values_[idx] * c;
      if (std::abs(v) < drop_threshold_) {
        values_[idx] = 0.0;
        active_flag_[idx] = 0;
      } else {
        values_[idx] = v;
        active_[kept++] = idx;
      }
    }
    active_.resize(kept);
  }

  /// trace += c * x
  void add(const SparseVec& x, double c = 1.0) {
    if (x.dim != values_.size()) throw std::invalid_argument("Trace::add: dimension mismatch");
    if (c == 0.0) return;
    for (const auto& [idx, val] : x.entries) {
      if (!active_flag_[idx]) {
        active_flag_[idx] = 1;
        active_.push_back(idx);
      }
      values_[idx] += c * val;
    }
  }

  /// target += c * trace
  void axpy_into(std::vector<double>& target, double c) const {
    if (target.size() != values_.size())
      throw std::invalid_argument("Trace::axpy_into: dimension mismatch");
    for (std::uint32_t idx : active_) target[idx] += c * values_[idx];
  }

  double value(std::uint32_t i) const { return values_[i]; }
  std::uint32_t dim() const { return static_cast<std::uint32_t>(values_.size()); }
  std::size_t active_count() const { return active_.size(); }

  double max_abs() const {
    double m = 0.0;
    for (std::uint32_t idx : active_) m = std::max(m, std::abs(values_[idx]));
    return m;
  }

  bool finite() const {
    for (std::uint32_t idx : active_)
      if (!std::isfinite(values_[idx])) return false;
    return true;
  }

 private:
  std::vector<double> values_;
  std::vector<char> active_flag_;
  std::vector<std::uint32_t> active_;
  double drop_threshold_;
};

/// Critic trace e_v over state features and actor trace e_theta over
/// state-action features; both reset at episode start.
struct TraceState {
  Trace e_v;
  Trace e_theta;
  double lambda = 0.0;
  double gamma = 1.0;

  TraceState(std::uint32_t state_dim, std::uint32_t actor_dim, double lambda_, double gamma_)
      : e_v(state_dim), e_theta(actor_dim), lambda(lambda_), gamma(gamma_) {}

  void reset() {
    e_v.reset();
    e_theta.reset();
  }
};

inline double state_value(const CriticParams& params, const SparseVec& x_s) {
  return dot(params.nu, x_s);
}

inline double advantage(const CriticParams& params, const SparseVec& psi) {
  return dot(params.omega, psi);
}

/// One-step TD error; terminal transitions drop the bootstrap term.
inline double td_error(double reward, double gamma, double v_next, double v_now, bool terminal) {
  return reward + (terminal ? 0.0 : gamma * v_next) - v_now;
}

/**
 * Off-policy TD(lambda) value update:
 *   e_v <- phi * (gamma * lambda * e_v + x(s))
 *   nu  <- nu + alpha_v * delta * e_v
 */
inline void update_critic(CriticParams& params, TraceState& trace, double phi,
                          const SparseVec& x_s, double delta, double alpha_v) {
  trace.e_v.scale(phi * trace.gamma * trace.lambda);
  trace.e_v.add(x_s, phi);
  trace.e_v.axpy_into(params.nu, alpha_v * delta);
}

/**
 * Incremental least-squares fit of the compatible advantage toward the
 * stochastic target delta:
 *   omega <- omega + alpha_w * phi * (delta - psi' omega) * psi
 */
inline void update_omega(CriticParams& params, double phi, double delta, const SparseVec& psi,
                         double alpha_w) {
  const double fitted = dot(params.omega, psi);
  axpy(params.omega, alpha_w * phi * (delta - fitted), psi);
}

}  // namespace actgrad
