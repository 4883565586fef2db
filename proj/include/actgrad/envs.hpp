#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "actgrad/features.hpp"
#include "actgrad/mdp_oracle.hpp"
#include "actgrad/rng.hpp"

namespace actgrad {

/// One environment step. Environments never set `truncated` themselves;
/// step-cap truncation is imposed by the experiment harness.
struct EnvStep {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;
  bool truncated = false;
};

class Env {
 public:
  virtual ~Env() = default;
  virtual std::vector<double> reset(Rng& rng) = 0;
  virtual EnvStep step(int action) = 0;
  virtual int num_actions() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual bool done() const = 0;
  /// Success flag for the episode that just ended.
  virtual bool episode_solved(long steps, long step_cap) const = 0;
  virtual EncoderConfig default_encoder() const = 0;
};

struct CartPoleParams {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force = 10.0;
  double tau = 0.02;
  double x_limit = 2.4;
  double theta_limit = 12.0 * std::numbers::pi / 180.0;
  double reset_range = 0.05;
};

/**
 * Pole balancing on a cart, Euler-integrated with the canonical constants.
 * Actions push the cart with force -F (0) or +F (1); every step pays reward
 * 1 and the episode terminates once |x| or |theta| leaves the limits.
 */
class CartPole final : public Env {
 public:
  explicit CartPole(CartPoleParams params = {}) : params_(params) {}

  std::vector<double> reset(Rng& rng) override {
    x_ = rng.uniform(-params_.reset_range, params_.reset_range);
    x_dot_ = rng.uniform(-params_.reset_range, params_.reset_range);
    theta_ = rng.uniform(-params_.reset_range, params_.reset_range);
    theta_dot_ = rng.uniform(-params_.reset_range, params_.reset_range);
    done_ = false;
    return observation();
  }

  /// Deterministic restart from an explicit state.
  void reset_to(double x, double x_dot, double theta, double theta_dot) {
    x_ = x;
    x_dot_ = x_dot;
    theta_ = theta;
    theta_dot_ = theta_dot;
    done_ = false;
  }

  EnvStep step(int action) override {
    if (done_) throw std::logic_error("CartPole::step: episode already terminal");
    if (action != 0 && action != 1)
      throw std::invalid_argument("CartPole::step: action out of range");
    const double force = action == 1 ? params_.force : -params_.force;
    const double total_mass = params_.cart_mass + params_.pole_mass;
    const double pml = params_.pole_mass * params_.half_length;
    const double cos_t = std::cos(theta_);
    const double sin_t = std::sin(theta_);
    const double temp = (force + pml * theta_dot_ * theta_dot_ * sin_t) / total_mass;
    const double theta_acc =
        (params_.gravity * sin_t - cos_t * temp) /
        (params_.half_length * (4.0 / 3.0 - params_.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pml * theta_acc * cos_t / total_mass;

    x_ += params_.tau * x_dot_;
    x_dot_ += params_.tau * x_acc;
    theta_ += params_.tau * theta_dot_;
    theta_dot_ += params_.tau * theta_acc;

    done_ = std::abs(x_) > params_.x_limit || std::abs(theta_) > params_.theta_limit;
    return {observation(), 1.0, done_, false};
  }

  int num_actions() const override { return 2; }
  std::size_t observation_size() const override { return 4; }
  bool done() const override { return done_; }
  bool episode_solved(long, long) const override { return !done_; }
  EncoderConfig default_encoder() const override { return cartpole_boxes_config(); }

  std::vector<double> observation() const { return {x_, x_dot_, theta_, theta_dot_}; }

  /// Total mechanical energy of the modeled cart/rod system (diagnostic;
  /// conserved by the continuous dynamics when force = 0).
  double mechanical_energy() const {
    const double mc = params_.cart_mass;
    const double mp = params_.pole_mass;
    const double l = params_.half_length;
    const double kinetic = 0.5 * (mc + mp) * x_dot_ * x_dot_ +
                           mp * l * theta_dot_ * x_dot_ * std::cos(theta_) +
                           (2.0 / 3.0) * mp * l * l * theta_dot_ * theta_dot_;
    const double potential = mp * params_.gravity * l * std::cos(theta_);
    return kinetic + potential;
  }

 private:
  CartPoleParams params_;
  double x_ = 0.0, x_dot_ = 0.0, theta_ = 0.0, theta_dot_ = 0.0;
  bool done_ = true;
};

struct LanderParams {
  double gravity = 1.62;
  double main_accel = 4.0;
  double side_accel = 0.4;
  double side_torque = 4.0;
  double tau = 0.02;
  double start_height = 1.3;
  double reset_impulse = 0.25;
  double pad_half_width = 0.3;
  double safe_vx = 0.5;
  double safe_vy = 0.5;
  double safe_angle = 0.3;
  double x_bound = 1.5;
  double y_bound = 1.5;
  double distance_coeff = 100.0;
  double speed_coeff = 100.0;
  double angle_coeff = 100.0;
  double main_cost = 0.3;
  double side_cost = 0.03;
  double land_bonus = 100.0;
  double crash_penalty = 100.0;
};

struct LanderState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double angle = 0.0, vangle = 0.0;
  bool left_contact = false, right_contact = false;
};

/**
 * Simplified planar lander. Four actions: noop, left engine, main engine,
 * right engine. The per-step reward is the change in a potential shaped
 * toward a soft centered touchdown (distance, speed and angle terms) minus
 * engine costs; landing on the pad within the soft-contact envelope pays
 * +100, crashing or leaving the play area pays -100.
 */
class LunarLander final : public Env {
 public:
  explicit LunarLander(LanderParams params = {}) : params_(params) {}

  std::vector<double> reset(Rng& rng) override {
    state_ = LanderState{};
    state_.y = params_.start_height;
    state_.vx = rng.uniform(-params_.reset_impulse, params_.reset_impulse);
    state_.vy = rng.uniform(-params_.reset_impulse, params_.reset_impulse);
    state_.vangle = rng.uniform(-params_.reset_impulse, params_.reset_impulse);
    done_ = false;
    landed_ = false;
    return observation();
  }

  void reset_to(const LanderState& state) {
    state_ = state;
    done_ = false;
    landed_ = false;
  }

  EnvStep step(int action) override {
    if (done_) throw std::logic_error("LunarLander::step: episode already terminal");
    if (action < 0 || action > 3)
      throw std::invalid_argument("LunarLander::step: action out of range");

    double ax = 0.0;
    double ay = -params_.gravity;
    double aang = 0.0;
    double cost = 0.0;
    const double cos_t = std::cos(state_.angle);
    const double sin_t = std::sin(state_.angle);
    switch (action) {
      case 1:  // left engine: torque ccw plus thrust along +body-x
        aang += params_.side_torque;
        ax += params_.side_accel * cos_t;
        ay += params_.side_accel * sin_t;
        cost = params_.side_cost;
        break;
      case 2:  // main engine: thrust along body-up
        ax += params_.main_accel * -sin_t;
        ay += params_.main_accel * cos_t;
        cost = params_.main_cost;
        break;
      case 3:  // right engine mirrors the left one
        aang -= params_.side_torque;
        ax -= params_.side_accel * cos_t;
        ay -= params_.side_accel * sin_t;
        cost = params_.side_cost;
        break;
      default: break;
    }

    const double shaping_before = shaping();
    state_.x += params_.tau * state_.vx;
    state_.y += params_.tau * state_.vy;
    state_.angle += params_.tau * state_.vangle;
    state_.vx += params_.tau * ax;
    state_.vy += params_.tau * ay;
    state_.vangle += params_.tau * aang;

    double reward = -cost;
    if (state_.y <= 0.0) {
      state_.y = 0.0;
      const bool soft = std::abs(state_.vx) <= params_.safe_vx &&
                        std::abs(state_.vy) <= params_.safe_vy &&
                        std::abs(state_.angle) <= params_.safe_angle;
      const bool on_pad = std::abs(state_.x) <= params_.pad_half_width;
      done_ = true;
      if (soft && on_pad) {
        landed_ = true;
        state_.left_contact = state_.right_contact = true;
        state_.vx = state_.vy = state_.vangle = 0.0;
        reward += params_.land_bonus;
      } else {
        reward -= params_.crash_penalty;
      }
    } else if (std::abs(state_.x) > params_.x_bound || state_.y > params_.y_bound) {
      done_ = true;
      reward -= params_.crash_penalty;
    }
    reward += shaping() - shaping_before;
    return {observation(), reward, done_, false};
  }

  int num_actions() const override { return 4; }
  std::size_t observation_size() const override { return 8; }
  bool done() const override { return done_; }
  bool episode_solved(long, long) const override { return landed_; }
  EncoderConfig default_encoder() const override { return lander_grid_config(); }

  std::vector<double> observation() const {
    return {state_.x,     state_.y,      state_.vx,
            state_.vy,    state_.angle,  state_.vangle,
            state_.left_contact ? 1.0 : 0.0, state_.right_contact ? 1.0 : 0.0};
  }
  const LanderState& state() const { return state_; }

 private:
  double shaping() const {
    const double dist = std::sqrt(state_.x * state_.x + state_.y * state_.y);
    const double speed = std::sqrt(state_.vx * state_.vx + state_.vy * state_.vy);
    return -params_.distance_coeff * dist - params_.speed_coeff * speed -
           params_.angle_coeff * std::abs(state_.angle);
  }

  LanderParams params_;
  LanderState state_;
  bool done_ = true;
  bool landed_ = false;
};

/**
 * Episodic wrapper around an exact tabular MDP: the observation is the state
 * id, transitions are sampled from the spec's tensor and entering a state
 * listed in `terminals` ends the episode.
 */
class TabularEnv final : public Env {
 public:
  explicit TabularEnv(MdpSpec mdp) : mdp_(std::move(mdp)), rng_(0) { mdp_.validate(); }

  std::vector<double> reset(Rng& rng) override {
    rng_ = Rng(rng.next_u64());
    const Eigen::VectorXd start = restart_distribution(mdp_);
    const double u = rng_.next_uniform();
    double cum = 0.0;
    state_ = mdp_.num_states - 1;
    for (int s = 0; s < mdp_.num_states; ++s) {
      cum += start(s);
      if (u < cum) {
        state_ = s;
        break;
      }
    }
    done_ = false;
    return {static_cast<double>(state_)};
  }

  EnvStep step(int action) override {
    if (done_) throw std::logic_error("TabularEnv::step: episode already terminal");
    if (action < 0 || action >= mdp_.num_actions)
      throw std::invalid_argument("TabularEnv::step: action out of range");
    const double reward = mdp_.r(state_, action);
    const double u = rng_.next_uniform();
    double cum = 0.0;
    int next = mdp_.num_states - 1;
    for (int s2 = 0; s2 < mdp_.num_states; ++s2) {
      cum += mdp_.p(state_, action, s2);
      if (u < cum) {
        next = s2;
        break;
      }
    }
    state_ = next;
    done_ = mdp_.is_terminal(next);
    return {{static_cast<double>(state_)}, reward, done_, false};
  }

  int num_actions() const override { return mdp_.num_actions; }
  std::size_t observation_size() const override { return 1; }
  bool done() const override { return done_; }
  bool episode_solved(long, long) const override { return done_; }
  EncoderConfig default_encoder() const override {
    return tabular_encoder_config(static_cast<std::uint32_t>(mdp_.num_states));
  }

  int state() const { return state_; }

 private:
  MdpSpec mdp_;
  Rng rng_;
  int state_ = 0;
  bool done_ = true;
};

inline std::unique_ptr<Env> make_env(const std::string& kind) {
  if (kind == "cartpole") return std::make_unique<CartPole>();
  if (kind == "lander") return std::make_unique<LunarLander>();
  throw std::invalid_argument("env: unknown kind '" + kind + "'");
}

}  // namespace actgrad
