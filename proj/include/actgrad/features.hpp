#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "actgrad/sparse.hpp"

namespace actgrad {

enum class EncoderKind { kBoxes, kUniformGrid, kTabularOneHot };

inline std::string to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kBoxes: return "boxes";
    case EncoderKind::kUniformGrid: return "uniform-grid";
    case EncoderKind::kTabularOneHot: return "tabular-one-hot";
  }
  throw std::invalid_argument("unknown encoder kind");
}

inline EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "boxes") return EncoderKind::kBoxes;
  if (s == "uniform-grid") return EncoderKind::kUniformGrid;
  if (s == "tabular-one-hot") return EncoderKind::kTabularOneHot;
  throw std::invalid_argument("encoder: unknown kind '" + s + "'");
}

/**
 * Observation-space descriptor for one-hot discretizations.
 *
 * boxes:           `splits[d]` holds the sorted interior thresholds of
 *                  dimension d; a value lands in region = #(thresholds <= value),
 *                  so out-of-range observations clamp into the boundary cells.
 * uniform-grid:    `low`/`high`/`bins` per dimension, clamped at the bounds.
 * tabular-one-hot: the observation is a single integer state id < num_states.
 */
struct EncoderConfig {
  EncoderKind kind = EncoderKind::kTabularOneHot;
  std::vector<std::vector<double>> splits;
  std::vector<double> low;
  std::vector<double> high;
  std::vector<std::uint32_t> bins;
  std::uint32_t num_states = 0;
};

class Encoder {
 public:
  explicit Encoder(EncoderConfig config) : config_(std::move(config)) {
    switch (config_.kind) {
      case EncoderKind::kBoxes: {
        if (config_.splits.empty())
          throw std::invalid_argument("encoder: boxes needs per-dimension splits");
        std::uint64_t d = 1;
        for (const auto& s : config_.splits) {
          if (!std::is_sorted(s.begin(), s.end()))
            throw std::invalid_argument("encoder: boxes splits must be sorted");
          d *= s.size() + 1;
        }
        dim_ = checked_dim(d);
        obs_size_ = config_.splits.size();
        break;
      }
      case EncoderKind::kUniformGrid: {
        const std::size_t n = config_.bins.size();
        if (n == 0 || config_.low.size() != n || config_.high.size() != n)
          throw std::invalid_argument("encoder: grid needs matching low/high/bins");
        std::uint64_t d = 1;
        for (std::size_t i = 0; i < n; ++i) {
          if (config_.bins[i] == 0)
            throw std::invalid_argument("encoder: grid bins must be positive");
          if (!(config_.low[i] < config_.high[i]))
            throw std::invalid_argument("encoder: grid bounds must satisfy low < high");
          d *= config_.bins[i];
        }
        dim_ = checked_dim(d);
        obs_size_ = n;
        break;
      }
      case EncoderKind::kTabularOneHot: {
        if (config_.num_states == 0)
          throw std::invalid_argument("encoder: tabular needs num_states > 0");
        dim_ = config_.num_states;
        obs_size_ = 1;
        break;
      }
    }
  }

  /// One-hot cell encoding of the observation; clamps out-of-bounds values
  /// into the boundary cells. Throws on size mismatch or non-finite input.
  SparseVec encode(std::span<const double> observation) const {
    if (observation.size() != obs_size_)
      throw std::invalid_argument("encode: observation size mismatch");
    for (double v : observation)
      if (!std::isfinite(v)) throw std::invalid_argument("encode: non-finite observation");

    std::uint32_t cell = 0;
    switch (config_.kind) {
      case EncoderKind::kBoxes:
        for (std::size_t d = 0; d < obs_size_; ++d) {
          const auto& s = config_.splits[d];
          const auto region = static_cast<std::uint32_t>(
              std::upper_bound(s.begin(), s.end(), observation[d]) - s.begin());
          cell = cell * static_cast<std::uint32_t>(s.size() + 1) + region;
        }
        break;
      case EncoderKind::kUniformGrid:
        for (std::size_t d = 0; d < obs_size_; ++d) {
          const double span = config_.high[d] - config_.low[d];
          const double t = (observation[d] - config_.low[d]) / span;
          auto region = static_cast<std::int64_t>(std::floor(t * config_.bins[d]));
          region = std::clamp<std::int64_t>(region, 0, config_.bins[d] - 1);
          cell = cell * config_.bins[d] + static_cast<std::uint32_t>(region);
        }
        break;
      case EncoderKind::kTabularOneHot: {
        const double v = observation[0];
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9 || r < 0.0 || r >= config_.num_states)
          throw std::invalid_argument("encode: tabular observation is not a valid state id");
        cell = static_cast<std::uint32_t>(r);
        break;
      }
    }
    return SparseVec::one_hot(cell, dim_);
  }

  std::uint32_t dim() const { return dim_; }
  std::size_t observation_size() const { return obs_size_; }
  const EncoderConfig& config() const { return config_; }

 private:
  static std::uint32_t checked_dim(std::uint64_t d) {
    if (d == 0 || d > (1u << 28))
      throw std::invalid_argument("encoder: cell count out of range");
    return static_cast<std::uint32_t>(d);
  }

  EncoderConfig config_;
  std::uint32_t dim_ = 0;
  std::size_t obs_size_ = 0;
};

/**
 * Block one-hot layout x(s, a): dim = num_actions * state_dim, with x(s)
 * copied into block `action` (index = action * state_dim + i). Blocks of
 * different actions are disjoint, so the vectors are orthogonal.
 */
inline SparseVec state_action_features(const SparseVec& state_features, int action,
                                       int num_actions) {
  if (action < 0 || action >= num_actions)
    throw std::invalid_argument("state_action_features: action out of range");
  SparseVec v(static_cast<std::uint32_t>(num_actions) * state_features.dim);
  v.entries.reserve(state_features.entries.size());
  const std::uint32_t offset = static_cast<std::uint32_t>(action) * state_features.dim;
  for (const auto& [idx, val] : state_features.entries) v.entries.emplace_back(offset + idx, val);
  return v;
}

/// The canonical Boxes partition for Cart Pole: 3 x-regions (splits +-0.8 m),
/// 3 xdot-regions (+-0.5 m/s), 6 theta-regions (splits +-6, +-1, 0 degrees)
/// and 3 thetadot-regions (+-50 deg/s) -> 162 cells, row-major.
inline EncoderConfig cartpole_boxes_config() {
  constexpr double kDeg = std::numbers::pi / 180.0;
  EncoderConfig c;
  c.kind = EncoderKind::kBoxes;
  c.splits = {
      {-0.8, 0.8},
      {-0.5, 0.5},
      {-6.0 * kDeg, -1.0 * kDeg, 0.0, 1.0 * kDeg, 6.0 * kDeg},
      {-50.0 * kDeg, 50.0 * kDeg},
  };
  return c;
}

/// Uniform grid over the 8-dimensional lander observation with per-dimension
/// bin counts (5,5,4,4,4,4,2,2) clamped to the nominal bounds.
inline EncoderConfig lander_grid_config() {
  EncoderConfig c;
  c.kind = EncoderKind::kUniformGrid;
  c.low = {-1.5, 0.0, -2.0, -2.0, -std::numbers::pi, -4.0, 0.0, 0.0};
  c.high = {1.5, 1.5, 2.0, 2.0, std::numbers::pi, 4.0, 1.0, 1.0};
  c.bins = {5, 5, 4, 4, 4, 4, 2, 2};
  return c;
}

inline EncoderConfig tabular_encoder_config(std::uint32_t num_states) {
  EncoderConfig c;
  c.kind = EncoderKind::kTabularOneHot;
  c.num_states = num_states;
  return c;
}

inline void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = nlohmann::json{{"kind", to_string(c.kind)}};
  switch (c.kind) {
    case EncoderKind::kBoxes:
      j["splits"] = c.splits;
      break;
    case EncoderKind::kUniformGrid:
      j["low"] = c.low;
      j["high"] = c.high;
      j["bins"] = c.bins;
      break;
    case EncoderKind::kTabularOneHot:
      j["num_states"] = c.num_states;
      break;
  }
}

inline void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c = EncoderConfig{};
  c.kind = encoder_kind_from_string(j.at("kind").get<std::string>());
  switch (c.kind) {
    case EncoderKind::kBoxes:
      j.at("splits").get_to(c.splits);
      break;
    case EncoderKind::kUniformGrid:
      j.at("low").get_to(c.low);
      j.at("high").get_to(c.high);
      j.at("bins").get_to(c.bins);
      break;
    case EncoderKind::kTabularOneHot:
      j.at("num_states").get_to(c.num_states);
      break;
  }
}

}  // namespace actgrad
