#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "actgrad/features.hpp"
#include "actgrad/rng.hpp"
#include "actgrad/sparse.hpp"

using namespace actgrad;

TEST(SparseVec, one_hot_and_validate) {
  const SparseVec v = SparseVec::one_hot(3, 5);
  EXPECT_EQ(v.dim, 5u);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.entries[0].first, 3u);
  EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
  EXPECT_NO_THROW(validate(v));
  EXPECT_THROW(SparseVec::one_hot(5, 5), std::invalid_argument);

  SparseVec bad(4);
  bad.entries = {{2, 1.0}, {1, 1.0}};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad.entries = {{1, 0.0}};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad.entries = {{7, 1.0}};
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(SparseVec, make_sparse_merges_and_drops_zeros) {
  const SparseVec v = make_sparse(6, {{4, 2.0}, {1, 1.0}, {4, -2.0}, {2, 0.5}});
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_EQ(v.entries[0].first, 1u);
  EXPECT_EQ(v.entries[1].first, 2u);
  EXPECT_NO_THROW(validate(v));
}

TEST(SparseVec, dot_symmetric_and_nonnegative) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t dim = 2 + static_cast<std::uint32_t>(rng.next_below(20));
    std::vector<std::pair<std::uint32_t, double>> ta, tb;
    for (std::uint32_t k = 0; k < dim; ++k) {
      if (rng.next_uniform() < 0.5) ta.emplace_back(k, rng.uniform(-2.0, 2.0));
      if (rng.next_uniform() < 0.5) tb.emplace_back(k, rng.uniform(-2.0, 2.0));
    }
    const SparseVec a = make_sparse(dim, ta);
    const SparseVec b = make_sparse(dim, tb);
    EXPECT_DOUBLE_EQ(dot(a, b), dot(b, a));
    EXPECT_GE(dot(a, a), 0.0);
  }
}

// Independent hand evaluation of the boxes partition on the zero observation:
// x = 0 -> middle of 3 regions (splits +-0.8), xdot = 0 -> middle of 3,
// theta = 0 -> region [0 deg, 1 deg) which is region 3 of 6, thetadot = 0 ->
// middle of 3. Row-major over (3,3,6,3).
TEST(Encoder, cartpole_boxes_zero_observation) {
  const Encoder enc(cartpole_boxes_config());
  EXPECT_EQ(enc.dim(), 162u);
  const std::uint32_t expected = ((1u * 3 + 1) * 6 + 3) * 3 + 1;  // = 82
  EXPECT_EQ(expected, 82u);
  const std::vector<double> obs{0.0, 0.0, 0.0, 0.0};
  const SparseVec v = enc.encode(obs);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.entries[0].first, expected);
  EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
}

TEST(Encoder, cartpole_boxes_clamps_out_of_bounds) {
  const Encoder enc(cartpole_boxes_config());
  const std::vector<double> obs{10.0, 0.0, 0.0, 0.0};  // x far beyond +2.4
  const SparseVec v = enc.encode(obs);
  ASSERT_EQ(v.nnz(), 1u);
  const std::uint32_t expected = ((2u * 3 + 1) * 6 + 3) * 3 + 1;  // rightmost x-region
  EXPECT_EQ(v.entries[0].first, expected);
  EXPECT_DOUBLE_EQ(v.entries[0].second, 1.0);
}

TEST(Encoder, tabular_identity) {
  const Encoder enc(tabular_encoder_config(5));
  const std::vector<double> obs{3.0};
  const SparseVec v = enc.encode(obs);
  EXPECT_EQ(v.dim, 5u);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.entries[0].first, 3u);
  EXPECT_THROW(enc.encode(std::vector<double>{3.5}), std::invalid_argument);
  EXPECT_THROW(enc.encode(std::vector<double>{-1.0}), std::invalid_argument);
  EXPECT_THROW(enc.encode(std::vector<double>{5.0}), std::invalid_argument);
}

TEST(Encoder, uniform_grid_row_major_layout) {
  EncoderConfig c;
  c.kind = EncoderKind::kUniformGrid;
  c.low = {0.0, 0.0};
  c.high = {1.0, 1.0};
  c.bins = {2, 3};
  const Encoder enc(c);
  EXPECT_EQ(enc.dim(), 6u);
  // x region floor(0.6*2)=1, y region floor(0.34*3)=1 -> cell 1*3+1
  const SparseVec v = enc.encode(std::vector<double>{0.6, 0.34});
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_EQ(v.entries[0].first, 4u);
  // boundary value clamps into the last bin
  const SparseVec top = enc.encode(std::vector<double>{1.0, 1.0});
  EXPECT_EQ(top.entries[0].first, 5u);
}

TEST(Encoder, rejects_bad_observations) {
  const Encoder enc(cartpole_boxes_config());
  EXPECT_THROW(enc.encode(std::vector<double>{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(enc.encode(std::vector<double>{0.0, 0.0, std::nan(""), 0.0}),
               std::invalid_argument);
  EXPECT_THROW(
      enc.encode(std::vector<double>{0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0}),
      std::invalid_argument);
}

TEST(Encoder, coverage_every_encoding_is_one_hot) {
  const Encoder boxes(cartpole_boxes_config());
  const Encoder grid(lander_grid_config());
  Rng rng(42);
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> obs{rng.uniform(-2.4, 2.4), rng.uniform(-3.0, 3.0),
                                  rng.uniform(-0.21, 0.21), rng.uniform(-2.0, 2.0)};
    const SparseVec v = boxes.encode(obs);
    ASSERT_EQ(v.nnz(), 1u);
    ASSERT_LT(v.entries[0].first, boxes.dim());
    ASSERT_DOUBLE_EQ(v.entries[0].second, 1.0);
  }
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> obs{rng.uniform(-1.5, 1.5), rng.uniform(0.0, 1.5),
                                  rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                  rng.uniform(-std::numbers::pi, std::numbers::pi),
                                  rng.uniform(-4.0, 4.0), rng.next_uniform() < 0.5 ? 0.0 : 1.0,
                                  rng.next_uniform() < 0.5 ? 0.0 : 1.0};
    const SparseVec v = grid.encode(obs);
    ASSERT_EQ(v.nnz(), 1u);
    ASSERT_LT(v.entries[0].first, grid.dim());
  }
}

TEST(Encoder, deterministic) {
  const Encoder enc(cartpole_boxes_config());
  const std::vector<double> obs{0.31, -0.7, 0.02, 0.4};
  const SparseVec a = enc.encode(obs);
  const SparseVec b = enc.encode(obs);
  EXPECT_EQ(a.entries, b.entries);
}

TEST(StateActionFeatures, block_layout) {
  const SparseVec x = SparseVec::one_hot(2, 4);
  const SparseVec sa = state_action_features(x, 1, 2);
  EXPECT_EQ(sa.dim, 8u);
  ASSERT_EQ(sa.nnz(), 1u);
  EXPECT_EQ(sa.entries[0].first, 6u);

  const SparseVec x0 = SparseVec::one_hot(0, 3);
  const SparseVec sa0 = state_action_features(x0, 0, 3);
  EXPECT_EQ(sa0.dim, 9u);
  EXPECT_EQ(sa0.entries[0].first, 0u);

  EXPECT_THROW(state_action_features(x, 2, 2), std::invalid_argument);
  EXPECT_THROW(state_action_features(x, -1, 2), std::invalid_argument);
}

TEST(StateActionFeatures, different_actions_are_orthogonal) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::uint32_t dim = 2 + static_cast<std::uint32_t>(rng.next_below(10));
    std::vector<std::pair<std::uint32_t, double>> terms;
    for (std::uint32_t k = 0; k < dim; ++k)
      if (rng.next_uniform() < 0.7) terms.emplace_back(k, rng.uniform(-1.0, 1.0));
    const SparseVec x = make_sparse(dim, terms);
    EXPECT_DOUBLE_EQ(dot(state_action_features(x, 0, 2), state_action_features(x, 1, 2)), 0.0);
  }
}

TEST(EncoderConfig, json_round_trip) {
  for (const EncoderConfig& original :
       {cartpole_boxes_config(), lander_grid_config(), tabular_encoder_config(7)}) {
    const nlohmann::json j = original;
    const auto parsed = j.get<EncoderConfig>();
    EXPECT_EQ(parsed.kind, original.kind);
    EXPECT_EQ(parsed.splits, original.splits);
    EXPECT_EQ(parsed.low, original.low);
    EXPECT_EQ(parsed.high, original.high);
    EXPECT_EQ(parsed.bins, original.bins);
    EXPECT_EQ(parsed.num_states, original.num_states);
    EXPECT_EQ(Encoder(parsed).dim(), Encoder(original).dim());
  }
}

TEST(EncoderConfig, invalid_configs_rejected) {
  EncoderConfig c;
  c.kind = EncoderKind::kUniformGrid;
  c.low = {0.0};
  c.high = {0.0};  // low == high
  c.bins = {3};
  EXPECT_THROW(Encoder{c}, std::invalid_argument);
  c.high = {1.0};
  c.bins = {0};
  EXPECT_THROW(Encoder{c}, std::invalid_argument);
  EXPECT_THROW(Encoder{tabular_encoder_config(0)}, std::invalid_argument);
}
