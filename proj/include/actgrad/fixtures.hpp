#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "actgrad/mdp_oracle.hpp"

namespace actgrad {

/// Bundled golden MDP fixtures (JSON, same schema as MdpSpec serialization).

inline constexpr const char* kTwoStateMdpJson = R"json({
  "num_states": 2,
  "num_actions": 2,
  "gamma": 0.9,
  "transitions": [0.9, 0.1, 0.2, 0.8, 0.7, 0.3, 0.05, 0.95],
  "rewards": [1.0, 0.0, 0.5, -0.5]
})json";

inline constexpr const char* kChainMdpJson = R"json({
  "num_states": 3,
  "num_actions": 2,
  "gamma": 0.9,
  "transitions": [0.0, 1.0, 0.0, 1.0, 0.0, 0.0,
                  0.0, 0.0, 1.0, 1.0, 0.0, 0.0,
                  0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
  "rewards": [0.0, 0.2, 1.0, 0.0, 0.0, 0.0],
  "terminals": [2],
  "start": [1.0, 0.0, 0.0]
})json";

inline constexpr const char* kFourStateMdpJson = R"json({
  "num_states": 4,
  "num_actions": 2,
  "gamma": 0.85,
  "transitions": [0.5, 0.3, 0.1, 0.1, 0.1, 0.1, 0.4, 0.4,
                  0.25, 0.25, 0.25, 0.25, 0.6, 0.2, 0.1, 0.1,
                  0.1, 0.2, 0.3, 0.4, 0.3, 0.3, 0.2, 0.2,
                  0.05, 0.05, 0.45, 0.45, 0.2, 0.4, 0.2, 0.2],
  "rewards": [0.5, -0.25, 1.0, 0.0, -0.5, 0.75, 0.25, -1.0]
})json";

inline MdpSpec parse_mdp_fixture(const char* json_text) {
  return nlohmann::json::parse(json_text).get<MdpSpec>();
}

inline std::vector<std::pair<std::string, MdpSpec>> fixture_mdps() {
  return {{"two_state", parse_mdp_fixture(kTwoStateMdpJson)},
          {"chain3", parse_mdp_fixture(kChainMdpJson)},
          {"four_state", parse_mdp_fixture(kFourStateMdpJson)}};
}

}  // namespace actgrad
