#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "luca/sim_env.hpp"

namespace luca {

struct Rule {
  enum class Kind { FIFO, SPT, MOR, MWKR, RANDOM };
  Kind kind = Kind::FIFO;
  std::uint64_t seed = 0;  // RANDOM only

  static Rule fifo() { return {Kind::FIFO, 0}; }
  static Rule spt() { return {Kind::SPT, 0}; }
  static Rule mor() { return {Kind::MOR, 0}; }
  static Rule mwkr() { return {Kind::MWKR, 0}; }
  static Rule random(std::uint64_t seed) { return {Kind::RANDOM, seed}; }

  // lowercase CLI token; RANDOM parses from "random"
  static std::optional<Rule> from_token(const std::string& token);
  std::string token() const;
};

// One dispatching decision. Job selection per rule, machine selection by
// earliest finish, ties by lowest job id then lowest machine id.
// RANDOM draws uniformly over legal actions with the supplied rng.
Action dispatch(const State& state, const Rule& rule, Rng* rng = nullptr);

struct RolloutResult {
  Time makespan = 0.0;
  Emission emission = 0.0;
  State final_state;
};

RolloutResult rollout_heuristic(const Instance& inst, const Rule& rule);
RolloutResult random_policy_rollout(const Instance& inst, std::uint64_t seed);

}  // namespace luca
