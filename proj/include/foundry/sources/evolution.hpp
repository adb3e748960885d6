#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "foundry/sources/stats.hpp"

namespace foundry::sources {

enum class MutationKind { MovePiece, AddPiece, RemovePiece, ReplacePiece, FlipSide };
inline constexpr int kMutationKinds = 5;

std::string to_string(MutationKind k);

struct EvoConfig {
  int population = 128;
  int elite = 8;
  int tournament = 4;
  std::array<double, kMutationKinds> weights{0.35, 0.20, 0.20, 0.15, 0.10};  // indexed by MutationKind
  int max_mutations = 3;  // per child, P(k) proportional to 2^-k for k = 1..max
  int generations = 200;
  bool realism_enforced = true;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct MutationResult {
  Position position;
  bool noop = false;
};

MutationResult mutate(const Position& p, std::mt19937_64& rng, const EvoConfig& cfg);

struct Individual {
  Position position;
  reward::RewardReport report;
  int born = 0;  // generation the position first appeared
};

struct EvolutionResult {
  std::vector<Individual> population;  // final generation, best first
  std::vector<GenerationStats> stats;  // one per generation, including generation 0
};

using GenerationCallback = std::function<void(const GenerationStats&)>;

EvolutionResult evolve(const std::vector<Position>& seeds, const EvoConfig& cfg, const BatchScorer& score,
                       const GenerationCallback& on_generation = {});

}  // namespace foundry::sources
