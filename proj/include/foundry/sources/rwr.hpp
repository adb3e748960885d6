#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "foundry/sources/ngram.hpp"
#include "foundry/sources/stats.hpp"

namespace foundry::sources {

struct RwrConfig {
  int rounds = 3;  // refits; rounds + 1 sampling rounds are recorded
  int samples_per_round = 500;
  double keep_quantile = 0.1;
  double replay_mix = 0.5;  // fraction of the original corpus replayed on each refit
  int order = 8;
  double smoothing = 0.1;
  double temperature = kDefaultTemperature;
  std::uint64_t seed = 1;
};

struct RwrSample {
  Position position;
  reward::RewardReport report;
  int round;
};

struct RwrResult {
  NgramModel model;
  std::vector<GenerationStats> stats;
  std::vector<RwrSample> samples;  // legal samples of every round, in draw order
};

// Sample, score, keep the top quantile, refit on the replayed corpus plus every
// round's kept samples, repeat. Each round's kept set is repeated in proportion
// to reward until it weighs as much as the replayed corpus.
RwrResult rwr_iterate(const std::vector<std::string>& corpus, const RwrConfig& cfg, const BatchScorer& score);

}  // namespace foundry::sources
