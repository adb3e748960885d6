#pragma once

#include <functional>
#include <vector>

#include "foundry/reward/reward.hpp"

namespace foundry::sources {

// Scores a batch of positions, one report per input in order.
using BatchScorer = std::function<std::vector<reward::RewardReport>(const std::vector<Position>&)>;

struct GenerationStats {
  int round = 0;
  int samples = 0;
  double legal_fraction = 0;
  double mean_reward = 0;
  double max_reward = 0;
  double unique_fraction = 0;
  int failed = 0;
};

// Aggregates reports of legal samples; failed reports are counted, not averaged.
GenerationStats summarize(int round, int samples, int legal, const std::vector<reward::RewardReport>& reports);

}  // namespace foundry::sources
