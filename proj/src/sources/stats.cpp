#include "foundry/sources/stats.hpp"

#include <algorithm>

namespace foundry::sources {

GenerationStats summarize(int round, int samples, int legal, const std::vector<reward::RewardReport>& reports) {
  GenerationStats s;
  s.round = round;
  s.samples = samples;
  s.legal_fraction = samples > 0 ? static_cast<double>(legal) / samples : 0.0;
  int scored = 0;
  int unique = 0;
  double sum = 0;
  for (const auto& r : reports) {
    if (r.score_failed) {
      ++s.failed;
      continue;
    }
    ++scored;
    sum += r.reward;
    s.max_reward = std::max(s.max_reward, r.reward);
    unique += r.uniqueness.unique;
  }
  if (scored > 0) {
    s.mean_reward = sum / scored;
    s.unique_fraction = static_cast<double>(unique) / scored;
  }
  return s;
}

}  // namespace foundry::sources
