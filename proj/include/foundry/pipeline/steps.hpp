#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/novelty/index.hpp"
#include "foundry/pipeline/corpus.hpp"
#include "foundry/pipeline/store.hpp"
#include "foundry/sources/evolution.hpp"
#include "foundry/sources/ngram.hpp"
#include "foundry/sources/rwr.hpp"
#include "foundry/uci/pool.hpp"

namespace foundry::pipeline {

class EnginesNotConfigured : public std::runtime_error {
 public:
  EnginesNotConfigured() : std::runtime_error("no engines configured: pass --strong-engine and --weak-engine") {}
};

// The engines stopped answering; everything before the failing batch is in the log.
class ScoringAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineSettings {
  std::string strong_path;
  std::string weak_path;
  int strong_depth = 18;
  int weak_depth = 4;
  int workers = 1;
  int hash_mb = 64;

  bool configured() const { return !strong_path.empty() && !weak_path.empty(); }
  // Throws EnginesNotConfigured.
  void require() const;
  uci::EngineProfile strong_profile() const;
  uci::EngineProfile weak_profile() const;
  reward::RewardConfig reward_config() const;
};

sources::BatchScorer pool_scorer(uci::EnginePool& pool, const reward::RewardConfig& cfg);

struct StepReport {
  std::size_t processed = 0;
  std::size_t failed = 0;
};

// Candidates are handled in id order and their events appended in batches of
// `batch`, so an aborted run resumes where the log ends. A batch in which every
// candidate failed is checked against a trivial analysis; if that fails too the
// batch is dropped and ScoringAborted thrown.
StepReport score_pending(Journal& j, uci::EnginePool& pool, const reward::RewardConfig& cfg, std::size_t batch = 16);

// Labels scored, unlabeled candidates from their solution line. Candidates
// without a unique winning move get an empty label set.
StepReport label_pending(Journal& j, uci::EnginePool& pool, const themes::ThemeConfig& cfg = {}, std::size_t batch = 16);

// Records the k nearest corpus positions and the duplicate flag.
StepReport novelty_pending(Journal& j, const std::vector<CorpusRecord>& corpus, std::size_t k = 3,
                           double duplicate_threshold = novelty::kDuplicateThreshold);

struct NgramRun {
  std::vector<std::string> ids;  // one per legal sample, in draw order
  sources::GenerationStats stats;
};

// Samples n positions, then scores, labels and gates everything pending.
NgramRun run_generate_ngram(Journal& j, uci::EnginePool& pool, const EngineSettings& eng, const sources::NgramModel& model,
                            const std::vector<CorpusRecord>& corpus, int n, std::uint64_t seed,
                            double temperature = sources::kDefaultTemperature);

// Persists every legal scored sample as "rwr-round-<t>" with per-round stats.
sources::RwrResult run_generate_rwr(Journal& j, uci::EnginePool& pool, const EngineSettings& eng,
                                    const std::vector<CorpusRecord>& corpus, const sources::RwrConfig& cfg);

// Seeds are `seeds` corpus positions picked with the run seed. Persists the
// final population as "evolution-gen-<born>" with per-generation stats.
sources::EvolutionResult run_generate_evolution(Journal& j, uci::EnginePool& pool, const EngineSettings& eng,
                                                const std::vector<CorpusRecord>& corpus, const sources::EvoConfig& cfg,
                                                int seeds = 32);

// Deterministic sample of up to n corpus records.
std::vector<CorpusRecord> sample_corpus(const std::vector<CorpusRecord>& corpus, std::size_t n, std::uint64_t seed);

// Nearest-rank percentile (pct in (0, 100]) of an unsorted sample.
std::uint64_t percentile_threshold(std::vector<std::uint64_t> sample, double pct);

std::vector<std::uint64_t> measure_search_cost(uci::EnginePool& pool, const std::vector<Position>& positions,
                                               const std::vector<int>& schedule);

// Runs bestmove_stability on every scored, unprobed candidate and flags those
// whose node total exceeds the baseline percentile.
StepReport probe_search_cost(Journal& j, uci::EnginePool& pool, const std::vector<int>& schedule,
                             const std::vector<std::uint64_t>& baseline, double pct = 95.0);

}  // namespace foundry::pipeline
