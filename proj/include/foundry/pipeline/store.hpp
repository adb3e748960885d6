#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/pipeline/candidate.hpp"

namespace foundry::pipeline {

class LogFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownCandidate : public std::out_of_range {
 public:
  explicit UnknownCandidate(const std::string& id) : std::out_of_range("no candidate " + id) {}
};

// Event constructors. Every event is a JSON object with an "event" name; the
// journal adds "seq".
namespace events {
json candidate_added(const std::string& id, const std::string& fen, const std::string& source);
json scored(const std::string& id, const reward::RewardReport& report, int strong_depth, int weak_depth);
json labeled(const std::string& id, const std::vector<themes::ThemeLabel>& labels);
json novelty(const std::string& id, const std::vector<CorpusNeighbor>& neighbors, bool duplicate);
json probed(const std::string& id, const SearchCost& cost);
json verdict(const std::string& id, Decision decision, const std::string& note, const std::string& reviewer);
json generation_stats(const std::string& source, const sources::GenerationStats& stats);
}  // namespace events

struct StatsRecord {
  std::string source;
  sources::GenerationStats stats;
  std::uint64_t at = 0;
};

// In-memory state reconstructed from the event log.
class Store {
 public:
  // Throws LogFormatError on unknown events, bad payloads or out-of-order seq.
  void apply(const json& event);

  const PuzzleCandidate* find(const std::string& id) const;
  const PuzzleCandidate& at(const std::string& id) const;
  const std::map<std::string, PuzzleCandidate>& candidates() const { return candidates_; }
  const std::vector<StatsRecord>& stats() const { return stats_; }
  std::uint64_t next_seq() const { return next_seq_; }

  // Full state as JSON, for identity checks.
  json snapshot() const;

 private:
  std::map<std::string, PuzzleCandidate> candidates_;
  std::vector<StatsRecord> stats_;
  std::uint64_t next_seq_ = 0;
};

Store replay(const std::string& path);

// Single writer over an append-only JSON-lines file. Reads take a shared lock,
// appends an exclusive one. A torn final line left by a crash is dropped on open.
class Journal {
 public:
  explicit Journal(std::string path);

  const std::string& path() const { return path_; }

  std::uint64_t append(json event);
  void append_all(std::vector<json> events);

  template <class F>
  auto read(F&& f) const {
    std::shared_lock lock(mu_);
    return f(store_);
  }

  // Appends candidate-added unless the candidate already lists this source.
  std::string add_candidate(const Position& p, const std::string& source);

  // Appends a verdict unless the reviewer's latest one has the same decision
  // and note. Returns the updated candidate.
  PuzzleCandidate record_verdict(const std::string& id, Decision decision, const std::string& note, const std::string& reviewer);

 private:
  std::uint64_t append_locked(json& event);

  std::string path_;
  std::ofstream out_;
  Store store_;
  mutable std::shared_mutex mu_;
};

}  // namespace foundry::pipeline
