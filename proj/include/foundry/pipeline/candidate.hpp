#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "foundry/reward/reward.hpp"
#include "foundry/sources/stats.hpp"
#include "foundry/themes/themes.hpp"

namespace foundry::pipeline {

using nlohmann::json;

// Board, side, castling and en passant of the normalized FEN. Clocks are
// dropped so transpositions with different move counters share an id.
std::string canonical_fen(const Position& p);
// First 16 hex digits of SHA-256 over canonical_fen.
std::string candidate_id(const Position& p);

enum class Decision { Accepted, Rejected };
std::string to_string(Decision d);
std::optional<Decision> decision_from_string(const std::string& s);

struct Verdict {
  std::string candidate_id;
  Decision decision = Decision::Accepted;
  std::string note;
  std::string reviewer;
  std::uint64_t at = 0;  // log sequence number

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

enum class ExportPolicy { AnyAccept, Unanimous };
std::optional<ExportPolicy> export_policy_from_string(const std::string& s);

struct CorpusNeighbor {
  std::string source_id;
  double similarity = 0;
  std::string fen;

  friend bool operator==(const CorpusNeighbor&, const CorpusNeighbor&) = default;
};

struct SearchCost {
  std::uint64_t nodes_total = 0;
  std::optional<Move> stable_move;
  std::optional<int> first_stable_depth;
  bool adversarial = false;
  std::uint64_t threshold = 0;
  std::optional<std::string> error;
};

struct PuzzleCandidate {
  std::string id;
  std::string fen;
  std::vector<std::string> sources;  // first-seen order
  std::uint64_t created_at = 0;

  std::optional<reward::RewardReport> reward_report;
  int strong_depth = 0;
  int weak_depth = 0;

  std::optional<std::vector<themes::ThemeLabel>> themes;

  std::optional<std::vector<CorpusNeighbor>> neighbors;
  bool duplicate = false;

  std::optional<SearchCost> search_cost;

  std::vector<Verdict> verdicts;  // latest per reviewer, ordered by reviewer

  Position position() const;
  bool has_theme(themes::Theme t) const;
  double max_similarity() const;
  // nullopt while no reviewer has decided.
  std::optional<Decision> status(ExportPolicy policy = ExportPolicy::AnyAccept) const;
};

std::string lichess_analysis_url(const std::string& fen);

// Coordinate notation without a position, e.g. "e7e8n".
Move move_from_uci_text(const std::string& text);

json to_json(const Move& m);
json to_json(const std::vector<Move>& line);
json to_json(const reward::RewardReport& r);
json to_json(const themes::ThemeLabel& l);
json to_json(const Verdict& v);
json to_json(const SearchCost& s);
json to_json(const sources::GenerationStats& s);
json to_json(const PuzzleCandidate& c);

reward::RewardReport report_from_json(const json& j);
themes::ThemeLabel theme_label_from_json(const json& j);
Verdict verdict_from_json(const json& j);
SearchCost search_cost_from_json(const json& j);
sources::GenerationStats stats_from_json(const json& j);
PuzzleCandidate candidate_from_json(const json& j);

}  // namespace foundry::pipeline
