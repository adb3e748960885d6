#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/board/movegen.hpp"

namespace foundry::pipeline {

class FileNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HeaderMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One puzzle. fen is the position the solver faces (after the opponent's
// first move from the dump), moves is the solver line from there.
struct CorpusRecord {
  std::string puzzle_id;
  std::string fen;
  std::vector<std::string> moves;  // coordinate notation
  int rating = 0;
  std::vector<std::string> themes;

  Position position() const { return parse_fen(fen); }
  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct SkippedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  std::vector<SkippedRow> skipped;
  std::size_t rows = 0;
  // FEN fields that reproduce exactly through parse and serialize.
  std::size_t fen_round_trips = 0;
};

// Lichess puzzle dump layout: PuzzleId,FEN,Moves,Rating,RatingDeviation,
// Popularity,NbPlays,Themes,GameUrl and optionally OpeningTags.
IngestResult ingest_lichess_csv(const std::string& path);

// JSON lines, one record each.
void save_corpus(const std::vector<CorpusRecord>& records, const std::string& path);
std::vector<CorpusRecord> load_corpus(const std::string& path);

}  // namespace foundry::pipeline
