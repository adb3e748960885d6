#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "foundry/board/position.hpp"

namespace foundry::novelty {

inline constexpr double kDuplicateThreshold = 0.85;

// One token per piece: square * 12 + color * 6 + kind.
using Token = std::uint16_t;

struct PositionSketch {
  std::vector<Token> tokens;  // sorted, one per piece
  std::string source_id;
};

PositionSketch sketch(const Position& p, std::string source_id = {});

// Jaccard similarity of the piece-placement token sets; side to move is ignored.
double similarity(const Position& a, const Position& b);
double similarity(const PositionSketch& a, const PositionSketch& b);

class EmptyCorpus : public std::invalid_argument {
 public:
  EmptyCorpus() : std::invalid_argument("novelty index needs at least one position") {}
};

class IndexFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Neighbor {
  std::string source_id;
  double similarity;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Immutable after construction; queries are safe from several threads.
class Index {
 public:
  explicit Index(const std::vector<std::pair<std::string, Position>>& corpus);

  // Top k by similarity, ties by ascending source id.
  std::vector<Neighbor> nearest(const Position& p, std::size_t k) const;
  double max_similarity(const Position& p) const;
  bool is_duplicate(const Position& p, double threshold = kDuplicateThreshold) const;

  std::size_t size() const { return docs_.size(); }
  const std::string& fen_of(std::size_t i) const { return fens_[i]; }

  // Line-oriented file: a version header, then "id<TAB>board side" per entry.
  void save(const std::string& path) const;
  static Index load(const std::string& path);

 private:
  std::vector<PositionSketch> docs_;
  std::vector<std::string> fens_;
  std::vector<std::vector<std::uint32_t>> postings_;
};

// O(n) scan with the same ordering rules; the reference for Index::nearest.
std::vector<Neighbor> brute_force_nearest(const std::vector<std::pair<std::string, Position>>& corpus,
                                          const Position& p, std::size_t k);

}  // namespace foundry::novelty
