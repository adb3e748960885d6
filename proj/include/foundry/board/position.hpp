#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foundry/board/types.hpp"

namespace foundry {

struct CastlingRights {
  bool white_king = false;
  bool white_queen = false;
  bool black_king = false;
  bool black_queen = false;

  bool any() const { return white_king || white_queen || black_king || black_queen; }
  friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

struct Position {
  std::array<std::optional<Piece>, 64> board{};
  Color side_to_move = Color::White;
  CastlingRights castling;
  std::optional<Square> en_passant;
  int halfmove_clock = 0;
  int fullmove_number = 1;

  const std::optional<Piece>& at(Square s) const { return board[s.index()]; }
  std::optional<Piece>& at(Square s) { return board[s.index()]; }

  friend bool operator==(const Position&, const Position&) = default;
};

enum class Violation {
  MissingKing,
  MultipleKings,
  PawnOnBackRank,
  OpponentInCheck,
  AdjacentKings,
  CastlingWithoutPieces,
  BadEnPassant,
  TooManyPawns,
  PromotionInconsistent,
};

std::string to_string(Violation v);

class FenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalPositionError : public std::runtime_error {
 public:
  explicit IllegalPositionError(std::vector<Violation> v);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Accepts 2 (board, side), 4 or 6 fields. Missing fields default to
// castling "-", en passant "-", halfmove 0, fullmove 1.
Position parse_fen_unchecked(std::string_view text);
// As above, then throws IllegalPositionError if any structural invariant fails.
Position parse_fen(std::string_view text);

std::string serialize_fen(const Position& p);
// Board and side only; the form the generators emit and train on.
std::string board_side_fen(const Position& p);

std::optional<Square> king_square(const Position& p, Color c);
bool is_attacked(const Position& p, Square s, Color by);
std::vector<Square> attackers(const Position& p, Square s, Color by);
bool in_check(const Position& p);
bool in_check(const Position& p, Color c);

// Invariants every parsed or generated position must satisfy.
std::vector<Violation> structural_violations(const Position& p);
// Structural invariants plus piece-count plausibility.
std::vector<Violation> validate_realism(const Position& p);
bool is_structurally_valid(const Position& p);

// Sum of piece values, positive when the side to move is ahead.
int material_balance(const Position& p);
int material_of(const Position& p, Color c);

}  // namespace foundry
