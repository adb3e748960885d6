#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/board/position.hpp"

namespace foundry {

enum class GameState { Ongoing, Checkmate, Stalemate, InsufficientMaterial };

std::string to_string(GameState s);

class IllegalMoveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MoveFlags {
  bool capture = false;
  bool en_passant = false;
  bool castle = false;
  bool check = false;
  bool mate = false;
};

// Sorted by (from, to, promotion).
std::vector<Move> legal_moves(const Position& p);
bool is_legal(const Position& p, const Move& m);

// Throws IllegalMoveError unless m is legal in p.
Position apply_move(const Position& p, const Move& m);
// Caller guarantees m is at least pseudo-legal.
Position apply_move_unchecked(const Position& p, const Move& m);

MoveFlags move_flags(const Position& p, const Move& m);
bool is_capture(const Position& p, const Move& m);
// Piece that ends up on m.to (the promoted piece for promotions).
Piece moved_piece(const Position& p, const Move& m);

GameState game_state(const Position& p);
bool insufficient_material(const Position& p);

std::uint64_t perft(const Position& p, int depth);

}  // namespace foundry
