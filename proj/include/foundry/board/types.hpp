#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace foundry {

enum class Color : std::uint8_t { White, Black };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class PieceKind : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };

struct Piece {
  Color color;
  PieceKind kind;

  friend constexpr bool operator==(Piece, Piece) = default;
};

// FEN letter: uppercase for white.
char piece_letter(Piece p);
std::optional<Piece> piece_from_letter(char c);

// Centipawn value used by material accounting. King counts as 0.
int piece_value(PieceKind k);

class Square {
 public:
  constexpr Square() = default;
  constexpr explicit Square(int index) : index_(static_cast<std::uint8_t>(index)) {}

  static constexpr Square at(int file, int rank) { return Square(rank * 8 + file); }
  static constexpr bool on_board(int file, int rank) {
    return file >= 0 && file < 8 && rank >= 0 && rank < 8;
  }
  // "e4" style; nullopt on anything else.
  static std::optional<Square> parse(std::string_view text);

  constexpr int index() const { return index_; }
  constexpr int file() const { return index_ & 7; }
  constexpr int rank() const { return index_ >> 3; }
  constexpr bool light() const { return ((file() + rank()) & 1) != 0; }
  std::string name() const;

  friend constexpr auto operator<=>(Square, Square) = default;

 private:
  std::uint8_t index_ = 0;
};

// Castling is encoded as the king's two-square move.
struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;

  std::string uci() const;

  friend auto operator<=>(const Move&, const Move&) = default;
};

}  // namespace foundry
