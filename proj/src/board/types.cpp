#include "foundry/board/types.hpp"

#include <cctype>

namespace foundry {

namespace {
constexpr std::string_view kLetters = "pnbrqk";
}

char piece_letter(Piece p) {
  char c = kLetters[static_cast<int>(p.kind)];
  return p.color == Color::White ? static_cast<char>(std::toupper(c)) : c;
}

std::optional<Piece> piece_from_letter(char c) {
  auto lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto pos = kLetters.find(lower);
  if (pos == std::string_view::npos) return std::nullopt;
  Color color = std::isupper(static_cast<unsigned char>(c)) ? Color::White : Color::Black;
  return Piece{color, static_cast<PieceKind>(pos)};
}

int piece_value(PieceKind k) {
  switch (k) {
    case PieceKind::Pawn: return 100;
    case PieceKind::Knight: return 320;
    case PieceKind::Bishop: return 330;
    case PieceKind::Rook: return 500;
    case PieceKind::Queen: return 900;
    case PieceKind::King: return 0;
  }
  return 0;
}

std::optional<Square> Square::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  int file = text[0] - 'a';
  int rank = text[1] - '1';
  if (!on_board(file, rank)) return std::nullopt;
  return Square::at(file, rank);
}

std::string Square::name() const {
  return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::string Move::uci() const {
  std::string out = from.name() + to.name();
  if (promotion) out += kLetters[static_cast<int>(*promotion)];
  return out;
}

}  // namespace foundry
