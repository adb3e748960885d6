#include "foundry/board/position.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace foundry {

namespace {

struct Delta {
  int df;
  int dr;
};

constexpr Delta kKnight[] = {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr Delta kKing[] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
constexpr Delta kOrthogonal[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
constexpr Delta kDiagonal[] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

bool holds(const Position& p, int file, int rank, Color c, PieceKind k) {
  if (!Square::on_board(file, rank)) return false;
  const auto& sq = p.at(Square::at(file, rank));
  return sq && sq->color == c && sq->kind == k;
}

void collect_attackers(const Position& p, Square s, Color by, std::vector<Square>* out, bool* found) {
  auto hit = [&](int f, int r) {
    if (found) *found = true;
    if (out) out->push_back(Square::at(f, r));
  };
  auto done = [&] { return found && *found && !out; };

  int f = s.file();
  int r = s.rank();
  // A pawn of color `by` attacks diagonally forward, so look one rank behind.
  int pr = by == Color::White ? r - 1 : r + 1;
  for (int df : {-1, 1}) {
    if (holds(p, f + df, pr, by, PieceKind::Pawn)) hit(f + df, pr);
    if (done()) return;
  }
  for (auto d : kKnight) {
    if (holds(p, f + d.df, r + d.dr, by, PieceKind::Knight)) hit(f + d.df, r + d.dr);
    if (done()) return;
  }
  for (auto d : kKing) {
    if (holds(p, f + d.df, r + d.dr, by, PieceKind::King)) hit(f + d.df, r + d.dr);
    if (done()) return;
  }
  auto slide = [&](const Delta* dirs, int n, PieceKind kind) {
    for (int i = 0; i < n; ++i) {
      int cf = f + dirs[i].df;
      int cr = r + dirs[i].dr;
      while (Square::on_board(cf, cr)) {
        const auto& sq = p.at(Square::at(cf, cr));
        if (sq) {
          if (sq->color == by && (sq->kind == kind || sq->kind == PieceKind::Queen)) hit(cf, cr);
          break;
        }
        cf += dirs[i].df;
        cr += dirs[i].dr;
      }
      if (done()) return;
    }
  };
  slide(kOrthogonal, 4, PieceKind::Rook);
  if (done()) return;
  slide(kDiagonal, 4, PieceKind::Bishop);
}

int parse_count(std::string_view field, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw FenError(std::string("bad ") + what + " field '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string to_string(Violation v) {
  switch (v) {
    case Violation::MissingKing: return "missing-king";
    case Violation::MultipleKings: return "multiple-kings";
    case Violation::PawnOnBackRank: return "pawn-on-back-rank";
    case Violation::OpponentInCheck: return "opponent-in-check";
    case Violation::AdjacentKings: return "adjacent-kings";
    case Violation::CastlingWithoutPieces: return "castling-without-pieces";
    case Violation::BadEnPassant: return "bad-en-passant";
    case Violation::TooManyPawns: return "too-many-pawns";
    case Violation::PromotionInconsistent: return "promotion-inconsistent";
  }
  return "unknown";
}

namespace {
std::string describe(const std::vector<Violation>& v) {
  std::string out = "illegal position:";
  for (auto x : v) out += " " + to_string(x);
  return out;
}
}  // namespace

IllegalPositionError::IllegalPositionError(std::vector<Violation> v)
    : std::runtime_error(describe(v)), violations_(std::move(v)) {}

Position parse_fen_unchecked(std::string_view text) {
  auto fields = split_fields(text);
  if (fields.size() != 2 && fields.size() != 4 && fields.size() != 6) {
    throw FenError("expected 2, 4 or 6 FEN fields, got " + std::to_string(fields.size()));
  }
  Position p;

  int rank = 7;
  int file = 0;
  for (char c : fields[0]) {
    if (c == '/') {
      if (file != 8) throw FenError("rank " + std::to_string(rank + 1) + " does not have 8 squares");
      --rank;
      file = 0;
      if (rank < 0) throw FenError("too many ranks");
    } else if (c >= '1' && c <= '8') {
      file += c - '0';
      if (file > 8) throw FenError("rank " + std::to_string(rank + 1) + " overflows");
    } else {
      auto piece = piece_from_letter(c);
      if (!piece) throw FenError(std::string("unknown piece letter '") + c + "'");
      if (file >= 8) throw FenError("rank " + std::to_string(rank + 1) + " overflows");
      p.at(Square::at(file, rank)) = piece;
      ++file;
    }
  }
  if (rank != 0 || file != 8) throw FenError("board field does not describe 8 full ranks");

  if (fields[1] == "w") {
    p.side_to_move = Color::White;
  } else if (fields[1] == "b") {
    p.side_to_move = Color::Black;
  } else {
    throw FenError("bad side-to-move field '" + std::string(fields[1]) + "'");
  }

  if (fields.size() >= 4) {
    if (fields[2] != "-") {
      for (char c : fields[2]) {
        switch (c) {
          case 'K': p.castling.white_king = true; break;
          case 'Q': p.castling.white_queen = true; break;
          case 'k': p.castling.black_king = true; break;
          case 'q': p.castling.black_queen = true; break;
          default: throw FenError("bad castling field '" + std::string(fields[2]) + "'");
        }
      }
    }
    if (fields[3] != "-") {
      auto ep = Square::parse(fields[3]);
      if (!ep) throw FenError("bad en-passant field '" + std::string(fields[3]) + "'");
      p.en_passant = ep;
    }
  }
  if (fields.size() == 6) {
    p.halfmove_clock = parse_count(fields[4], "halfmove");
    p.fullmove_number = parse_count(fields[5], "fullmove");
    if (p.fullmove_number < 1) throw FenError("fullmove number must be at least 1");
  }
  return p;
}

Position parse_fen(std::string_view text) {
  Position p = parse_fen_unchecked(text);
  auto v = structural_violations(p);
  if (!v.empty()) throw IllegalPositionError(std::move(v));
  return p;
}

std::string board_side_fen(const Position& p) {
  std::string out;
  out.reserve(80);
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto& sq = p.at(Square::at(file, rank));
      if (!sq) {
        ++empty;
        continue;
      }
      if (empty) out += static_cast<char>('0' + empty);
      empty = 0;
      out += piece_letter(*sq);
    }
    if (empty) out += static_cast<char>('0' + empty);
    if (rank) out += '/';
  }
  out += p.side_to_move == Color::White ? " w" : " b";
  return out;
}

std::string serialize_fen(const Position& p) {
  std::string out = board_side_fen(p);
  out += ' ';
  if (!p.castling.any()) {
    out += '-';
  } else {
    if (p.castling.white_king) out += 'K';
    if (p.castling.white_queen) out += 'Q';
    if (p.castling.black_king) out += 'k';
    if (p.castling.black_queen) out += 'q';
  }
  out += ' ';
  out += p.en_passant ? p.en_passant->name() : "-";
  out += ' ' + std::to_string(p.halfmove_clock) + ' ' + std::to_string(p.fullmove_number);
  return out;
}

std::optional<Square> king_square(const Position& p, Color c) {
  for (int i = 0; i < 64; ++i) {
    const auto& sq = p.board[i];
    if (sq && sq->color == c && sq->kind == PieceKind::King) return Square(i);
  }
  return std::nullopt;
}

bool is_attacked(const Position& p, Square s, Color by) {
  bool found = false;
  collect_attackers(p, s, by, nullptr, &found);
  return found;
}

std::vector<Square> attackers(const Position& p, Square s, Color by) {
  std::vector<Square> out;
  collect_attackers(p, s, by, &out, nullptr);
  std::sort(out.begin(), out.end());
  return out;
}

bool in_check(const Position& p, Color c) {
  auto k = king_square(p, c);
  return k && is_attacked(p, *k, opposite(c));
}

bool in_check(const Position& p) { return in_check(p, p.side_to_move); }

std::vector<Violation> structural_violations(const Position& p) {
  std::vector<Violation> out;
  int kings[2] = {0, 0};
  bool back_rank_pawn = false;
  for (int i = 0; i < 64; ++i) {
    const auto& sq = p.board[i];
    if (!sq) continue;
    if (sq->kind == PieceKind::King) ++kings[static_cast<int>(sq->color)];
    if (sq->kind == PieceKind::Pawn && (Square(i).rank() == 0 || Square(i).rank() == 7)) back_rank_pawn = true;
  }
  if (kings[0] == 0 || kings[1] == 0) out.push_back(Violation::MissingKing);
  if (kings[0] > 1 || kings[1] > 1) out.push_back(Violation::MultipleKings);
  if (back_rank_pawn) out.push_back(Violation::PawnOnBackRank);

  if (kings[0] == 1 && kings[1] == 1) {
    if (in_check(p, opposite(p.side_to_move))) out.push_back(Violation::OpponentInCheck);
    auto wk = *king_square(p, Color::White);
    auto bk = *king_square(p, Color::Black);
    if (std::abs(wk.file() - bk.file()) <= 1 && std::abs(wk.rank() - bk.rank()) <= 1) {
      out.push_back(Violation::AdjacentKings);
    }
  }

  auto is = [&](const char* name, Color c, PieceKind k) {
    const auto& sq = p.at(*Square::parse(name));
    return sq && sq->color == c && sq->kind == k;
  };
  const auto& cr = p.castling;
  bool castling_ok = true;
  if ((cr.white_king || cr.white_queen) && !is("e1", Color::White, PieceKind::King)) castling_ok = false;
  if ((cr.black_king || cr.black_queen) && !is("e8", Color::Black, PieceKind::King)) castling_ok = false;
  if (cr.white_king && !is("h1", Color::White, PieceKind::Rook)) castling_ok = false;
  if (cr.white_queen && !is("a1", Color::White, PieceKind::Rook)) castling_ok = false;
  if (cr.black_king && !is("h8", Color::Black, PieceKind::Rook)) castling_ok = false;
  if (cr.black_queen && !is("a8", Color::Black, PieceKind::Rook)) castling_ok = false;
  if (!castling_ok) out.push_back(Violation::CastlingWithoutPieces);

  if (p.en_passant) {
    // The square a pawn just skipped: empty, with that pawn directly beyond it.
    Square ep = *p.en_passant;
    Color mover = opposite(p.side_to_move);
    int expected_rank = mover == Color::White ? 2 : 5;
    int step = mover == Color::White ? 1 : -1;
    bool ok = ep.rank() == expected_rank && !p.at(ep) &&
              !p.at(Square::at(ep.file(), ep.rank() - step)) &&
              holds(p, ep.file(), ep.rank() + step, mover, PieceKind::Pawn);
    if (!ok) out.push_back(Violation::BadEnPassant);
  }
  return out;
}

bool is_structurally_valid(const Position& p) { return structural_violations(p).empty(); }

std::vector<Violation> validate_realism(const Position& p) {
  auto out = structural_violations(p);
  bool too_many_pawns = false;
  bool inconsistent = false;
  for (Color c : {Color::White, Color::Black}) {
    int count[6] = {0, 0, 0, 0, 0, 0};
    int light_bishops = 0;
    int dark_bishops = 0;
    for (int i = 0; i < 64; ++i) {
      const auto& sq = p.board[i];
      if (!sq || sq->color != c) continue;
      ++count[static_cast<int>(sq->kind)];
      if (sq->kind == PieceKind::Bishop) (Square(i).light() ? light_bishops : dark_bishops)++;
    }
    int pawns = count[static_cast<int>(PieceKind::Pawn)];
    if (pawns > 8) too_many_pawns = true;
    // Each piece beyond the initial set must be a promoted pawn.
    int extras = std::max(0, count[static_cast<int>(PieceKind::Queen)] - 1) +
                 std::max(0, count[static_cast<int>(PieceKind::Rook)] - 2) +
                 std::max(0, count[static_cast<int>(PieceKind::Knight)] - 2) +
                 std::max(0, light_bishops - 1) + std::max(0, dark_bishops - 1);
    if (extras > std::max(0, 8 - pawns)) inconsistent = true;
  }
  if (too_many_pawns) out.push_back(Violation::TooManyPawns);
  if (inconsistent) out.push_back(Violation::PromotionInconsistent);
  return out;
}

int material_of(const Position& p, Color c) {
  int total = 0;
  for (const auto& sq : p.board) {
    if (sq && sq->color == c) total += piece_value(sq->kind);
  }
  return total;
}

int material_balance(const Position& p) {
  return material_of(p, p.side_to_move) - material_of(p, opposite(p.side_to_move));
}

}  // namespace foundry
