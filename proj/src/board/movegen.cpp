#include "foundry/board/movegen.hpp"

#include <algorithm>
#include <cstdlib>

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
constexpr PieceKind kPromotions[] = {PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen};

void add_pawn_move(std::vector<Move>& out, Square from, Square to) {
  if (to.rank() == 0 || to.rank() == 7) {
    for (auto k : kPromotions) out.push_back({from, to, k});
  } else {
    out.push_back({from, to, std::nullopt});
  }
}

void pseudo_legal(const Position& p, std::vector<Move>& out) {
  const Color us = p.side_to_move;
  const Color them = opposite(us);
  for (int i = 0; i < 64; ++i) {
    const auto& sq = p.board[i];
    if (!sq || sq->color != us) continue;
    const Square from(i);
    const int f = from.file();
    const int r = from.rank();

    auto target_ok = [&](int tf, int tr) {
      if (!Square::on_board(tf, tr)) return false;
      const auto& t = p.at(Square::at(tf, tr));
      return !t || t->color == them;
    };
    auto steps = [&](const Delta* d, int n) {
      for (int k = 0; k < n; ++k) {
        if (target_ok(f + d[k].df, r + d[k].dr)) out.push_back({from, Square::at(f + d[k].df, r + d[k].dr), std::nullopt});
      }
    };
    auto slides = [&](const Delta* d, int n) {
      for (int k = 0; k < n; ++k) {
        int tf = f + d[k].df;
        int tr = r + d[k].dr;
        while (Square::on_board(tf, tr)) {
          const auto& t = p.at(Square::at(tf, tr));
          if (t && t->color == us) break;
          out.push_back({from, Square::at(tf, tr), std::nullopt});
          if (t) break;
          tf += d[k].df;
          tr += d[k].dr;
        }
      }
    };

    switch (sq->kind) {
      case PieceKind::Pawn: {
        const int dir = us == Color::White ? 1 : -1;
        const int start = us == Color::White ? 1 : 6;
        if (Square::on_board(f, r + dir) && !p.at(Square::at(f, r + dir))) {
          add_pawn_move(out, from, Square::at(f, r + dir));
          if (r == start && !p.at(Square::at(f, r + 2 * dir))) out.push_back({from, Square::at(f, r + 2 * dir), std::nullopt});
        }
        for (int df : {-1, 1}) {
          int tf = f + df;
          int tr = r + dir;
          if (!Square::on_board(tf, tr)) continue;
          Square to = Square::at(tf, tr);
          const auto& t = p.at(to);
          if ((t && t->color == them) || (!t && p.en_passant == to)) add_pawn_move(out, from, to);
        }
        break;
      }
      case PieceKind::Knight: steps(kKnight, 8); break;
      case PieceKind::Bishop: slides(kDiagonal, 4); break;
      case PieceKind::Rook: slides(kOrthogonal, 4); break;
      case PieceKind::Queen:
        slides(kDiagonal, 4);
        slides(kOrthogonal, 4);
        break;
      case PieceKind::King: {
        steps(kKing, 8);
        const int home = us == Color::White ? 0 : 7;
        if (from != Square::at(4, home)) break;
        bool kside = us == Color::White ? p.castling.white_king : p.castling.black_king;
        bool qside = us == Color::White ? p.castling.white_queen : p.castling.black_queen;
        if (!kside && !qside) break;
        if (is_attacked(p, from, them)) break;
        auto empty = [&](int file) { return !p.at(Square::at(file, home)); };
        auto safe = [&](int file) { return !is_attacked(p, Square::at(file, home), them); };
        auto rook_home = [&](int file) {
          const auto& t = p.at(Square::at(file, home));
          return t && t->color == us && t->kind == PieceKind::Rook;
        };
        if (kside && rook_home(7) && empty(5) && empty(6) && safe(5) && safe(6)) {
          out.push_back({from, Square::at(6, home), std::nullopt});
        }
        if (qside && rook_home(0) && empty(1) && empty(2) && empty(3) && safe(2) && safe(3)) {
          out.push_back({from, Square::at(2, home), std::nullopt});
        }
        break;
      }
    }
  }
}

bool has_any_legal(const Position& p) {
  std::vector<Move> pseudo;
  pseudo.reserve(64);
  pseudo_legal(p, pseudo);
  for (const auto& m : pseudo) {
    if (!in_check(apply_move_unchecked(p, m), p.side_to_move)) return true;
  }
  return false;
}

void clear_rights_for(CastlingRights& cr, Square s) {
  switch (s.index()) {
    case 0: cr.white_queen = false; break;   // a1
    case 7: cr.white_king = false; break;    // h1
    case 4: cr.white_king = cr.white_queen = false; break;   // e1
    case 56: cr.black_queen = false; break;  // a8
    case 63: cr.black_king = false; break;   // h8
    case 60: cr.black_king = cr.black_queen = false; break;  // e8
    default: break;
  }
}

}  // namespace

std::string to_string(GameState s) {
  switch (s) {
    case GameState::Ongoing: return "ongoing";
    case GameState::Checkmate: return "checkmate";
    case GameState::Stalemate: return "stalemate";
    case GameState::InsufficientMaterial: return "insufficient-material";
  }
  return "unknown";
}

Position apply_move_unchecked(const Position& p, const Move& m) {
  Position n = p;
  const Piece mover = *p.at(m.from);
  const bool capture = p.at(m.to).has_value();
  const Color us = p.side_to_move;

  n.at(m.from).reset();
  n.at(m.to) = m.promotion ? Piece{us, *m.promotion} : mover;

  if (mover.kind == PieceKind::Pawn && p.en_passant == m.to && !capture) {
    n.at(Square::at(m.to.file(), m.from.rank())).reset();
  }
  if (mover.kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
    const int home = m.from.rank();
    const bool kside = m.to.file() == 6;
    Square rook_from = Square::at(kside ? 7 : 0, home);
    Square rook_to = Square::at(kside ? 5 : 3, home);
    n.at(rook_to) = n.at(rook_from);
    n.at(rook_from).reset();
  }

  clear_rights_for(n.castling, m.from);
  clear_rights_for(n.castling, m.to);

  n.en_passant.reset();
  if (mover.kind == PieceKind::Pawn && std::abs(m.to.rank() - m.from.rank()) == 2) {
    // Only record the square when an enemy pawn stands ready to take.
    Square skipped = Square::at(m.from.file(), (m.from.rank() + m.to.rank()) / 2);
    for (int df : {-1, 1}) {
      int f = m.to.file() + df;
      if (!Square::on_board(f, m.to.rank())) continue;
      const auto& t = p.at(Square::at(f, m.to.rank()));
      if (t && t->color != us && t->kind == PieceKind::Pawn) n.en_passant = skipped;
    }
  }

  n.halfmove_clock = (mover.kind == PieceKind::Pawn || capture) ? 0 : p.halfmove_clock + 1;
  if (us == Color::Black) ++n.fullmove_number;
  n.side_to_move = opposite(us);
  return n;
}

std::vector<Move> legal_moves(const Position& p) {
  std::vector<Move> pseudo;
  pseudo.reserve(64);
  pseudo_legal(p, pseudo);
  std::vector<Move> out;
  out.reserve(pseudo.size());
  for (const auto& m : pseudo) {
    if (!in_check(apply_move_unchecked(p, m), p.side_to_move)) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_legal(const Position& p, const Move& m) {
  auto moves = legal_moves(p);
  return std::binary_search(moves.begin(), moves.end(), m);
}

Position apply_move(const Position& p, const Move& m) {
  if (!is_legal(p, m)) throw IllegalMoveError("illegal move " + m.uci() + " in " + serialize_fen(p));
  return apply_move_unchecked(p, m);
}

bool is_capture(const Position& p, const Move& m) {
  if (p.at(m.to)) return true;
  const auto& mover = p.at(m.from);
  return mover && mover->kind == PieceKind::Pawn && p.en_passant == m.to && m.from.file() != m.to.file();
}

Piece moved_piece(const Position& p, const Move& m) {
  Piece mover = *p.at(m.from);
  if (m.promotion) mover.kind = *m.promotion;
  return mover;
}

MoveFlags move_flags(const Position& p, const Move& m) {
  MoveFlags flags;
  const auto& mover = p.at(m.from);
  flags.capture = is_capture(p, m);
  flags.en_passant = flags.capture && !p.at(m.to);
  flags.castle = mover && mover->kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2;
  Position after = apply_move_unchecked(p, m);
  flags.check = in_check(after);
  flags.mate = flags.check && !has_any_legal(after);
  return flags;
}

bool insufficient_material(const Position& p) {
  int minors = 0;
  int knights = 0;
  bool light_bishop = false;
  bool dark_bishop = false;
  for (int i = 0; i < 64; ++i) {
    const auto& sq = p.board[i];
    if (!sq) continue;
    switch (sq->kind) {
      case PieceKind::King: break;
      case PieceKind::Knight:
        ++minors;
        ++knights;
        break;
      case PieceKind::Bishop:
        ++minors;
        (Square(i).light() ? light_bishop : dark_bishop) = true;
        break;
      default: return false;
    }
  }
  if (minors <= 1) return true;
  // Any number of bishops all on one square color cannot mate.
  return knights == 0 && !(light_bishop && dark_bishop);
}

GameState game_state(const Position& p) {
  if (!has_any_legal(p)) return in_check(p) ? GameState::Checkmate : GameState::Stalemate;
  if (insufficient_material(p)) return GameState::InsufficientMaterial;
  return GameState::Ongoing;
}

std::uint64_t perft(const Position& p, int depth) {
  if (depth <= 0) return 1;
  auto moves = legal_moves(p);
  if (depth == 1) return moves.size();
  std::uint64_t total = 0;
  for (const auto& m : moves) total += perft(apply_move_unchecked(p, m), depth - 1);
  return total;
}

}  // namespace foundry
