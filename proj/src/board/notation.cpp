#include "foundry/board/notation.hpp"

#include <cctype>

namespace foundry {

namespace {

char san_letter(PieceKind k) {
  switch (k) {
    case PieceKind::Knight: return 'N';
    case PieceKind::Bishop: return 'B';
    case PieceKind::Rook: return 'R';
    case PieceKind::Queen: return 'Q';
    case PieceKind::King: return 'K';
    case PieceKind::Pawn: return 'P';
  }
  return '?';
}

std::optional<PieceKind> kind_from_san_letter(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return std::nullopt;
  }
}

bool is_castle(const Position& p, const Move& m) {
  const auto& mover = p.at(m.from);
  return mover && mover->kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2;
}

std::string san_body(const Position& p, const Move& m, const std::vector<Move>& legal) {
  if (is_castle(p, m)) return m.to.file() == 6 ? "O-O" : "O-O-O";
  const Piece mover = *p.at(m.from);
  const bool capture = is_capture(p, m);
  std::string out;
  if (mover.kind == PieceKind::Pawn) {
    if (capture) {
      out += static_cast<char>('a' + m.from.file());
      out += 'x';
    }
    out += m.to.name();
    if (m.promotion) {
      out += '=';
      out += san_letter(*m.promotion);
    }
    return out;
  }
  out += san_letter(mover.kind);
  bool clash = false;
  bool same_file = false;
  bool same_rank = false;
  for (const auto& other : legal) {
    if (other.to != m.to || other.from == m.from) continue;
    const auto& op = p.at(other.from);
    if (!op || op->kind != mover.kind) continue;
    clash = true;
    if (other.from.file() == m.from.file()) same_file = true;
    if (other.from.rank() == m.from.rank()) same_rank = true;
  }
  if (clash) {
    if (!same_file) {
      out += static_cast<char>('a' + m.from.file());
    } else if (!same_rank) {
      out += static_cast<char>('1' + m.from.rank());
    } else {
      out += m.from.name();
    }
  }
  if (capture) out += 'x';
  out += m.to.name();
  return out;
}

}  // namespace

std::string to_san(const Position& p, const Move& m) {
  auto legal = legal_moves(p);
  std::string out = san_body(p, m, legal);
  auto flags = move_flags(p, m);
  if (flags.mate) {
    out += '#';
  } else if (flags.check) {
    out += '+';
  }
  return out;
}

Move parse_san(const Position& p, std::string_view san) {
  std::string text(san);
  while (!text.empty() && std::string_view("+#!?").find(text.back()) != std::string_view::npos) text.pop_back();
  const std::string original(san);
  if (text.empty()) throw NotationError("empty move");

  auto legal = legal_moves(p);
  if (text == "O-O" || text == "0-0" || text == "O-O-O" || text == "0-0-0") {
    const int file = text.size() == 3 ? 6 : 2;
    for (const auto& m : legal) {
      if (is_castle(p, m) && m.to.file() == file) return m;
    }
    throw NotationError("castling not legal: " + original);
  }

  std::optional<PieceKind> promotion;
  if (text.size() >= 3) {
    char last = text.back();
    auto k = kind_from_san_letter(last);
    char before = text[text.size() - 2];
    if (k && *k != PieceKind::King && (before == '=' || std::isdigit(static_cast<unsigned char>(before)))) {
      promotion = k;
      text.pop_back();
      if (text.back() == '=') text.pop_back();
    }
  }
  if (text.size() < 2) throw NotationError("cannot parse move: " + original);
  auto dest = Square::parse(std::string_view(text).substr(text.size() - 2));
  if (!dest) throw NotationError("bad destination in " + original);
  std::string_view prefix = std::string_view(text).substr(0, text.size() - 2);

  PieceKind kind = PieceKind::Pawn;
  if (!prefix.empty() && std::isupper(static_cast<unsigned char>(prefix.front()))) {
    auto k = kind_from_san_letter(prefix.front());
    if (!k) throw NotationError("unknown piece in " + original);
    kind = *k;
    prefix.remove_prefix(1);
  }
  std::optional<int> from_file;
  std::optional<int> from_rank;
  for (char c : prefix) {
    if (c >= 'a' && c <= 'h') {
      from_file = c - 'a';
    } else if (c >= '1' && c <= '8') {
      from_rank = c - '1';
    } else if (c != 'x' && c != ':' && c != '-') {
      throw NotationError("unexpected character in " + original);
    }
  }

  std::vector<Move> matches;
  for (const auto& m : legal) {
    if (m.to != *dest || p.at(m.from)->kind != kind) continue;
    if (from_file && m.from.file() != *from_file) continue;
    if (from_rank && m.from.rank() != *from_rank) continue;
    // A bare pawn push to the last rank means a queen.
    auto wanted = promotion;
    if (!wanted && m.promotion) wanted = PieceKind::Queen;
    if (m.promotion != wanted) continue;
    matches.push_back(m);
  }
  if (matches.empty()) throw NotationError("no legal move matches " + original + " in " + serialize_fen(p));
  if (matches.size() > 1) throw NotationError("ambiguous move " + original + " in " + serialize_fen(p));
  return matches.front();
}

Move parse_uci(const Position& p, std::string_view text) {
  if (text.size() != 4 && text.size() != 5) throw NotationError("bad UCI move '" + std::string(text) + "'");
  auto from = Square::parse(text.substr(0, 2));
  auto to = Square::parse(text.substr(2, 2));
  if (!from || !to) throw NotationError("bad UCI move '" + std::string(text) + "'");
  Move m{*from, *to, std::nullopt};
  if (text.size() == 5) {
    auto k = kind_from_san_letter(text[4]);
    if (!k || *k == PieceKind::King) throw NotationError("bad promotion in '" + std::string(text) + "'");
    m.promotion = k;
  }
  if (!is_legal(p, m)) throw NotationError("illegal UCI move '" + std::string(text) + "' in " + serialize_fen(p));
  return m;
}

std::vector<std::string> tokenize_line(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string tok(text.substr(start, i - start));
    if (tok.empty()) continue;
    if (tok == "1-0" || tok == "0-1" || tok == "1/2-1/2" || tok == "*") continue;
    // Drop a leading move number such as "12." or "3...".
    size_t j = 0;
    while (j < tok.size() && std::isdigit(static_cast<unsigned char>(tok[j]))) ++j;
    if (j > 0 && j < tok.size() && tok[j] == '.') {
      while (j < tok.size() && tok[j] == '.') ++j;
      tok = tok.substr(j);
    } else if (j == tok.size()) {
      continue;
    }
    while (!tok.empty() && (tok.back() == '.' || tok.back() == ',')) tok.pop_back();
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::vector<Move> parse_san_line(const Position& start, std::span<const std::string> sans) {
  std::vector<Move> out;
  Position p = start;
  for (const auto& s : sans) {
    Move m = parse_san(p, s);
    out.push_back(m);
    p = apply_move_unchecked(p, m);
  }
  return out;
}

std::vector<std::string> to_san_line(const Position& start, std::span<const Move> moves) {
  std::vector<std::string> out;
  Position p = start;
  for (const auto& m : moves) {
    out.push_back(to_san(p, m));
    p = apply_move(p, m);
  }
  return out;
}

std::vector<std::string> to_uci_line(std::span<const Move> moves) {
  std::vector<std::string> out;
  out.reserve(moves.size());
  for (const auto& m : moves) out.push_back(m.uci());
  return out;
}

Position play_line(const Position& start, std::span<const Move> moves) {
  Position p = start;
  for (const auto& m : moves) p = apply_move(p, m);
  return p;
}

}  // namespace foundry
