#include "foundry/themes/themes.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

#include "foundry/board/notation.hpp"

namespace foundry::themes {

namespace {

constexpr int kKingSwapValue = 10000;

constexpr std::array<std::pair<int, int>, 4> kOrthogonal{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::pair<int, int>, 4> kDiagonal{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

int swap_value(PieceKind k) { return k == PieceKind::King ? kKingSwapValue : piece_value(k); }

bool slides_orthogonally(PieceKind k) { return k == PieceKind::Rook || k == PieceKind::Queen; }
bool slides_diagonally(PieceKind k) { return k == PieceKind::Bishop || k == PieceKind::Queen; }
bool is_slider(PieceKind k) { return slides_orthogonally(k) || slides_diagonally(k); }

bool slides_along(PieceKind k, int df, int dr) {
  return (df == 0 || dr == 0) ? slides_orthogonally(k) : slides_diagonally(k);
}

int sign(int v) { return (v > 0) - (v < 0); }

// Unit step from a to b when they share a rank, file or diagonal.
std::optional<std::pair<int, int>> line_step(Square a, Square b) {
  int df = b.file() - a.file();
  int dr = b.rank() - a.rank();
  if (df == 0 && dr == 0) return std::nullopt;
  if (df != 0 && dr != 0 && std::abs(df) != std::abs(dr)) return std::nullopt;
  return std::pair{sign(df), sign(dr)};
}

int distance(Square a, Square b) { return std::max(std::abs(a.file() - b.file()), std::abs(a.rank() - b.rank())); }

// Empty squares walked from s in direction d, then the first occupied square if any.
std::pair<std::vector<Square>, std::optional<Square>> walk(const Position& p, Square s, std::pair<int, int> d) {
  std::vector<Square> empty;
  int f = s.file() + d.first;
  int r = s.rank() + d.second;
  while (Square::on_board(f, r)) {
    Square q = Square::at(f, r);
    if (p.at(q)) return {empty, q};
    empty.push_back(q);
    f += d.first;
    r += d.second;
  }
  return {empty, std::nullopt};
}

std::vector<std::pair<int, int>> directions_of(PieceKind k) {
  std::vector<std::pair<int, int>> out;
  if (slides_orthogonally(k)) out.insert(out.end(), kOrthogonal.begin(), kOrthogonal.end());
  if (slides_diagonally(k)) out.insert(out.end(), kDiagonal.begin(), kDiagonal.end());
  return out;
}

// Per-ply bookkeeping shared by the detectors.
struct Replay {
  Color solver;
  Color defender;
  std::vector<Position> before;  // before[i] is the position before line[i]; before[n] is the end
  std::vector<int> mover_id;     // identity of the piece that made ply i
  std::vector<Piece> mover;      // piece kind before the move
  bool stalemate_end = false;
};

Replay replay(const ThemeInput& in) {
  Replay r;
  r.solver = in.root.side_to_move;
  r.defender = opposite(r.solver);
  r.before.push_back(in.root);
  std::array<int, 64> ids{};
  ids.fill(-1);
  int next_id = 0;
  for (int i = 0; i < 64; ++i)
    if (in.root.board[i]) ids[i] = next_id++;
  for (const Move& m : in.line) {
    const Position& p = r.before.back();
    Piece pc = moved_piece(p, m);
    r.mover.push_back(pc);
    r.mover_id.push_back(ids[m.from.index()]);
    if (pc.kind == PieceKind::Pawn && m.from.file() != m.to.file() && !p.at(m.to))
      ids[Square::at(m.to.file(), m.from.rank()).index()] = -1;
    if (pc.kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
      int rank = m.from.rank();
      bool king_side = m.to.file() > m.from.file();
      Square rook_from = Square::at(king_side ? 7 : 0, rank);
      Square rook_to = Square::at(king_side ? 5 : 3, rank);
      ids[rook_to.index()] = ids[rook_from.index()];
      ids[rook_from.index()] = -1;
    }
    ids[m.to.index()] = ids[m.from.index()];
    ids[m.from.index()] = -1;
    r.before.push_back(apply_move(p, m));
  }
  r.stalemate_end = game_state(r.before.back()) == GameState::Stalemate;
  return r;
}

bool is_solver_ply(size_t i) { return i % 2 == 0; }

std::optional<int> eval_after(const ThemeInput& in, size_t i) {
  if (i < in.evals.size()) return in.evals[i];
  return std::nullopt;
}

bool still_winning(const ThemeInput& in, const ThemeConfig& cfg, size_t i) {
  auto e = eval_after(in, i);
  return !e || *e >= cfg.win_cp;
}

bool sacrifice_eval_ok(const ThemeInput& in, const ThemeConfig& cfg, size_t i, bool draw_seeking) {
  auto e = eval_after(in, i);
  if (!e) return true;
  if (*e >= cfg.win_cp) return true;
  return draw_seeking && *e >= -100 && *e <= 100;
}

// Best defender gain from capturing a solver piece worth at least min_value.
int best_capture_gain(const Position& after, int min_value, bool queens_and_rooks_only) {
  int best = INT32_MIN;
  for (const Move& m : legal_moves(after)) {
    const auto& victim = after.at(m.to);
    if (!victim || victim->color == after.side_to_move) continue;
    if (piece_value(victim->kind) < min_value) continue;
    if (queens_and_rooks_only && victim->kind != PieceKind::Queen && victim->kind != PieceKind::Rook) continue;
    best = std::max(best, static_exchange_eval(after, m));
  }
  return best;
}

std::string ply_tag(const Replay& r, size_t i) { return r.mover[i].kind == PieceKind::King ? "king" : "move"; }

// Solver sliders aimed through one piece at a defender piece behind it: either
// through a defender piece onto a more valuable one, or through an own slider
// moving on the same line (a battery).
struct Alignment {
  Square slider;
  Square front;
  Square back;
  std::vector<Square> ray;  // squares after the slider up to and including back
  auto key() const { return std::tuple{slider, front, back}; }
};

std::vector<Alignment> alignments(const Position& p, Color solver) {
  std::vector<Alignment> out;
  for (int i = 0; i < 64; ++i) {
    const auto& pc = p.board[i];
    if (!pc || pc->color != solver || !is_slider(pc->kind)) continue;
    Square s(i);
    for (auto d : directions_of(pc->kind)) {
      auto [gap1, front] = walk(p, s, d);
      if (!front) continue;
      auto [gap2, back] = walk(p, *front, d);
      if (!back || p.at(*back)->color == solver) continue;
      const Piece f = *p.at(*front);
      if (f.color == solver) {
        if (!slides_along(f.kind, d.first, d.second)) continue;
      } else if (swap_value(p.at(*back)->kind) <= swap_value(f.kind)) {
        continue;
      }
      Alignment a{s, *front, *back, gap1};
      a.ray.push_back(*front);
      a.ray.insert(a.ray.end(), gap2.begin(), gap2.end());
      a.ray.push_back(*back);
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Evidence> detect_underpromotion(const ThemeInput& in) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    auto promo = in.line[i].promotion;
    if (!promo || *promo == PieceKind::Queen) continue;
    ev.push_back({static_cast<int>(i) + 1, *promo == PieceKind::Knight ? "knight" : *promo == PieceKind::Bishop ? "bishop" : "rook"});
  }
  return ev;
}

std::vector<Evidence> detect_attacking_withdrawal(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Move& m = in.line[i];
    const Position& p = r.before[i];
    PieceKind k = r.mover[i].kind;
    if (k == PieceKind::King || k == PieceKind::Pawn || p.at(m.to)) continue;
    int back_rank = r.defender == Color::White ? 0 : 7;
    if (std::abs(back_rank - m.to.rank()) <= std::abs(back_rank - m.from.rank())) continue;
    if (!still_winning(in, cfg, i)) continue;
    bool was_attacked = is_attacked(p, m.from, r.defender);
    const Position& after = r.before[i + 1];
    bool new_threat = in_check(after);
    for (int s = 0; s < 64 && !new_threat; ++s) {
      const auto& target = after.board[s];
      if (!target || target->color != r.defender || target->kind == PieceKind::King) continue;
      auto now = attackers(after, Square(s), r.solver);
      auto then = attackers(p, Square(s), r.solver);
      bool hits_now = std::find(now.begin(), now.end(), m.to) != now.end();
      bool hit_then = std::find(then.begin(), then.end(), m.from) != then.end();
      if (hits_now && !hit_then) new_threat = true;
    }
    // The withdrawn piece strikes later in the line.
    for (size_t j = i + 2; j < in.line.size() && !new_threat; j += 2) {
      if (r.mover_id[j] != r.mover_id[i]) continue;
      new_threat = r.before[j].at(in.line[j].to) || in_check(r.before[j + 1]);
    }
    if (was_attacked || new_threat) ev.push_back({static_cast<int>(i) + 1, was_attacked ? "escape" : "threat"});
  }
  return ev;
}

std::vector<Evidence> detect_knight_on_rim(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Move& m = in.line[i];
    if (r.mover[i].kind != PieceKind::Knight) continue;
    bool rim = m.to.file() == 0 || m.to.file() == 7 || m.to.rank() == 0 || m.to.rank() == 7;
    if (rim && still_winning(in, cfg, i)) ev.push_back({static_cast<int>(i) + 1, m.to.name()});
  }
  return ev;
}

std::vector<Evidence> detect_novotny(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Move& m = in.line[i];
    if (r.before[i].at(m.to)) continue;
    const Position& after = r.before[i + 1];
    // Two defender line pieces guarding the square from different directions.
    std::vector<Square> guards;
    std::set<std::pair<int, int>> dirs;
    for (Square a : attackers(after, m.to, r.defender)) {
      PieceKind k = after.at(a)->kind;
      auto step = line_step(a, m.to);
      if (!step || !is_slider(k) || !slides_along(k, step->first, step->second)) continue;
      if (!dirs.insert(*step).second) continue;
      guards.push_back(a);
    }
    if (guards.size() < 2) continue;
    bool holds = true;
    if (in.probe) {
      for (Square from : guards) {
        Move capture{from, m.to, std::nullopt};
        if (!is_legal(after, capture)) continue;
        Position reply = apply_move(after, capture);
        if (game_state(reply) != GameState::Ongoing) {
          holds = holds && game_state(reply) != GameState::Stalemate;
          continue;
        }
        auto lines = in.probe->analyse(reply, cfg.probe_depth, 1);
        holds = holds && !lines.empty() && lines.front().eval >= cfg.win_cp;
      }
    } else {
      holds = still_winning(in, cfg, i) && static_exchange_eval(r.before[i], m) <= -cfg.sacrifice_see_cp;
    }
    if (holds) ev.push_back({static_cast<int>(i) + 1, m.to.name()});
  }
  return ev;
}

std::vector<Evidence> detect_interference(const ThemeInput& in, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Move& m = in.line[i];
    const Position& p = r.before[i];
    const Position& after = r.before[i + 1];
    auto king = king_square(p, r.defender);
    bool found = false;
    for (int s = 0; s < 64 && !found; ++s) {
      const auto& pc = p.board[s];
      if (!pc || pc->color != r.defender || !is_slider(pc->kind)) continue;
      for (auto d : directions_of(pc->kind)) {
        auto [empty, hit] = walk(p, Square(s), d);
        auto at = std::find(empty.begin(), empty.end(), m.to);
        if (at == empty.end()) continue;
        if (hit && p.at(*hit)->color == r.defender) {
          found = true;
          break;
        }
        // Cut-off guard of a flight square next to the defender king.
        for (auto q = at + 1; q != empty.end() && king; ++q) {
          if (distance(*q, *king) == 1 && is_attacked(after, *q, r.solver)) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
    }
    if (found) ev.push_back({static_cast<int>(i) + 1, m.to.name()});
  }
  return ev;
}

std::vector<Evidence> detect_unprotected(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    if (r.before[i].at(in.line[i].to)) continue;
    const Position& after = r.before[i + 1];
    if (game_state(after) != GameState::Ongoing) continue;
    if (best_capture_gain(after, 0, true) >= cfg.hanging_see_cp && still_winning(in, cfg, i))
      ev.push_back({static_cast<int>(i) + 1, "hanging"});
  }
  return ev;
}

std::vector<Evidence> detect_xray(const ThemeInput& in, const Replay& r) {
  // First later solver capture landing on the aligned ray.
  auto payoff = [&](const Alignment& a, size_t from) -> std::optional<size_t> {
    for (size_t j = from; j < in.line.size(); j += 2) {
      const Move& later = in.line[j];
      if (r.before[j].at(later.to) && std::find(a.ray.begin(), a.ray.end(), later.to) != a.ray.end()) return j;
    }
    return std::nullopt;
  };
  std::vector<Evidence> ev;
  std::set<int> seen;
  auto note = [&](size_t i, const char* tag) {
    if (seen.insert(static_cast<int>(i) + 1).second) ev.push_back({static_cast<int>(i) + 1, tag});
  };
  for (const auto& a : alignments(r.before[0], r.solver)) {
    if (auto j = payoff(a, 0)) {
      note(*j, "win");
      break;
    }
  }
  for (size_t i = 0; i < in.line.size(); i += 2) {
    std::set<std::tuple<Square, Square, Square>> old;
    for (const auto& a : alignments(r.before[i], r.solver)) old.insert(a.key());
    for (const auto& a : alignments(r.before[i + 1], r.solver)) {
      if (old.count(a.key())) continue;
      if (auto j = payoff(a, i + 2)) {
        note(i, "align");
        note(*j, "win");
        break;
      }
    }
  }
  std::sort(ev.begin(), ev.end(), [](const Evidence& x, const Evidence& y) { return x.ply < y.ply; });
  return ev;
}

// Defender turn where every reply is worse than passing by the drop margin.
bool zugzwang(uci::Analyzer& probe, const Position& p, Color solver, const ThemeConfig& cfg) {
  Position pass = p;
  pass.side_to_move = solver;
  pass.en_passant.reset();
  if (game_state(pass) != GameState::Ongoing) return false;
  auto pass_lines = probe.analyse(pass, cfg.paralysis_probe_depth, 1);
  if (pass_lines.empty()) return false;
  int pass_eval = -pass_lines.front().eval;
  for (const Move& m : legal_moves(p)) {
    Position next = apply_move(p, m);
    int defender_eval = 0;
    GameState st = game_state(next);
    if (st == GameState::Checkmate) {
      defender_eval = uci::kMateScore;
    } else if (st == GameState::Ongoing) {
      auto lines = probe.analyse(next, cfg.paralysis_probe_depth, 1);
      if (lines.empty()) return false;
      defender_eval = -lines.front().eval;
    }
    if (pass_eval - defender_eval < cfg.paralysis_drop_cp) return false;
  }
  return true;
}

std::vector<Evidence> detect_paralysis(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  if (in.line.empty()) return {};
  // Last defender turn: the end position, or the one before the defender's final reply.
  size_t idx = in.line.size() % 2 == 1 ? in.line.size() : in.line.size() - 1;
  const Position& p = r.before[idx];
  if (game_state(p) != GameState::Ongoing) return {};
  int ply = static_cast<int>(idx);
  if (static_cast<int>(legal_moves(p).size()) <= cfg.paralysis_max_moves) return {{ply, "few-moves"}};
  if (in.probe && !in_check(p) && zugzwang(*in.probe, p, r.solver, cfg)) return {{ply, "zugzwang"}};
  return {};
}

std::vector<Evidence> detect_bristol(const ThemeInput& in, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Move& m = in.line[i];
    if (!is_slider(r.mover[i].kind) || distance(m.from, m.to) < 2) continue;
    auto step = line_step(m.from, m.to);
    if (!step) continue;
    for (size_t j = i + 2; j < in.line.size(); j += 2) {
      const Move& follow = in.line[j];
      if (r.mover_id[j] == r.mover_id[i]) continue;
      if (!slides_along(r.mover[j].kind, step->first, step->second)) continue;
      // Destination on the cleared line, behind where the first piece stopped.
      auto back = line_step(follow.to, m.to);
      if (!back || *back != *step) continue;
      ev.push_back({static_cast<int>(i) + 1, "clear"});
      ev.push_back({static_cast<int>(j) + 1, "follow"});
      break;
    }
  }
  return ev;
}

std::vector<Evidence> detect_king_on_tour(const ThemeInput& in, const ThemeConfig& cfg, const Replay& r) {
  std::vector<Evidence> ev;
  for (size_t i = 0; i < in.line.size(); i += 2)
    if (r.mover[i].kind == PieceKind::King) ev.push_back({static_cast<int>(i) + 1, in.line[i].to.name()});
  if (static_cast<int>(ev.size()) < cfg.king_tour_moves) return {};
  return ev;
}

std::vector<Evidence> detect_switchback(const ThemeInput& in, const Replay& r) {
  std::vector<Evidence> ev;
  // Solver ply at which each piece left each square.
  std::map<std::pair<int, Square>, size_t> departed;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    int id = r.mover_id[i];
    const Move& m = in.line[i];
    if (auto it = departed.find({id, m.to}); it != departed.end()) {
      ev.push_back({static_cast<int>(it->second) + 1, "leave"});
      ev.push_back({static_cast<int>(i) + 1, "return"});
    }
    departed[{id, m.from}] = i;
  }
  return ev;
}

std::vector<Evidence> detect_smothered_mate(const ThemeInput& in, const Replay& r) {
  size_t n = in.line.size();
  if (n == 0 || !is_solver_ply(n - 1)) return {};
  const Position& end = r.before[n];
  if (game_state(end) != GameState::Checkmate) return {};
  const Move& last = in.line[n - 1];
  if (end.at(last.to)->kind != PieceKind::Knight) return {};
  auto king = king_square(end, r.defender);
  if (!king) return {};
  auto checkers = attackers(end, *king, r.solver);
  if (checkers.size() != 1 || checkers.front() != last.to) return {};
  int own = 0;
  int covered = 0;
  for (int df = -1; df <= 1; ++df) {
    for (int dr = -1; dr <= 1; ++dr) {
      if ((df == 0 && dr == 0) || !Square::on_board(king->file() + df, king->rank() + dr)) continue;
      Square q = Square::at(king->file() + df, king->rank() + dr);
      const auto& pc = end.at(q);
      if (pc && pc->color == r.defender) {
        ++own;
      } else if (!pc && is_attacked(end, q, r.solver)) {
        ++covered;
      } else {
        return {};
      }
    }
  }
  if (own < 2 || own <= covered) return {};
  return {{static_cast<int>(n), last.to.name()}};
}

}  // namespace

std::string to_string(Theme t) {
  switch (t) {
    case Theme::Sacrifice: return "sacrifice";
    case Theme::Underpromotion: return "underpromotion";
    case Theme::AttackingWithdrawal: return "attacking-withdrawal";
    case Theme::KnightOnRim: return "knight-on-rim";
    case Theme::StalemateSacrifice: return "stalemate-sacrifice";
    case Theme::Novotny: return "novotny";
    case Theme::Interference: return "interference";
    case Theme::UnprotectedPosition: return "unprotected-position";
    case Theme::Xray: return "xray";
    case Theme::Paralysis: return "paralysis";
    case Theme::Bristol: return "bristol";
    case Theme::KingOnTour: return "king-on-tour";
    case Theme::Switchback: return "switchback";
    case Theme::SmotheredMate: return "smothered-mate";
  }
  return "?";
}

std::optional<Theme> theme_from_string(const std::string& s) {
  for (Theme t : kAllThemes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

int static_exchange_eval(const Position& p, const Move& m) {
  Piece mover = moved_piece(p, m);
  Position b = p;
  int gains[40];
  int depth = 0;
  gains[0] = 0;
  if (b.at(m.to)) {
    gains[0] = piece_value(b.at(m.to)->kind);
  } else if (mover.kind == PieceKind::Pawn && m.from.file() != m.to.file()) {
    gains[0] = piece_value(PieceKind::Pawn);
    b.at(Square::at(m.to.file(), m.from.rank())).reset();
  }
  if (m.promotion) {
    gains[0] += piece_value(*m.promotion) - piece_value(PieceKind::Pawn);
    mover.kind = *m.promotion;
  }
  b.at(m.from).reset();
  b.at(m.to) = mover;
  int on_square = swap_value(mover.kind);
  Color side = opposite(mover.color);
  while (depth < 38) {
    auto att = attackers(b, m.to, side);
    if (att.empty()) break;
    Square best = att.front();
    for (Square a : att)
      if (swap_value(b.at(a)->kind) < swap_value(b.at(best)->kind)) best = a;
    if (b.at(best)->kind == PieceKind::King && !attackers(b, m.to, opposite(side)).empty()) break;
    ++depth;
    gains[depth] = on_square - gains[depth - 1];
    on_square = swap_value(b.at(best)->kind);
    b.at(m.to) = b.at(best);
    b.at(best).reset();
    side = opposite(side);
  }
  while (depth > 0) {
    gains[depth - 1] = -std::max(-gains[depth - 1], gains[depth]);
    --depth;
  }
  return gains[0];
}

std::vector<int> detect_sacrifice_moves(const ThemeInput& in, const ThemeConfig& cfg) {
  Replay r = replay(in);
  std::vector<int> plies;
  for (size_t i = 0; i < in.line.size(); i += 2) {
    const Position& after = r.before[i + 1];
    bool gives_up = static_exchange_eval(r.before[i], in.line[i]) <= -cfg.sacrifice_see_cp;
    if (!gives_up && game_state(after) == GameState::Ongoing)
      gives_up = best_capture_gain(after, 300, false) >= cfg.sacrifice_see_cp;
    if (gives_up && sacrifice_eval_ok(in, cfg, i, r.stalemate_end)) plies.push_back(static_cast<int>(i) + 1);
  }
  return plies;
}

bool detect_terminal_stalemate(const Position& root, const std::vector<Move>& line) {
  return game_state(play_line(root, line)) == GameState::Stalemate;
}

std::vector<ThemeLabel> detect_themes(const ThemeInput& in, const ThemeConfig& cfg) {
  Replay r = replay(in);
  std::vector<ThemeLabel> out;
  auto add = [&](Theme t, std::vector<Evidence> ev) {
    if (!ev.empty()) out.push_back({t, std::move(ev)});
  };
  auto sacrifices = detect_sacrifice_moves(in, cfg);
  std::vector<Evidence> sac_ev;
  for (int ply : sacrifices) sac_ev.push_back({ply, ply_tag(r, ply - 1)});
  add(Theme::Sacrifice, sac_ev);
  add(Theme::Underpromotion, detect_underpromotion(in));
  add(Theme::AttackingWithdrawal, detect_attacking_withdrawal(in, cfg, r));
  add(Theme::KnightOnRim, detect_knight_on_rim(in, cfg, r));
  if (r.stalemate_end && !sacrifices.empty()) {
    auto ev = sac_ev;
    ev.push_back({static_cast<int>(in.line.size()), "stalemate"});
    add(Theme::StalemateSacrifice, ev);
  }
  add(Theme::Novotny, detect_novotny(in, cfg, r));
  add(Theme::Interference, detect_interference(in, r));
  add(Theme::UnprotectedPosition, detect_unprotected(in, cfg, r));
  add(Theme::Xray, detect_xray(in, r));
  add(Theme::Paralysis, detect_paralysis(in, cfg, r));
  add(Theme::Bristol, detect_bristol(in, r));
  add(Theme::KingOnTour, detect_king_on_tour(in, cfg, r));
  add(Theme::Switchback, detect_switchback(in, r));
  add(Theme::SmotheredMate, detect_smothered_mate(in, r));
  return out;
}

}  // namespace foundry::themes
