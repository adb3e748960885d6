// Writes a synthetic puzzle dump in the Lichess CSV layout.
//
// Rows are either random-play middlegame positions with a random four-move
// continuation, or sparse endgame positions with a forced mate in two. In both
// cases the FEN is the position before the opponent's move and Moves starts
// with that move, as in the public dump.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "foundry/board/movegen.hpp"
#include "foundry/board/notation.hpp"

using namespace foundry;

namespace {

const char* kStart = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool mates(const Position& p, const Move& m) { return game_state(apply_move_unchecked(p, m)) == GameState::Checkmate; }

// Legal moves with underpromotions last, so a queen promotion is preferred when both work.
std::vector<Move> preferred_moves(const Position& p) {
  auto moves = legal_moves(p);
  std::stable_partition(moves.begin(), moves.end(),
                        [](const Move& m) { return !m.promotion || *m.promotion == PieceKind::Queen; });
  return moves;
}

std::optional<Move> mate_in_one(const Position& p) {
  for (const Move& m : preferred_moves(p))
    if (mates(p, m)) return m;
  return std::nullopt;
}

// Returns solver move, a defence and the mate, or nullopt.
std::optional<std::vector<Move>> mate_in_two(const Position& p) {
  if (mate_in_one(p)) return std::nullopt;
  for (const Move& key : preferred_moves(p)) {
    Position after = apply_move_unchecked(p, key);
    auto replies = legal_moves(after);
    if (replies.empty()) continue;
    std::optional<std::vector<Move>> line;
    for (const Move& r : replies) {
      auto mate = mate_in_one(apply_move_unchecked(after, r));
      if (!mate) {
        line.reset();
        break;
      }
      if (!line) line = std::vector<Move>{key, r, *mate};
    }
    if (line) return line;
  }
  return std::nullopt;
}

std::optional<Position> sparse_position(std::mt19937_64& rng) {
  Position p;
  Color solver = std::bernoulli_distribution(0.5)(rng) ? Color::White : Color::Black;
  Color defender = opposite(solver);
  p.side_to_move = solver;
  p.fullmove_number = 40;
  std::uniform_int_distribution<int> sq(0, 63);
  auto place = [&](Piece pc, int square) {
    if (p.board[square]) return false;
    int rank = square >> 3;
    if (pc.kind == PieceKind::Pawn && (rank == 0 || rank == 7)) return false;
    p.board[square] = pc;
    return true;
  };
  // The defending king mostly sits near its own back rank.
  int back = defender == Color::White ? 0 : 7;
  int ksq = std::bernoulli_distribution(0.7)(rng)
                ? Square::at(std::uniform_int_distribution<int>(0, 7)(rng), back + (back ? -1 : 1) * std::uniform_int_distribution<int>(0, 1)(rng)).index()
                : sq(rng);
  place({defender, PieceKind::King}, ksq);
  while (!place({solver, PieceKind::King}, sq(rng))) {
  }
  static const std::vector<PieceKind> attackers = {PieceKind::Queen, PieceKind::Rook, PieceKind::Rook, PieceKind::Bishop,
                                                   PieceKind::Knight, PieceKind::Knight, PieceKind::Pawn, PieceKind::Pawn};
  static const std::vector<PieceKind> defenders = {PieceKind::Pawn, PieceKind::Pawn, PieceKind::Pawn, PieceKind::Rook,
                                                   PieceKind::Bishop, PieceKind::Knight, PieceKind::Queen};
  int na = std::uniform_int_distribution<int>(2, 4)(rng);
  int nd = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int i = 0; i < na; ++i)
    while (!place({solver, pick(rng, attackers)}, sq(rng))) {
    }
  for (int i = 0; i < nd; ++i)
    while (!place({defender, pick(rng, defenders)}, sq(rng))) {
    }
  if (!structural_violations(p).empty() || !validate_realism(p).empty() || in_check(p)) return std::nullopt;
  return p;
}

// A defender move that leads to p, reconstructed by moving one piece back.
std::optional<std::pair<Position, Move>> predecessor(const Position& p, std::mt19937_64& rng) {
  Color defender = opposite(p.side_to_move);
  std::vector<std::pair<int, int>> tries;
  for (int t = 0; t < 64; ++t)
    if (p.board[t] && p.board[t]->color == defender)
      for (int s = 0; s < 64; ++s)
        if (!p.board[s]) tries.push_back({s, t});
  std::shuffle(tries.begin(), tries.end(), rng);
  for (auto [s, t] : tries) {
    Position prev = p;
    prev.board[s] = prev.board[t];
    prev.board[t].reset();
    prev.side_to_move = defender;
    if (!structural_violations(prev).empty() || !validate_realism(prev).empty()) continue;
    Move m{Square(s), Square(t), std::nullopt};
    if (!is_legal(prev, m)) continue;
    if (board_side_fen(apply_move(prev, m)) != board_side_fen(p)) continue;
    return std::pair{prev, m};
  }
  return std::nullopt;
}

std::string join(const std::vector<Move>& line) {
  std::string out;
  for (const auto& m : line) out += (out.empty() ? "" : " ") + m.uci();
  return out;
}

std::string puzzle_id(std::mt19937_64& rng, std::set<std::string>& used) {
  static const std::string alphabet = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  for (;;) {
    std::string id;
    for (int i = 0; i < 5; ++i) id += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    if (used.insert(id).second) return id;
  }
}

struct Row {
  std::string fen;
  std::vector<Move> moves;
  std::string themes;
};

// Random play that takes something whenever a coin with P(capture_bias) says so.
std::optional<Row> playout_row(std::mt19937_64& rng, double capture_bias) {
  Position p = parse_fen(kStart);
  int plies = std::uniform_int_distribution<int>(16, 90)(rng);
  std::bernoulli_distribution take(capture_bias);
  for (int i = 0; i < plies; ++i) {
    auto moves = legal_moves(p);
    if (moves.empty()) return std::nullopt;
    std::vector<Move> captures;
    for (const Move& m : moves)
      if (move_flags(p, m).capture) captures.push_back(m);
    p = apply_move(p, !captures.empty() && take(rng) ? pick(rng, captures) : pick(rng, moves));
  }
  Row row{serialize_fen(p), {}, ""};
  Position q = p;
  for (int i = 0; i < 4; ++i) {
    auto moves = legal_moves(q);
    if (moves.empty()) break;
    row.moves.push_back(pick(rng, moves));
    q = apply_move(q, row.moves.back());
  }
  if (row.moves.size() < 2) return std::nullopt;
  static const std::vector<std::string> tags = {"advantage middlegame short", "crushing middlegame long", "advantage endgame short",
                                                "equality middlegame", "crushing endgame short", "advantage opening short"};
  row.themes = pick(rng, tags);
  return row;
}

std::optional<Row> mate_row(std::mt19937_64& rng) {
  auto p = sparse_position(rng);
  if (!p) return std::nullopt;
  auto line = mate_in_two(*p);
  if (!line) return std::nullopt;
  auto prev = predecessor(*p, rng);
  if (!prev) return std::nullopt;
  std::vector<Move> moves{prev->second};
  moves.insert(moves.end(), line->begin(), line->end());
  return Row{serialize_fen(prev->first), moves, "endgame mate mateIn2 short"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic puzzle CSV in the Lichess dump layout"};
  std::size_t rows = 10000;
  std::size_t mates = 60;
  std::uint64_t seed = 1;
  double capture_bias = 0.2;
  std::string out;
  app.add_option("--rows", rows, "total rows");
  app.add_option("--mate-in-two", mates, "rows with a forced mate in two");
  app.add_option("--seed", seed);
  app.add_option("--capture-bias", capture_bias, "chance of taking when a capture exists")->check(CLI::Range(0.0, 1.0));
  app.add_option("-o,--out", out, "output path")->required();
  CLI11_PARSE(app, argc, argv);
  if (mates > rows) {
    std::cerr << "--mate-in-two exceeds --rows\n";
    return 2;
  }

  std::mt19937_64 rng(seed);
  std::vector<Row> all;
  std::size_t tried = 0;
  while (all.size() < mates) {
    ++tried;
    if (auto r = mate_row(rng)) all.push_back(*r);
  }
  std::cerr << "mate-in-two rows: " << mates << " from " << tried << " sparse positions\n";
  while (all.size() < rows)
    if (auto r = playout_row(rng, capture_bias)) all.push_back(*r);
  std::shuffle(all.begin(), all.end(), rng);

  std::ofstream os(out);
  if (!os) {
    std::cerr << "cannot write " << out << "\n";
    return 1;
  }
  os << "PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl,OpeningTags\n";
  std::normal_distribution<double> rating(1500, 400);
  std::set<std::string> used;
  for (const Row& r : all) {
    int elo = std::clamp(static_cast<int>(rating(rng)), 400, 3200);
    os << puzzle_id(rng, used) << ',' << r.fen << ',' << join(r.moves) << ',' << elo << ','
       << std::uniform_int_distribution<int>(70, 110)(rng) << ',' << std::uniform_int_distribution<int>(60, 100)(rng) << ','
       << std::uniform_int_distribution<int>(50, 20000)(rng) << ',' << r.themes << ",,\n";
  }
  return 0;
}
