#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foundry/board/movegen.hpp"
#include "foundry/uci/engine.hpp"

namespace foundry::reward {

struct Thresholds {
  int win_cp = 200;
  int second_max_cp = 100;
  int gap_cp = 200;
  // A line may stop early once the solver is this far ahead on the board and on material.
  int convert_eval_cp = 400;
  int convert_material_cp = 200;
};

enum class UniquenessFailure { NoWinningMove, SecondAlsoWins, GapTooSmall };

std::string to_string(UniquenessFailure f);
std::optional<UniquenessFailure> uniqueness_failure_from_string(const std::string& s);

struct UniquenessResult {
  bool unique = false;
  std::optional<Move> winning_move;
  int best_eval = 0;
  int second_eval = 0;
  std::optional<UniquenessFailure> reason_failed;
  std::vector<Move> pv;  // strong engine's principal variation for the best move
};

// Pure verdict over a MultiPV result. A lone legal move that mates counts as
// unique with second_eval = -kMateScore.
UniquenessResult judge_uniqueness(const Position& p, std::span<const uci::ScoredLine> lines, const Thresholds& t);

UniquenessResult uniqueness_check(uci::Analyzer& strong, const Position& p, int depth, const Thresholds& t = {});

// Fraction of weak depths 1..max_weak_depth whose top move differs from winning_move.
double counter_intuitive_score(uci::Analyzer& weak, const Position& p, const Move& winning_move, int max_weak_depth);

struct LineVerification {
  int verified_plies = 0;
  std::vector<Move> line;  // solver and defender moves, starting with the solver
  bool converted = false;  // ended on mate, stalemate or a converted advantage
  std::optional<std::string> error;
};

LineVerification verify_solution_line(uci::Analyzer& strong, const Position& p, int max_solver_plies, int depth,
                                      const Thresholds& t = {});

enum class LineMode { RootOnly, LineVerified };

struct RewardConfig {
  Thresholds thresholds;
  int strong_depth = 18;
  int weak_depth = 4;
  LineMode mode = LineMode::RootOnly;
  int max_solver_plies = 3;
};

struct RewardReport {
  UniquenessResult uniqueness;
  double ci_score = 0.0;
  double reward = 0.0;
  std::vector<Move> solution_line;
  int line_verified_plies = 0;
  bool score_failed = false;
  std::string failure;
};

// Gated: reward is 0 unless the position has a unique winning move, otherwise ci_score.
// Line-verified mode also zeroes the reward unless the line verifies for
// max_solver_plies solver moves or ends converted.
RewardReport score_position(uci::Analyzer& strong, uci::Analyzer& weak, const Position& p, const RewardConfig& cfg);

}  // namespace foundry::reward
