#include "foundry/reward/reward.hpp"

namespace foundry::reward {

std::string to_string(UniquenessFailure f) {
  switch (f) {
    case UniquenessFailure::NoWinningMove: return "no-winning-move";
    case UniquenessFailure::SecondAlsoWins: return "second-also-wins";
    case UniquenessFailure::GapTooSmall: return "gap-too-small";
  }
  return "unknown";
}

std::optional<UniquenessFailure> uniqueness_failure_from_string(const std::string& s) {
  for (auto f : {UniquenessFailure::NoWinningMove, UniquenessFailure::SecondAlsoWins, UniquenessFailure::GapTooSmall}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

UniquenessResult judge_uniqueness(const Position& p, std::span<const uci::ScoredLine> lines, const Thresholds& t) {
  UniquenessResult r;
  if (lines.empty()) {
    r.reason_failed = UniquenessFailure::NoWinningMove;
    return r;
  }
  const auto& best = lines[0];
  r.best_eval = best.eval;
  r.pv = best.pv;
  if (lines.size() == 1) {
    // Only one legal move: a puzzle only if it ends the game on the spot.
    r.second_eval = -uci::kMateScore;
    if (move_flags(p, best.move).mate) {
      r.unique = true;
      r.winning_move = best.move;
    } else {
      r.reason_failed = UniquenessFailure::NoWinningMove;
    }
    return r;
  }
  r.second_eval = lines[1].eval;
  if (r.best_eval < t.win_cp) {
    r.reason_failed = UniquenessFailure::NoWinningMove;
  } else if (r.second_eval > t.second_max_cp) {
    r.reason_failed = UniquenessFailure::SecondAlsoWins;
  } else if (r.best_eval - r.second_eval < t.gap_cp) {
    r.reason_failed = UniquenessFailure::GapTooSmall;
  } else {
    r.unique = true;
    r.winning_move = best.move;
  }
  return r;
}

UniquenessResult uniqueness_check(uci::Analyzer& strong, const Position& p, int depth, const Thresholds& t) {
  if (legal_moves(p).empty()) {
    UniquenessResult r;
    r.reason_failed = UniquenessFailure::NoWinningMove;
    return r;
  }
  auto lines = strong.analyse(p, depth, 2);
  return judge_uniqueness(p, lines, t);
}

double counter_intuitive_score(uci::Analyzer& weak, const Position& p, const Move& winning_move, int max_weak_depth) {
  if (max_weak_depth < 1) return 0.0;
  int misses = 0;
  for (int d = 1; d <= max_weak_depth; ++d) {
    auto lines = weak.analyse(p, d, 1);
    if (lines.front().move != winning_move) ++misses;
  }
  return static_cast<double>(misses) / max_weak_depth;
}

LineVerification verify_solution_line(uci::Analyzer& strong, const Position& p, int max_solver_plies, int depth,
                                      const Thresholds& t) {
  LineVerification out;
  const Color solver = p.side_to_move;
  try {
    auto root = uniqueness_check(strong, p, depth, t);
    if (!root.unique) return out;
    Position pos = p;
    Move next = *root.winning_move;
    for (;;) {
      out.line.push_back(next);
      ++out.verified_plies;
      pos = apply_move(pos, next);
      if (legal_moves(pos).empty()) {
        out.converted = true;
        break;
      }
      if (out.verified_plies >= max_solver_plies) break;

      Move reply = strong.analyse(pos, depth, 1).front().move;
      out.line.push_back(reply);
      pos = apply_move(pos, reply);
      if (legal_moves(pos).empty()) {
        out.converted = game_state(pos) != GameState::Checkmate;
        break;
      }

      auto lines = strong.analyse(pos, depth, 2);
      const int material = material_of(pos, solver) - material_of(pos, opposite(solver));
      if (lines.front().eval >= t.convert_eval_cp && material >= t.convert_material_cp) {
        out.converted = true;
        break;
      }
      auto verdict = judge_uniqueness(pos, lines, t);
      if (!verdict.unique) break;
      next = *verdict.winning_move;
    }
  } catch (const uci::EngineError& e) {
    out.error = e.what();
  }
  return out;
}

RewardReport score_position(uci::Analyzer& strong, uci::Analyzer& weak, const Position& p, const RewardConfig& cfg) {
  RewardReport report;
  try {
    report.uniqueness = uniqueness_check(strong, p, cfg.strong_depth, cfg.thresholds);
    report.solution_line = report.uniqueness.pv;
    if (!report.uniqueness.unique) return report;

    report.line_verified_plies = 1;
    bool line_ok = true;
    if (cfg.mode == LineMode::LineVerified) {
      auto v = verify_solution_line(strong, p, cfg.max_solver_plies, cfg.strong_depth, cfg.thresholds);
      if (v.error) throw uci::EngineCrashed(*v.error);
      report.line_verified_plies = v.verified_plies;
      report.solution_line = v.line;
      line_ok = v.converted || v.verified_plies >= cfg.max_solver_plies;
    }
    report.ci_score = counter_intuitive_score(weak, p, *report.uniqueness.winning_move, cfg.weak_depth);
    report.reward = line_ok ? report.ci_score : 0.0;
  } catch (const uci::EngineError& e) {
    report = RewardReport{};
    report.score_failed = true;
    report.failure = e.what();
  }
  return report;
}

}  // namespace foundry::reward
