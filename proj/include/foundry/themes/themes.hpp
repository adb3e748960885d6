#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foundry/board/movegen.hpp"
#include "foundry/uci/engine.hpp"

namespace foundry::themes {

enum class Theme {
  Sacrifice,
  Underpromotion,
  AttackingWithdrawal,
  KnightOnRim,
  StalemateSacrifice,
  Novotny,
  Interference,
  UnprotectedPosition,
  Xray,
  Paralysis,
  Bristol,
  KingOnTour,
  Switchback,
  SmotheredMate,
};

inline constexpr Theme kAllThemes[] = {
    Theme::Sacrifice,   Theme::Underpromotion, Theme::AttackingWithdrawal, Theme::KnightOnRim, Theme::StalemateSacrifice,
    Theme::Novotny,     Theme::Interference,   Theme::UnprotectedPosition, Theme::Xray,        Theme::Paralysis,
    Theme::Bristol,     Theme::KingOnTour,     Theme::Switchback,          Theme::SmotheredMate,
};

// Lowercase hyphenated names: "knight-on-rim", "smothered-mate", ...
std::string to_string(Theme t);
std::optional<Theme> theme_from_string(const std::string& s);

struct Evidence {
  int ply;  // 1-based index into the line
  std::string tag;
};

struct ThemeLabel {
  Theme theme;
  std::vector<Evidence> evidence;
};

struct ThemeConfig {
  int sacrifice_see_cp = 150;
  int win_cp = 200;
  int hanging_see_cp = 300;
  int paralysis_max_moves = 4;
  int paralysis_drop_cp = 300;
  int king_tour_moves = 3;
  int probe_depth = 10;
  int paralysis_probe_depth = 4;
};

struct ThemeInput {
  Position root;
  std::vector<Move> line;  // solver moves at even indices
  // Strong-engine eval after each ply, from the solver's side. Missing entries
  // are treated as "the verified line still wins".
  std::vector<std::optional<int>> evals;
  // Optional engine for the novotny and paralysis probes.
  uci::Analyzer* probe = nullptr;
};

// Static exchange evaluation of m on its destination square, from the mover's side.
int static_exchange_eval(const Position& p, const Move& m);

// 1-based solver plies that give up material.
std::vector<int> detect_sacrifice_moves(const ThemeInput& in, const ThemeConfig& cfg = {});
bool detect_terminal_stalemate(const Position& root, const std::vector<Move>& line);

std::vector<ThemeLabel> detect_themes(const ThemeInput& in, const ThemeConfig& cfg = {});

}  // namespace foundry::themes
