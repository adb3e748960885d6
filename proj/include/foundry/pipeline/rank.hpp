#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/pipeline/store.hpp"

namespace foundry::pipeline {

// Scored without failure and not a near-copy of a corpus position.
bool rankable(const PuzzleCandidate& c);

// Reward descending, then ci descending, then max corpus similarity ascending, then id.
bool ranks_before(const PuzzleCandidate& a, const PuzzleCandidate& b);

// Rankable candidates, optionally restricted to one theme, in rank order.
std::vector<const PuzzleCandidate*> ranked(const Store& s, std::optional<themes::Theme> theme = std::nullopt);

struct ThemeSelection {
  themes::Theme theme;
  std::vector<std::string> ids;
};

struct SelectionManifest {
  int per_theme = 50;
  std::vector<ThemeSelection> themes;  // themes with at least one candidate, in booklet order
};

json to_json(const SelectionManifest& m);

SelectionManifest rank_and_select(const Store& s, int per_theme = 50);

class NothingAccepted : public std::runtime_error {
 public:
  NothingAccepted() : std::runtime_error("no accepted candidates to export") {}
};

enum class BookletFormat { Markdown, Json };

std::string section_title(themes::Theme t);

// "1. Rd8 Qxd8 2. exd8=N", or "1... Kh8 2. Rxh7#" when black moves first.
std::string numbered_line(const Position& start, const std::vector<Move>& line);

// Accepted candidates grouped by theme in booklet order; within a section in
// rank order. Unlabeled accepted candidates go to a final section.
std::string export_booklet(const Store& s, BookletFormat format, ExportPolicy policy = ExportPolicy::AnyAccept);

// Candidates carried by a JSON booklet, each once, in order of appearance.
std::vector<PuzzleCandidate> import_booklet_json(const std::string& text);

}  // namespace foundry::pipeline
