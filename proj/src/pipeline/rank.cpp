#include "foundry/pipeline/rank.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "foundry/board/notation.hpp"

namespace foundry::pipeline {

bool rankable(const PuzzleCandidate& c) { return c.reward_report && !c.reward_report->score_failed && !c.duplicate; }

bool ranks_before(const PuzzleCandidate& a, const PuzzleCandidate& b) {
  const auto& ra = *a.reward_report;
  const auto& rb = *b.reward_report;
  if (ra.reward != rb.reward) return ra.reward > rb.reward;
  if (ra.ci_score != rb.ci_score) return ra.ci_score > rb.ci_score;
  if (a.max_similarity() != b.max_similarity()) return a.max_similarity() < b.max_similarity();
  return a.id < b.id;
}

std::vector<const PuzzleCandidate*> ranked(const Store& s, std::optional<themes::Theme> theme) {
  std::vector<const PuzzleCandidate*> out;
  for (const auto& [id, c] : s.candidates())
    if (rankable(c) && (!theme || c.has_theme(*theme))) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return ranks_before(*a, *b); });
  return out;
}

json to_json(const SelectionManifest& m) {
  json themes = json::array();
  for (const auto& t : m.themes) themes.push_back({{"theme", themes::to_string(t.theme)}, {"ids", t.ids}});
  return {{"per_theme", m.per_theme}, {"themes", themes}};
}

SelectionManifest rank_and_select(const Store& s, int per_theme) {
  SelectionManifest m;
  m.per_theme = per_theme;
  for (auto t : themes::kAllThemes) {
    auto list = ranked(s, t);
    if (list.empty()) continue;
    ThemeSelection sel{t, {}};
    for (std::size_t i = 0; i < list.size() && i < static_cast<std::size_t>(per_theme); ++i) sel.ids.push_back(list[i]->id);
    m.themes.push_back(std::move(sel));
  }
  return m;
}

std::string section_title(themes::Theme t) {
  using themes::Theme;
  switch (t) {
    case Theme::Sacrifice: return "Sacrifice";
    case Theme::Underpromotion: return "Underpromotion";
    case Theme::AttackingWithdrawal: return "Attacking Withdrawal";
    case Theme::KnightOnRim: return "Knight on the Rim";
    case Theme::StalemateSacrifice: return "Stalemate Sacrifice";
    case Theme::Novotny: return "Novotny";
    case Theme::Interference: return "Interference";
    case Theme::UnprotectedPosition: return "Unprotected Position";
    case Theme::Xray: return "X-Ray";
    case Theme::Paralysis: return "Paralysis";
    case Theme::Bristol: return "Bristol";
    case Theme::KingOnTour: return "King on Tour";
    case Theme::Switchback: return "Switchback";
    case Theme::SmotheredMate: return "Smothered Mate";
  }
  return "?";
}

std::string numbered_line(const Position& start, const std::vector<Move>& line) {
  auto sans = to_san_line(start, line);
  std::string out;
  int number = 1;
  bool white = start.side_to_move == Color::White;
  for (std::size_t i = 0; i < sans.size(); ++i) {
    if (!out.empty()) out += ' ';
    if (white)
      out += std::to_string(number) + ". ";
    else if (i == 0)
      out += "1... ";
    out += sans[i];
    if (!white) ++number;
    white = !white;
  }
  return out;
}

namespace {

struct Section {
  std::string key;
  std::string title;
  std::vector<const PuzzleCandidate*> entries;
};

std::vector<Section> sections(const Store& s, ExportPolicy policy) {
  std::vector<const PuzzleCandidate*> accepted;
  for (const auto& [id, c] : s.candidates())
    if (c.status(policy) == Decision::Accepted) accepted.push_back(&c);
  if (accepted.empty()) throw NothingAccepted();
  auto order = [](const PuzzleCandidate* a, const PuzzleCandidate* b) {
    if (a->reward_report && b->reward_report) return ranks_before(*a, *b);
    if (a->reward_report || b->reward_report) return static_cast<bool>(a->reward_report);
    return a->id < b->id;
  };
  std::sort(accepted.begin(), accepted.end(), order);

  std::vector<Section> out;
  for (auto t : themes::kAllThemes) {
    Section sec{themes::to_string(t), section_title(t), {}};
    for (auto* c : accepted)
      if (c->has_theme(t)) sec.entries.push_back(c);
    if (!sec.entries.empty()) out.push_back(std::move(sec));
  }
  Section rest{"uncategorized", "Uncategorized", {}};
  for (auto* c : accepted)
    if (!c->themes || c->themes->empty()) rest.entries.push_back(c);
  if (!rest.entries.empty()) out.push_back(std::move(rest));
  return out;
}

std::string side_name(const Position& p) { return p.side_to_move == Color::White ? "White" : "Black"; }

std::vector<Move> solution(const PuzzleCandidate& c) { return c.reward_report ? c.reward_report->solution_line : std::vector<Move>{}; }

}  // namespace

std::string export_booklet(const Store& s, BookletFormat format, ExportPolicy policy) {
  auto secs = sections(s, policy);

  if (format == BookletFormat::Json) {
    json out = {{"format", "foundry-booklet"}, {"version", 1}};
    json js = json::array();
    for (const auto& sec : secs) {
      json entries = json::array();
      for (auto* c : sec.entries) {
        Position p = c->position();
        entries.push_back({{"id", c->id},
                           {"fen", c->fen},
                           {"side_to_move", side_name(p)},
                           {"lichess_url", lichess_analysis_url(c->fen)},
                           {"solution", numbered_line(p, solution(*c))},
                           {"candidate", to_json(*c)}});
      }
      js.push_back({{"theme", sec.key}, {"title", sec.title}, {"entries", entries}});
    }
    out["sections"] = js;
    return out.dump(2) + "\n";
  }

  std::ostringstream md;
  md << "# Puzzle Booklet\n";
  for (const auto& sec : secs) {
    md << "\n## " << sec.title << "\n";
    int n = 0;
    for (auto* c : sec.entries) {
      Position p = c->position();
      md << "\n### " << sec.title << " " << ++n << "\n\n";
      md << "`" << c->fen << "`\n\n";
      md << side_name(p) << " to move. [Analyse on Lichess](" << lichess_analysis_url(c->fen) << ")\n";
      auto line = solution(*c);
      if (!line.empty()) md << "\nSolution: " << numbered_line(p, line) << "\n";
      if (c->neighbors && !c->neighbors->empty()) {
        md << "\nClosest FENs:\n";
        for (std::size_t i = 0; i < c->neighbors->size() && i < 3; ++i) {
          const auto& nb = (*c->neighbors)[i];
          md << "- [" << nb.fen << "](" << lichess_analysis_url(nb.fen) << ")\n";
        }
      }
    }
  }
  return md.str();
}

std::vector<PuzzleCandidate> import_booklet_json(const std::string& text) {
  auto j = json::parse(text);
  if (j.value("format", "") != "foundry-booklet") throw std::invalid_argument("not a booklet document");
  std::vector<PuzzleCandidate> out;
  std::set<std::string> seen;
  for (const auto& sec : j.at("sections"))
    for (const auto& e : sec.at("entries"))
      if (seen.insert(e.at("id").get<std::string>()).second) out.push_back(candidate_from_json(e.at("candidate")));
  return out;
}

}  // namespace foundry::pipeline
