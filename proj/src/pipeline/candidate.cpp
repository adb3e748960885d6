#include "foundry/pipeline/candidate.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <stdexcept>

#include "foundry/board/notation.hpp"

namespace foundry::pipeline {

std::string canonical_fen(const Position& p) {
  std::string fen = serialize_fen(p);
  // Drop the two clock fields.
  for (int i = 0; i < 2; ++i) fen.erase(fen.rfind(' '));
  return fen;
}

std::string candidate_id(const Position& p) {
  std::string text = canonical_fen(p);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string to_string(Decision d) { return d == Decision::Accepted ? "accepted" : "rejected"; }

std::optional<Decision> decision_from_string(const std::string& s) {
  if (s == "accepted") return Decision::Accepted;
  if (s == "rejected") return Decision::Rejected;
  return std::nullopt;
}

std::optional<ExportPolicy> export_policy_from_string(const std::string& s) {
  if (s == "any-accept") return ExportPolicy::AnyAccept;
  if (s == "unanimous") return ExportPolicy::Unanimous;
  return std::nullopt;
}

Position PuzzleCandidate::position() const { return parse_fen(fen); }

bool PuzzleCandidate::has_theme(themes::Theme t) const {
  if (!themes) return false;
  return std::any_of(themes->begin(), themes->end(), [t](const auto& l) { return l.theme == t; });
}

double PuzzleCandidate::max_similarity() const { return neighbors && !neighbors->empty() ? neighbors->front().similarity : 0.0; }

std::optional<Decision> PuzzleCandidate::status(ExportPolicy policy) const {
  if (verdicts.empty()) return std::nullopt;
  auto accepted = [](const Verdict& v) { return v.decision == Decision::Accepted; };
  bool ok = policy == ExportPolicy::AnyAccept ? std::any_of(verdicts.begin(), verdicts.end(), accepted)
                                              : std::all_of(verdicts.begin(), verdicts.end(), accepted);
  return ok ? Decision::Accepted : Decision::Rejected;
}

std::string lichess_analysis_url(const std::string& fen) {
  std::string out = "https://lichess.org/analysis/";
  for (char c : fen) out += c == ' ' ? std::string("%20") : std::string(1, c);
  return out;
}

Move move_from_uci_text(const std::string& text) {
  if (text.size() != 4 && text.size() != 5) throw std::invalid_argument("bad move text: " + text);
  auto from = Square::parse(text.substr(0, 2));
  auto to = Square::parse(text.substr(2, 2));
  if (!from || !to) throw std::invalid_argument("bad move text: " + text);
  Move m{*from, *to, std::nullopt};
  if (text.size() == 5) {
    auto pc = piece_from_letter(text[4]);
    if (!pc || pc->kind == PieceKind::Pawn || pc->kind == PieceKind::King) throw std::invalid_argument("bad promotion: " + text);
    m.promotion = pc->kind;
  }
  return m;
}

namespace {

std::vector<Move> line_from_json(const json& j) {
  std::vector<Move> out;
  for (const auto& t : j) out.push_back(move_from_uci_text(t.get<std::string>()));
  return out;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const Move& m) { return m.uci(); }

json to_json(const std::vector<Move>& line) {
  json out = json::array();
  for (const auto& m : line) out.push_back(m.uci());
  return out;
}

json to_json(const reward::RewardReport& r) {
  const auto& u = r.uniqueness;
  return {
      {"unique", u.unique},
      {"winning_move", u.winning_move ? json(u.winning_move->uci()) : json(nullptr)},
      {"best_eval", u.best_eval},
      {"second_eval", u.second_eval},
      {"reason_failed", u.reason_failed ? json(reward::to_string(*u.reason_failed)) : json(nullptr)},
      {"pv", to_json(u.pv)},
      {"ci_score", r.ci_score},
      {"reward", r.reward},
      {"solution_line", to_json(r.solution_line)},
      {"line_verified_plies", r.line_verified_plies},
      {"score_failed", r.score_failed},
      {"failure", r.failure},
  };
}

reward::RewardReport report_from_json(const json& j) {
  reward::RewardReport r;
  auto& u = r.uniqueness;
  u.unique = j.at("unique").get<bool>();
  if (!j.at("winning_move").is_null()) u.winning_move = move_from_uci_text(j.at("winning_move").get<std::string>());
  u.best_eval = j.at("best_eval").get<int>();
  u.second_eval = j.at("second_eval").get<int>();
  if (!j.at("reason_failed").is_null()) {
    u.reason_failed = reward::uniqueness_failure_from_string(j.at("reason_failed").get<std::string>());
    if (!u.reason_failed) throw std::invalid_argument("unknown uniqueness failure");
  }
  u.pv = line_from_json(j.at("pv"));
  r.ci_score = j.at("ci_score").get<double>();
  r.reward = j.at("reward").get<double>();
  r.solution_line = line_from_json(j.at("solution_line"));
  r.line_verified_plies = j.at("line_verified_plies").get<int>();
  r.score_failed = j.at("score_failed").get<bool>();
  r.failure = j.at("failure").get<std::string>();
  return r;
}

json to_json(const themes::ThemeLabel& l) {
  json ev = json::array();
  for (const auto& e : l.evidence) ev.push_back({{"ply", e.ply}, {"tag", e.tag}});
  return {{"theme", themes::to_string(l.theme)}, {"evidence", ev}};
}

themes::ThemeLabel theme_label_from_json(const json& j) {
  auto t = themes::theme_from_string(j.at("theme").get<std::string>());
  if (!t) throw std::invalid_argument("unknown theme " + j.at("theme").get<std::string>());
  themes::ThemeLabel l{*t, {}};
  for (const auto& e : j.at("evidence")) l.evidence.push_back({e.at("ply").get<int>(), e.at("tag").get<std::string>()});
  return l;
}

json to_json(const Verdict& v) {
  return {{"candidate_id", v.candidate_id}, {"decision", to_string(v.decision)}, {"note", v.note}, {"reviewer", v.reviewer}, {"at", v.at}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.candidate_id = j.at("candidate_id").get<std::string>();
  auto d = decision_from_string(j.at("decision").get<std::string>());
  if (!d) throw std::invalid_argument("unknown decision");
  v.decision = *d;
  v.note = j.at("note").get<std::string>();
  v.reviewer = j.at("reviewer").get<std::string>();
  v.at = j.at("at").get<std::uint64_t>();
  return v;
}

json to_json(const SearchCost& s) {
  return {
      {"nodes_total", s.nodes_total},
      {"stable_move", s.stable_move ? json(s.stable_move->uci()) : json(nullptr)},
      {"first_stable_depth", opt(s.first_stable_depth)},
      {"adversarial", s.adversarial},
      {"threshold", s.threshold},
      {"error", opt(s.error)},
  };
}

SearchCost search_cost_from_json(const json& j) {
  SearchCost s;
  s.nodes_total = j.at("nodes_total").get<std::uint64_t>();
  if (!j.at("stable_move").is_null()) s.stable_move = move_from_uci_text(j.at("stable_move").get<std::string>());
  if (!j.at("first_stable_depth").is_null()) s.first_stable_depth = j.at("first_stable_depth").get<int>();
  s.adversarial = j.at("adversarial").get<bool>();
  s.threshold = j.at("threshold").get<std::uint64_t>();
  if (!j.at("error").is_null()) s.error = j.at("error").get<std::string>();
  return s;
}

json to_json(const sources::GenerationStats& s) {
  return {{"round", s.round},
          {"samples", s.samples},
          {"legal_fraction", s.legal_fraction},
          {"mean_reward", s.mean_reward},
          {"max_reward", s.max_reward},
          {"unique_fraction", s.unique_fraction},
          {"failed", s.failed}};
}

sources::GenerationStats stats_from_json(const json& j) {
  sources::GenerationStats s;
  s.round = j.at("round").get<int>();
  s.samples = j.at("samples").get<int>();
  s.legal_fraction = j.at("legal_fraction").get<double>();
  s.mean_reward = j.at("mean_reward").get<double>();
  s.max_reward = j.at("max_reward").get<double>();
  s.unique_fraction = j.at("unique_fraction").get<double>();
  s.failed = j.at("failed").get<int>();
  return s;
}

json to_json(const PuzzleCandidate& c) {
  json j = {{"id", c.id}, {"fen", c.fen}, {"sources", c.sources}, {"created_at", c.created_at}};
  j["reward_report"] = c.reward_report ? to_json(*c.reward_report) : json(nullptr);
  j["strong_depth"] = c.strong_depth;
  j["weak_depth"] = c.weak_depth;
  if (c.themes) {
    json t = json::array();
    for (const auto& l : *c.themes) t.push_back(to_json(l));
    j["themes"] = t;
  } else {
    j["themes"] = nullptr;
  }
  if (c.neighbors) {
    json n = json::array();
    for (const auto& nb : *c.neighbors) n.push_back({{"source_id", nb.source_id}, {"similarity", nb.similarity}, {"fen", nb.fen}});
    j["neighbors"] = n;
  } else {
    j["neighbors"] = nullptr;
  }
  j["duplicate"] = c.duplicate;
  j["search_cost"] = c.search_cost ? to_json(*c.search_cost) : json(nullptr);
  json v = json::array();
  for (const auto& x : c.verdicts) v.push_back(to_json(x));
  j["verdicts"] = v;
  return j;
}

PuzzleCandidate candidate_from_json(const json& j) {
  PuzzleCandidate c;
  c.id = j.at("id").get<std::string>();
  c.fen = j.at("fen").get<std::string>();
  c.sources = j.at("sources").get<std::vector<std::string>>();
  c.created_at = j.at("created_at").get<std::uint64_t>();
  if (!j.at("reward_report").is_null()) c.reward_report = report_from_json(j.at("reward_report"));
  c.strong_depth = j.at("strong_depth").get<int>();
  c.weak_depth = j.at("weak_depth").get<int>();
  if (!j.at("themes").is_null()) {
    c.themes.emplace();
    for (const auto& l : j.at("themes")) c.themes->push_back(theme_label_from_json(l));
  }
  if (!j.at("neighbors").is_null()) {
    c.neighbors.emplace();
    for (const auto& n : j.at("neighbors"))
      c.neighbors->push_back({n.at("source_id").get<std::string>(), n.at("similarity").get<double>(), n.at("fen").get<std::string>()});
  }
  c.duplicate = j.at("duplicate").get<bool>();
  if (!j.at("search_cost").is_null()) c.search_cost = search_cost_from_json(j.at("search_cost"));
  for (const auto& v : j.at("verdicts")) c.verdicts.push_back(verdict_from_json(v));
  return c;
}

}  // namespace foundry::pipeline
