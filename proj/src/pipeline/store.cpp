#include "foundry/pipeline/store.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace foundry::pipeline {

namespace events {

json candidate_added(const std::string& id, const std::string& fen, const std::string& source) {
  return {{"event", "candidate-added"}, {"id", id}, {"fen", fen}, {"source", source}};
}

json scored(const std::string& id, const reward::RewardReport& report, int strong_depth, int weak_depth) {
  return {{"event", "scored"}, {"id", id}, {"report", to_json(report)}, {"strong_depth", strong_depth}, {"weak_depth", weak_depth}};
}

json labeled(const std::string& id, const std::vector<themes::ThemeLabel>& labels) {
  json t = json::array();
  for (const auto& l : labels) t.push_back(to_json(l));
  return {{"event", "labeled"}, {"id", id}, {"themes", t}};
}

json novelty(const std::string& id, const std::vector<CorpusNeighbor>& neighbors, bool duplicate) {
  json n = json::array();
  for (const auto& nb : neighbors) n.push_back({{"source_id", nb.source_id}, {"similarity", nb.similarity}, {"fen", nb.fen}});
  return {{"event", "novelty"}, {"id", id}, {"neighbors", n}, {"duplicate", duplicate}};
}

json probed(const std::string& id, const SearchCost& cost) { return {{"event", "probed"}, {"id", id}, {"cost", to_json(cost)}}; }

json verdict(const std::string& id, Decision decision, const std::string& note, const std::string& reviewer) {
  return {{"event", "verdict"}, {"id", id}, {"decision", to_string(decision)}, {"note", note}, {"reviewer", reviewer}};
}

json generation_stats(const std::string& source, const sources::GenerationStats& stats) {
  return {{"event", "generation-stats"}, {"source", source}, {"stats", to_json(stats)}};
}

}  // namespace events

const PuzzleCandidate* Store::find(const std::string& id) const {
  auto it = candidates_.find(id);
  return it == candidates_.end() ? nullptr : &it->second;
}

const PuzzleCandidate& Store::at(const std::string& id) const {
  if (auto* c = find(id)) return *c;
  throw UnknownCandidate(id);
}

void Store::apply(const json& e) {
  try {
    auto seq = e.at("seq").get<std::uint64_t>();
    if (seq != next_seq_) throw LogFormatError("expected seq " + std::to_string(next_seq_) + ", got " + std::to_string(seq));
    const auto type = e.at("event").get<std::string>();

    if (type == "generation-stats") {
      stats_.push_back({e.at("source").get<std::string>(), stats_from_json(e.at("stats")), seq});
      ++next_seq_;
      return;
    }

    const auto id = e.at("id").get<std::string>();
    if (type == "candidate-added") {
      auto source = e.at("source").get<std::string>();
      auto [it, fresh] = candidates_.try_emplace(id);
      auto& c = it->second;
      if (fresh) {
        c.id = id;
        c.fen = e.at("fen").get<std::string>();
        c.created_at = seq;
      }
      if (std::find(c.sources.begin(), c.sources.end(), source) == c.sources.end()) c.sources.push_back(source);
      ++next_seq_;
      return;
    }

    auto it = candidates_.find(id);
    if (it == candidates_.end()) throw LogFormatError("event for unknown candidate " + id);
    auto& c = it->second;
    if (type == "scored") {
      int depth = e.at("strong_depth").get<int>();
      // Upsert: a deeper analysis replaces a shallower one, never the reverse.
      if (!c.reward_report || depth >= c.strong_depth) {
        c.reward_report = report_from_json(e.at("report"));
        c.strong_depth = depth;
        c.weak_depth = e.at("weak_depth").get<int>();
      }
    } else if (type == "labeled") {
      c.themes.emplace();
      for (const auto& l : e.at("themes")) c.themes->push_back(theme_label_from_json(l));
    } else if (type == "novelty") {
      c.neighbors.emplace();
      for (const auto& n : e.at("neighbors"))
        c.neighbors->push_back({n.at("source_id").get<std::string>(), n.at("similarity").get<double>(), n.at("fen").get<std::string>()});
      c.duplicate = e.at("duplicate").get<bool>();
    } else if (type == "probed") {
      c.search_cost = search_cost_from_json(e.at("cost"));
    } else if (type == "verdict") {
      auto d = decision_from_string(e.at("decision").get<std::string>());
      if (!d) throw LogFormatError("bad decision");
      Verdict v{id, *d, e.at("note").get<std::string>(), e.at("reviewer").get<std::string>(), seq};
      auto pos = std::lower_bound(c.verdicts.begin(), c.verdicts.end(), v.reviewer,
                                  [](const Verdict& a, const std::string& r) { return a.reviewer < r; });
      if (pos != c.verdicts.end() && pos->reviewer == v.reviewer)
        *pos = v;
      else
        c.verdicts.insert(pos, v);
    } else {
      throw LogFormatError("unknown event " + type);
    }
    ++next_seq_;
  } catch (const LogFormatError&) {
    throw;
  } catch (const std::exception& ex) {
    throw LogFormatError(std::string("malformed event: ") + ex.what());
  }
}

json Store::snapshot() const {
  json c = json::array();
  for (const auto& [id, cand] : candidates_) c.push_back(to_json(cand));
  json s = json::array();
  for (const auto& r : stats_) s.push_back({{"source", r.source}, {"stats", to_json(r.stats)}, {"at", r.at}});
  return {{"candidates", c}, {"stats", s}, {"next_seq", next_seq_}};
}

namespace {

// Applies complete lines; returns the byte offset after the last complete line.
std::uint64_t load_into(Store& store, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail
    ++line_no;
    auto line = text.substr(pos, nl - pos);
    json e;
    try {
      e = json::parse(line);
    } catch (const json::parse_error& ex) {
      throw LogFormatError(path + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    store.apply(e);
    pos = nl + 1;
  }
  return pos;
}

}  // namespace

Store replay(const std::string& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("no such log: " + path);
  Store s;
  load_into(s, path);
  return s;
}

Journal::Journal(std::string path) : path_(std::move(path)) {
  auto good = load_into(store_, path_);
  if (std::filesystem::exists(path_) && std::filesystem::file_size(path_) != good) std::filesystem::resize_file(path_, good);
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open log " + path_);
}

std::uint64_t Journal::append_locked(json& event) {
  event["seq"] = store_.next_seq();
  store_.apply(event);
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed on " + path_);
  return event["seq"].get<std::uint64_t>();
}

std::uint64_t Journal::append(json event) {
  std::unique_lock lock(mu_);
  return append_locked(event);
}

void Journal::append_all(std::vector<json> evs) {
  std::unique_lock lock(mu_);
  for (auto& e : evs) append_locked(e);
}

std::string Journal::add_candidate(const Position& p, const std::string& source) {
  std::string id = candidate_id(p);
  std::unique_lock lock(mu_);
  if (auto* c = store_.find(id); c && std::find(c->sources.begin(), c->sources.end(), source) != c->sources.end()) return id;
  json e = events::candidate_added(id, serialize_fen(parse_fen(canonical_fen(p))), source);
  append_locked(e);
  return id;
}

PuzzleCandidate Journal::record_verdict(const std::string& id, Decision decision, const std::string& note, const std::string& reviewer) {
  std::unique_lock lock(mu_);
  const auto& c = store_.at(id);
  auto same = std::find_if(c.verdicts.begin(), c.verdicts.end(), [&](const Verdict& v) {
    return v.reviewer == reviewer && v.decision == decision && v.note == note;
  });
  if (same == c.verdicts.end()) {
    json e = events::verdict(id, decision, note, reviewer);
    append_locked(e);
  }
  return store_.at(id);
}

}  // namespace foundry::pipeline
