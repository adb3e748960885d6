#include "foundry/pipeline/corpus.hpp"

#include <boost/tokenizer.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "foundry/board/notation.hpp"

namespace foundry::pipeline {

namespace {

const std::vector<std::string> kColumns = {"PuzzleId", "FEN",    "Moves",   "Rating",   "RatingDeviation",
                                           "Popularity", "NbPlays", "Themes", "GameUrl"};

std::vector<std::string> split_csv(const std::string& line) {
  boost::tokenizer<boost::escaped_list_separator<char>> tok(line);
  return {tok.begin(), tok.end()};
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace

IngestResult ingest_lichess_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw HeaderMismatch("empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  bool ok = (header.size() == kColumns.size() || (header.size() == kColumns.size() + 1 && header.back() == "OpeningTags")) &&
            std::equal(kColumns.begin(), kColumns.end(), header.begin());
  if (!ok) throw HeaderMismatch("unexpected header: " + line);

  IngestResult res;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++res.rows;
    auto skip = [&](std::string why) { res.skipped.push_back({line_no, std::move(why)}); };

    std::vector<std::string> f;
    try {
      f = split_csv(line);
    } catch (const boost::escaped_list_error& e) {
      skip(std::string("bad quoting: ") + e.what());
      continue;
    }
    if (f.size() != header.size()) {
      skip("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
      continue;
    }

    CorpusRecord r;
    r.puzzle_id = f[0];
    if (r.puzzle_id.empty()) {
      skip("empty PuzzleId");
      continue;
    }
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), r.rating);
    if (ec != std::errc() || ptr != f[3].data() + f[3].size()) {
      skip("bad Rating '" + f[3] + "'");
      continue;
    }
    Position start;
    try {
      start = parse_fen(f[1]);
    } catch (const std::exception& e) {
      skip(std::string("bad FEN: ") + e.what());
      continue;
    }
    if (serialize_fen(start) == f[1]) ++res.fen_round_trips;

    auto moves = split_ws(f[2]);
    if (moves.size() < 2) {
      skip("fewer than two moves");
      continue;
    }
    // The first move is the opponent's; the solver faces the position after it.
    Position p = start;
    Position solver_start;
    bool legal = true;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      try {
        p = apply_move(p, parse_uci(p, moves[i]));
      } catch (const std::exception& e) {
        skip("illegal move " + std::to_string(i + 1) + " '" + moves[i] + "': " + e.what());
        legal = false;
        break;
      }
      if (i == 0) solver_start = p;
    }
    if (!legal) continue;
    r.fen = serialize_fen(solver_start);
    r.moves.assign(moves.begin() + 1, moves.end());
    r.themes = split_ws(f[7]);
    res.records.push_back(std::move(r));
  }
  return res;
}

void save_corpus(const std::vector<CorpusRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : records) {
    nlohmann::json j = {{"puzzle_id", r.puzzle_id}, {"fen", r.fen}, {"moves", r.moves}, {"rating", r.rating}, {"themes", r.themes}};
    out << j.dump() << '\n';
  }
}

std::vector<CorpusRecord> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path);
  std::vector<CorpusRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    out.push_back({j.at("puzzle_id").get<std::string>(), j.at("fen").get<std::string>(),
                   j.at("moves").get<std::vector<std::string>>(), j.at("rating").get<int>(),
                   j.at("themes").get<std::vector<std::string>>()});
  }
  return out;
}

}  // namespace foundry::pipeline
