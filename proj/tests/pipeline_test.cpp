#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "foundry/board/notation.hpp"
#include "foundry/pipeline/corpus.hpp"
#include "foundry/pipeline/rank.hpp"
#include "foundry/pipeline/steps.hpp"
#include "support/engines.hpp"
#include "support/fixtures.hpp"
#include "support/stores.hpp"

using namespace foundry;
using namespace foundry::pipeline;
using test_engines::fresh_path;
using test_stores::report_for;
using test_stores::seed_candidates;

namespace {

const char* kMainPuzzle = "1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8 w";

std::string write_file(const std::string& stem, const std::string& text) {
  auto path = fresh_path(stem);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kHeader = "PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl,OpeningTags\n";

}  // namespace

TEST_CASE("candidate ids are stable under re-serialization") {
  auto positions = test_positions::random_playouts(500, 11, 0, 60);
  std::set<std::string> canon;
  std::set<std::string> ids;
  for (auto p : positions) {
    auto id = candidate_id(p);
    CHECK(id.size() == 16);
    CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(candidate_id(parse_fen(serialize_fen(p))) == id);
    p.halfmove_clock = 37;
    p.fullmove_number = 90;
    CHECK(candidate_id(p) == id);
    canon.insert(canonical_fen(p));
    ids.insert(id);
  }
  CHECK(ids.size() == canon.size());
  Position a = parse_fen(kMainPuzzle);
  Position b = a;
  b.side_to_move = Color::Black;
  CHECK(candidate_id(a) != candidate_id(b));
  CHECK(canonical_fen(a) == "1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8 w - -");
}

TEST_CASE("analysis links encode spaces and keep slashes") {
  CHECK(lichess_analysis_url("1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8 w - - 0 1") ==
        "https://lichess.org/analysis/1r1r2k1/Q2p1R1p/2p2R2/1p3pB1/1P4q1/8/5K2/8%20w%20-%20-%200%201");
}

TEST_CASE("coordinate move text") {
  CHECK(move_from_uci_text("e7e8n").promotion == PieceKind::Knight);
  CHECK(move_from_uci_text("e1g1").uci() == "e1g1");
  CHECK_THROWS(move_from_uci_text("e7e8k"));
  CHECK_THROWS(move_from_uci_text("z1a2"));
  CHECK_THROWS(move_from_uci_text("e2"));
}

TEST_CASE("property: candidate records round-trip through JSON") {
  Journal j(fresh_path("store"));
  seed_candidates(j, 60, 5);
  j.read([](const Store& s) {
    for (const auto& [id, c] : s.candidates()) {
      auto back = candidate_from_json(json::parse(to_json(c).dump()));
      CHECK(to_json(back) == to_json(c));
      CHECK(candidate_id(back.position()) == id);
    }
    return 0;
  });
}

TEST_CASE("replaying the log reconstructs the store") {
  auto path = fresh_path("store");
  json live;
  {
    Journal j(path);
    auto ids = seed_candidates(j, 80, 7);
    j.record_verdict(ids[0], Decision::Accepted, "nice", "ann");
    j.record_verdict(ids[1], Decision::Rejected, "", "bo");
    SearchCost cost;
    cost.nodes_total = 1234;
    cost.threshold = 1000;
    cost.adversarial = true;
    cost.stable_move = move_from_uci_text("e2e4");
    j.append(events::probed(ids[2], cost));
    j.append(events::generation_stats("ngram", {0, 100, 0.25, 0.1, 0.75, 0.2, 1}));
    live = j.read([](const Store& s) { return s.snapshot(); });
  }
  CHECK(replay(path).snapshot() == live);

  // Reopening continues the sequence.
  Journal again(path);
  CHECK(again.read([](const Store& s) { return s.snapshot(); }) == live);
  auto seq = again.append(events::generation_stats("ngram", {1, 10, 1, 0, 0, 0, 0}));
  CHECK(seq == live["next_seq"].get<std::uint64_t>());
  CHECK(replay(path).snapshot() == again.read([](const Store& s) { return s.snapshot(); }));
}

TEST_CASE("the same position from two sources is one record") {
  Journal j(fresh_path("store"));
  Position p = parse_fen(kMainPuzzle);
  auto id1 = j.add_candidate(p, "ngram");
  Position q = p;
  q.fullmove_number = 33;
  auto id2 = j.add_candidate(q, "evolution-gen-7");
  auto id3 = j.add_candidate(p, "ngram");
  CHECK(id1 == id2);
  CHECK(id1 == id3);
  j.read([&](const Store& s) {
    CHECK(s.candidates().size() == 1);
    CHECK(s.at(id1).sources == std::vector<std::string>{"ngram", "evolution-gen-7"});
    CHECK(s.at(id1).created_at == 0);
    CHECK(s.next_seq() == 2);  // the repeat was not logged
    return 0;
  });
}

TEST_CASE("deeper scores win the upsert") {
  Journal j(fresh_path("store"));
  Position p = parse_fen(kMainPuzzle);
  auto id = j.add_candidate(p, "ngram");
  j.append(events::scored(id, report_for(p, 0.5, 0.5), 12, 4));
  j.append(events::scored(id, report_for(p, 0.25, 0.25), 10, 4));
  auto reward = [&] { return j.read([&](const Store& s) { return s.at(id).reward_report->reward; }); };
  CHECK(reward() == 0.5);
  j.append(events::scored(id, report_for(p, 1.0, 1.0), 18, 4));
  CHECK(reward() == 1.0);
  CHECK(j.read([&](const Store& s) { return s.at(id).strong_depth; }) == 18);
}

TEST_CASE("log damage") {
  auto path = fresh_path("store");
  {
    Journal j(path);
    j.add_candidate(parse_fen(kMainPuzzle), "ngram");
  }
  auto good = read_file(path);

  SUBCASE("a torn final line is dropped on open") {
    std::ofstream(path, std::ios::binary | std::ios::app) << R"({"event":"candidate-added","id":"ab)";
    Journal j(path);
    CHECK(read_file(path) == good);
    j.add_candidate(parse_fen("8/8/4k3/8/8/4K3/8/8 w"), "ngram");
    CHECK(replay(path).candidates().size() == 2);
  }
  SUBCASE("a malformed complete line is an error") {
    std::ofstream(path, std::ios::binary | std::ios::app) << "{not json}\n";
    CHECK_THROWS_AS(Journal{path}, LogFormatError);
  }
  SUBCASE("sequence gaps are an error") {
    std::ofstream(path, std::ios::binary | std::ios::app)
        << R"({"event":"generation-stats","seq":5,"source":"x","stats":{"round":0,"samples":0,"legal_fraction":0,"mean_reward":0,"max_reward":0,"unique_fraction":0,"failed":0}})"
        << "\n";
    CHECK_THROWS_AS(replay(path), LogFormatError);
  }
  SUBCASE("events for unknown candidates are an error") {
    std::ofstream(path, std::ios::binary | std::ios::app)
        << R"({"event":"labeled","seq":1,"id":"0000000000000000","themes":[]})" << "\n";
    CHECK_THROWS_AS(replay(path), LogFormatError);
  }
}

TEST_CASE("verdicts") {
  Journal j(fresh_path("store"));
  auto id = j.add_candidate(parse_fen(kMainPuzzle), "ngram");
  auto seq = [&] { return j.read([](const Store& s) { return s.next_seq(); }); };

  CHECK_FALSE(j.read([&](const Store& s) { return s.at(id).status(); }));
  j.record_verdict(id, Decision::Accepted, "", "ann");
  auto c = j.record_verdict(id, Decision::Rejected, "too easy", "ann");
  CHECK(c.status() == Decision::Rejected);
  CHECK(c.verdicts.size() == 1);

  auto before = seq();
  j.record_verdict(id, Decision::Rejected, "too easy", "ann");
  CHECK(seq() == before);

  c = j.record_verdict(id, Decision::Accepted, "lovely", "bo");
  CHECK(c.verdicts.size() == 2);
  CHECK(c.status(ExportPolicy::AnyAccept) == Decision::Accepted);
  CHECK(c.status(ExportPolicy::Unanimous) == Decision::Rejected);
  c = j.record_verdict(id, Decision::Accepted, "fine after all", "ann");
  CHECK(c.status(ExportPolicy::Unanimous) == Decision::Accepted);

  CHECK_THROWS_AS(j.record_verdict("ffffffffffffffff", Decision::Accepted, "", "ann"), UnknownCandidate);
}

TEST_CASE("ingest: well-formed rows") {
  auto path = write_file("csv", std::string(kHeader) +
                                    "00sHx,q3k1nr/1pp1nQpp/3p4/1P2p3/4P3/B1PP1b2/B5PP/5K2 b k - 0 17,e8d7 a2e6 d7d8 f7f8,1760,80,83,72,"
                                    "mate mateIn2 middlegame short,https://lichess.org/yyznGmXs/black#34,Italian_Game\n"
                                    "00sJ9,r3r1k1/p4ppp/2p2n2/1p6/3P1qb1/2NQR3/PPB2PP1/R1B3K1 w - - 5 18,e3g3 e8e1 g1h2 e1c1 a1c1 f4h6 "
                                    "h2g1 h6c1,2671,105,87,325,advantage attraction fork long sacrifice veryLong,"
                                    "https://lichess.org/gyFeQsOE#35,French_Defense\n"
                                    "00sJb,Q1b2r1k/p2np2p/5bp1/q7/5P2/4B3/PPP3PP/2KR1B1R w - - 1 17,d1d7 a5e1 d7d1 e1e3 c1b1 e3b6,2235,76,97,64,"
                                    "advantage fork long,https://lichess.org/kiuvTFoE#33,\n");
  auto res = ingest_lichess_csv(path);
  REQUIRE(res.records.size() == 3);
  CHECK(res.skipped.empty());
  CHECK(res.fen_round_trips == 3);
  const auto& r = res.records[0];
  CHECK(r.puzzle_id == "00sHx");
  CHECK(r.rating == 1760);
  CHECK(r.moves == std::vector<std::string>{"a2e6", "d7d8", "f7f8"});
  CHECK(r.themes == std::vector<std::string>{"mate", "mateIn2", "middlegame", "short"});
  // The solver faces the position after the opponent's first move.
  CHECK(r.fen == "q5nr/1ppknQpp/3p4/1P2p3/4P3/B1PP1b2/B5PP/5K2 w - - 1 18");
}

TEST_CASE("ingest: bad rows are skipped with reasons") {
  auto path = write_file("csv", std::string(kHeader) +
                                    "a1,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4 e6d6 e2e4,1500,80,90,10,endgame,,\n"
                                    "a2,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4 e6e4 e2e4,1500,80,90,10,endgame,,\n"
                                    "a3,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4,1500,80,90,10,endgame,,\n"
                                    "a4,8/8/4k3/8/8/4K3/4P3/9 w - - 0 1,e3d4 e6d6,1500,80,90,10,endgame,,\n"
                                    "a5,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4 e6d6,15x0,80,90,10,endgame,,\n"
                                    "a6,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4 e6d6,1500,80,90\n");
  auto res = ingest_lichess_csv(path);
  CHECK(res.rows == 6);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].puzzle_id == "a1");
  REQUIRE(res.skipped.size() == 5);
  CHECK(res.skipped[0].line == 3);
  CHECK(res.skipped[0].reason.find("illegal move 2 'e6e4'") != std::string::npos);
  CHECK(res.skipped[1].reason.find("fewer than two") != std::string::npos);
  CHECK(res.skipped[2].reason.find("bad FEN") != std::string::npos);
  CHECK(res.skipped[3].reason.find("bad Rating") != std::string::npos);
  CHECK(res.skipped[4].reason.find("fields") != std::string::npos);
}

TEST_CASE("ingest: file and header errors") {
  CHECK_THROWS_AS(ingest_lichess_csv(fresh_path("missing")), FileNotFound);
  CHECK_THROWS_AS(ingest_lichess_csv(write_file("csv", "PuzzleId,FEN,Moves\n")), HeaderMismatch);
  CHECK_THROWS_AS(ingest_lichess_csv(write_file("csv", "")), HeaderMismatch);
  // The dump without OpeningTags is accepted.
  auto res = ingest_lichess_csv(write_file(
      "csv", "PuzzleId,FEN,Moves,Rating,RatingDeviation,Popularity,NbPlays,Themes,GameUrl\n"
             "b1,8/8/4k3/8/8/4K3/4P3/8 w - - 0 1,e3d4 e6d6,1500,80,90,10,endgame,\n"));
  CHECK(res.records.size() == 1);
}

TEST_CASE("ingest: the synthetic 10k dump") {
  auto res = ingest_lichess_csv(FOUNDRY_SYNTH_CSV);
  CHECK(res.rows == 10000);
  // Measured on the first run: the generator only writes legal rows.
  CHECK(res.skipped.size() == 0);
  CHECK(static_cast<double>(res.skipped.size()) / res.rows < 0.01);
  CHECK(res.fen_round_trips == res.rows);
  std::size_t mates = 0;
  for (const auto& r : res.records) mates += std::find(r.themes.begin(), r.themes.end(), "mateIn2") != r.themes.end();
  CHECK(mates == 60);

  auto path = fresh_path("corpus");
  save_corpus(res.records, path);
  CHECK(load_corpus(path) == res.records);
}

TEST_CASE("rank_and_select") {
  SUBCASE("empty store") {
    Store s;
    auto m = rank_and_select(s);
    CHECK(m.themes.empty());
    CHECK(m.per_theme == 50);
  }
  SUBCASE("a candidate with three themes is listed three times") {
    Journal j(fresh_path("store"));
    Position p = parse_fen(kMainPuzzle);
    auto id = j.add_candidate(p, "ngram");
    j.append(events::scored(id, report_for(p, 1.0, 1.0), 18, 4));
    j.append(events::labeled(id, {{themes::Theme::Sacrifice, {}}, {themes::Theme::Xray, {}}, {themes::Theme::Switchback, {}}}));
    auto m = j.read([](const Store& s) { return rank_and_select(s); });
    REQUIRE(m.themes.size() == 3);
    CHECK(m.themes[0].theme == themes::Theme::Sacrifice);
    CHECK(m.themes[1].theme == themes::Theme::Xray);
    CHECK(m.themes[2].theme == themes::Theme::Switchback);
    for (const auto& t : m.themes) CHECK(t.ids == std::vector<std::string>{id});
  }
  SUBCASE("ordering matches an independent sort") {
    Journal j(fresh_path("store"));
    seed_candidates(j, 400, 21);
    j.read([](const Store& s) {
      for (int k : {1, 5, 50, 1000}) {
        auto m = rank_and_select(s, k);
        for (const auto& sel : m.themes) {
          using Key = std::tuple<double, double, double, std::string>;
          std::vector<Key> keys;
          for (const auto& [id, c] : s.candidates()) {
            bool has = false;
            for (const auto& l : *c.themes) has |= l.theme == sel.theme;
            if (!has || c.duplicate || c.reward_report->score_failed) continue;
            keys.emplace_back(-c.reward_report->reward, -c.reward_report->ci_score, c.neighbors->front().similarity, id);
          }
          std::sort(keys.begin(), keys.end());
          std::vector<std::string> expect;
          for (std::size_t i = 0; i < keys.size() && i < static_cast<std::size_t>(k); ++i) expect.push_back(std::get<3>(keys[i]));
          CHECK(sel.ids == expect);
        }
      }
      return 0;
    });
  }
  SUBCASE("failed and duplicate candidates are not ranked") {
    Journal j(fresh_path("store"));
    Position p = parse_fen(kMainPuzzle);
    auto id = j.add_candidate(p, "ngram");
    auto r = report_for(p, 1.0, 1.0);
    j.append(events::scored(id, r, 18, 4));
    j.append(events::labeled(id, {{themes::Theme::Sacrifice, {}}}));
    j.append(events::novelty(id, {{"x", 0.9, "8/8/8/8/8/8/8/K6k w - - 0 1"}}, true));
    CHECK(j.read([](const Store& s) { return rank_and_select(s).themes.size(); }) == 0);
  }
}

TEST_CASE("numbered lines") {
  Position p = parse_fen(kMainPuzzle);
  auto line = parse_san_line(p, std::vector<std::string>{"Rg6+", "Kxf7", "Qa1"});
  CHECK(numbered_line(p, line) == "1. Rg6+ Kxf7 2. Qa1");
  Position b = parse_fen("6k1/5ppp/8/8/8/8/5PPP/3R2K1 b");
  CHECK(numbered_line(b, parse_san_line(b, std::vector<std::string>{"h6", "Rd8+", "Kh7"})) == "1... h6 2. Rd8+ Kh7");
  CHECK(numbered_line(p, {}).empty());
}

TEST_CASE("booklet export") {
  Journal j(fresh_path("store"));
  Position up = parse_fen("1q4rk/ppr1PQpp/1b3R2/3R4/1P6/4P3/P5PP/6K1 w");
  auto line = parse_san_line(up, std::vector<std::string>{"Rd8", "Qxd8", "exd8=N"});
  auto id = j.add_candidate(up, "evolution-gen-12");
  auto rep = report_for(up, 0.75, 0.75);
  rep.solution_line = line;
  rep.uniqueness.winning_move = line.front();
  j.append(events::scored(id, rep, 18, 4));
  j.append(events::labeled(id, {{themes::Theme::Underpromotion, {{3, "knight"}}}}));
  j.append(events::novelty(id, {{"p1", 0.41, "1q4rk/pp3Qpp/8/8/8/8/6PP/6K1 w - - 0 30"}}, false));

  auto export_md = [&] { return j.read([](const Store& s) { return export_booklet(s, BookletFormat::Markdown); }); };
  CHECK_THROWS_AS(export_md(), NothingAccepted);

  j.record_verdict(id, Decision::Accepted, "", "ann");
  auto md = export_md();
  CHECK(md.find("## Underpromotion") != std::string::npos);
  CHECK(md.find("\n## ", md.find("## Underpromotion") + 1) == std::string::npos);  // one section
  CHECK(md.find("[Analyse on Lichess](https://lichess.org/analysis/1q4rk/ppr1PQpp/1b3R2/3R4/1P6/4P3/P5PP/6K1%20w%20-%20-%200%201)") !=
        std::string::npos);
  CHECK(md.find("White to move.") != std::string::npos);
  CHECK(md.find("Solution: 1. Rd8 Qxd8 2. exd8=N") != std::string::npos);
  CHECK(md.find("- [1q4rk/pp3Qpp/8/8/8/8/6PP/6K1 w - - 0 30](https://lichess.org/analysis/1q4rk/pp3Qpp/8/8/8/8/6PP/6K1%20w%20-%20-%200%2030)") !=
        std::string::npos);

  // Section order follows the booklet, not insertion.
  Position sac = parse_fen(kMainPuzzle);
  auto id2 = j.add_candidate(sac, "ngram");
  j.append(events::scored(id2, report_for(sac, 1.0, 1.0), 18, 4));
  j.append(events::labeled(id2, {{themes::Theme::Sacrifice, {}}, {themes::Theme::Underpromotion, {}}}));
  j.record_verdict(id2, Decision::Accepted, "", "bo");
  md = export_md();
  auto s1 = md.find("## Sacrifice");
  auto s2 = md.find("## Underpromotion");
  REQUIRE(s1 != std::string::npos);
  CHECK(s1 < s2);
  // Higher reward first within the section.
  CHECK(md.find("1r1r2k1", s2) < md.find("1q4rk/ppr1PQpp", s2));

  auto doc = j.read([](const Store& s) { return export_booklet(s, BookletFormat::Json); });
  auto back = import_booklet_json(doc);
  REQUIRE(back.size() == 2);
  j.read([&](const Store& s) {
    for (const auto& c : back) CHECK(to_json(c) == to_json(s.at(c.id)));
    return 0;
  });
  CHECK(json::parse(doc)["sections"][0]["entries"][0]["lichess_url"].get<std::string>().rfind("https://lichess.org/analysis/", 0) == 0);
  CHECK_THROWS(import_booklet_json(R"({"format":"other"})"));
}

TEST_CASE("unanimous export policy") {
  Journal j(fresh_path("store"));
  Position p = parse_fen(kMainPuzzle);
  auto id = j.add_candidate(p, "ngram");
  j.append(events::scored(id, report_for(p, 1.0, 1.0), 18, 4));
  j.record_verdict(id, Decision::Accepted, "", "ann");
  j.record_verdict(id, Decision::Rejected, "", "bo");
  j.read([](const Store& s) {
    CHECK_NOTHROW(export_booklet(s, BookletFormat::Markdown, ExportPolicy::AnyAccept));
    CHECK_THROWS_AS(export_booklet(s, BookletFormat::Markdown, ExportPolicy::Unanimous), NothingAccepted);
    // Unlabeled puzzles land in the last section.
    CHECK(export_booklet(s, BookletFormat::Markdown).find("## Uncategorized") != std::string::npos);
    return 0;
  });
}

TEST_CASE("percentile thresholds") {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = 1; i <= 100; ++i) v.push_back(i * 10);
  CHECK(percentile_threshold(v, 95) == 950);
  CHECK(percentile_threshold(v, 100) == 1000);
  CHECK(percentile_threshold(v, 0.5) == 10);
  CHECK(percentile_threshold({7}, 95) == 7);
  CHECK_THROWS(percentile_threshold({}, 95));
  CHECK_THROWS(percentile_threshold(v, 0));

  // Property: raising the percentile never lowers the threshold, so never adds flags.
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::uint64_t> sample(1 + rng() % 150);
    for (auto& x : sample) x = rng() % 100000;
    std::vector<std::uint64_t> probes(30);
    for (auto& x : probes) x = rng() % 120000;
    double lo = 1 + static_cast<double>(rng() % 990) / 10.0;
    double hi = std::min(100.0, lo + static_cast<double>(rng() % 500) / 10.0);
    auto tl = percentile_threshold(sample, lo);
    auto th = percentile_threshold(sample, hi);
    CHECK(tl <= th);
    for (auto x : probes)
      if (x > th) CHECK(x > tl);
  }
}

TEST_CASE("corpus sampling is deterministic") {
  std::vector<CorpusRecord> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back({"p" + std::to_string(i), "8/8/4k3/8/8/4K3/8/8 w - - 0 1", {}, 1500, {}});
  auto a = sample_corpus(corpus, 10, 3);
  CHECK(a == sample_corpus(corpus, 10, 3));
  CHECK(a.size() == 10);
  CHECK(sample_corpus(corpus, 100, 3).size() == 50);
  std::set<std::string> ids;
  for (const auto& r : a) ids.insert(r.puzzle_id);
  CHECK(ids.size() == 10);
}

TEST_CASE("generate without engines fails before sampling") {
  auto dir = test_engines::scratch_dir() / "failfast";
  std::filesystem::create_directories(dir);
  auto store = (dir / "store.jsonl").string();
  std::string cmd = std::string(FOUNDRY_CLI_PATH) + " --store " + store + " --corpus " + (dir / "missing.jsonl").string() +
                    " --model " + (dir / "missing.ngram").string() + " generate --source ngram -n 100 2>" +
                    (dir / "err.txt").string();
  int rc = std::system(cmd.c_str());
  CHECK(rc != 0);
  CHECK_FALSE(std::filesystem::exists(store));
  CHECK(read_file((dir / "err.txt").string()).find("no engines configured") != std::string::npos);
}

TEST_CASE("scoring with dead engines aborts and leaves a resumable log") {
  auto path = fresh_path("store");
  Journal j(path);
  j.add_candidate(parse_fen(kMainPuzzle), "ngram");
  j.add_candidate(parse_fen("8/8/4k3/8/8/4K3/4P3/8 w"), "ngram");
  auto before = read_file(path);
  auto dead = test_engines::fake_profile("on go\n@exit\n");
  auto weak = dead;
  weak.role = uci::EngineRole::Weak;
  weak.depth_limit = 4;
  uci::EnginePool pool(dead, weak, 1);
  reward::RewardConfig cfg;
  cfg.strong_depth = 12;
  CHECK_THROWS_AS(score_pending(j, pool, cfg), ScoringAborted);
  CHECK(read_file(path) == before);
  CHECK(j.read([](const Store& s) { return s.next_seq(); }) == 2);
}

TEST_CASE("order-8 model on the synthetic corpus keeps its legal fraction") {
  auto recs = ingest_lichess_csv(FOUNDRY_SYNTH_CSV).records;
  std::vector<std::string> texts;
  for (const auto& r : recs) texts.push_back(board_side_fen(r.position()));
  auto m = sources::NgramModel::fit(texts, 8, 0.1);
  std::mt19937_64 rng(1);
  int legal = 0;
  for (int i = 0; i < 1000; ++i) {
    auto s = m.sample_text(rng, sources::kMaxSampleChars, sources::kDefaultTemperature);
    if (s) legal += sources::accept_sample(*s).has_value();
  }
  // Measured 0.076. Most rejects have the wrong number of ranks.
  CHECK(legal / 1000.0 >= 0.07);
}
