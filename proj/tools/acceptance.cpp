// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "foundry/board/notation.hpp"
#include "foundry/novelty/index.hpp"
#include "foundry/pipeline/steps.hpp"
#include "foundry/reward/reward.hpp"
#include "foundry/themes/themes.hpp"
#include "json.hpp"
#include "support/naive_knn.hpp"
#include "support/naive_perft.hpp"

using namespace foundry;
using namespace foundry::pipeline;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned thresholds.
constexpr int kGoldenDepth = 18;
constexpr int kGoldenRequired = 8;
constexpr double kGoldenMinutes = 10;
constexpr int kLineSolverPlies = 3;
constexpr int kNegativeCorpus = 50;
constexpr std::size_t kNoveltyBaseline = 100;
constexpr double kNoveltyRequired = 0.80;
constexpr int kSearchDepth = 12;  // evolution, RWR and probe scoring
constexpr int kWeakDepth = 4;
constexpr int kEvoPopulation = 128;
constexpr int kEvoGenerations = 200;
constexpr int kEvoSeeds = 32;
constexpr int kEvoWindow = 10;
constexpr int kEvoHorizon = 100;
constexpr double kEvoMinCi = 0.5;
constexpr double kEvoHours = 2;
constexpr int kRwrSamples = 500;
constexpr int kRwrRounds = 3;
constexpr double kRwrKeep = 0.1;
constexpr double kRwrGain = 1.5;
constexpr int kPerftDepth = 3;
constexpr std::size_t kKnnCorpus = 200;
constexpr std::size_t kFenRecords = 10000;
constexpr std::size_t kProbeBaseline = 100;
constexpr int kProbeScheduleTop = 12;
constexpr double kProbePercentile = 95;
constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string engine;
  std::string csv;
  std::string cli;
  int workers = 1;
  fs::path scratch;
  nlohmann::json fixtures;
  std::vector<CorpusRecord> corpus;
  std::size_t fen_round_trips = 0;
  std::size_t csv_rows = 0;

  EngineSettings settings(int strong, int weak) const {
    EngineSettings e;
    e.strong_path = e.weak_path = engine;
    e.strong_depth = strong;
    e.weak_depth = weak;
    e.workers = workers;
    return e;
  }

  uci::EngineProfile strong(int depth) const { return settings(depth, kWeakDepth).strong_profile(); }
};

double minutes_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count() / 60.0; }

std::string fmt(double v, int prec = 3) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome golden_uniqueness(Context& c) {
  auto t0 = Clock::now();
  uci::UciEngine strong(c.strong(kGoldenDepth));
  int hits = 0;
  std::string misses;
  for (const auto& h : c.fixtures["highlighted"]) {
    Position p = parse_fen(h["fen"].get<std::string>());
    Move key = parse_san(p, h["key"].get<std::string>());
    auto r = reward::uniqueness_check(strong, p, kGoldenDepth);
    if (r.unique && r.winning_move == key) {
      ++hits;
    } else {
      misses += " " + h["key"].get<std::string>() + "(" + (r.winning_move ? to_san(p, *r.winning_move) : "-") + " " +
                std::to_string(r.best_eval) + "/" + std::to_string(r.second_eval) + ")";
    }
  }
  double mins = minutes_since(t0);
  return {hits >= kGoldenRequired && mins < kGoldenMinutes,
          std::to_string(hits) + "/" + std::to_string(c.fixtures["highlighted"].size()) + " unique with the printed key at depth " +
              std::to_string(kGoldenDepth) + ", " + fmt(mins) + " min" + (misses.empty() ? "" : "; missed:" + misses)};
}

Outcome line_fidelity(Context& c) {
  uci::UciEngine strong(c.strong(kGoldenDepth));
  const auto& h = c.fixtures["highlighted"][0];
  Position p = parse_fen(h["fen"].get<std::string>());
  auto printed = h["line"].get<std::vector<std::string>>();
  std::vector<std::string> want;
  for (int i = 0; i < kLineSolverPlies; ++i) want.push_back(printed[2 * i]);
  auto v = reward::verify_solution_line(strong, p, kLineSolverPlies, kGoldenDepth);
  auto sans = to_san_line(p, v.line);
  std::vector<std::string> got;
  for (std::size_t i = 0; i < sans.size(); i += 2) got.push_back(sans[i]);
  std::string shown;
  for (const auto& s : sans) shown += (shown.empty() ? "" : " ") + s;
  return {got == want, "engine line: " + (shown.empty() ? std::string("(none)") : shown) + " (" + std::to_string(v.verified_plies) +
                           " solver plies verified)"};
}

bool fires(const std::vector<themes::ThemeLabel>& labels, themes::Theme t) {
  return std::any_of(labels.begin(), labels.end(), [&](const auto& l) { return l.theme == t; });
}

Outcome theme_fixtures(Context& c) {
  using themes::Theme;
  int positives = 0;
  int fired = 0;
  std::string misses;
  auto expect = [&](const std::string& fen, const std::vector<std::string>& sans, Theme t) {
    themes::ThemeInput in;
    in.root = parse_fen(fen);
    in.line = parse_san_line(in.root, sans);
    ++positives;
    if (fires(themes::detect_themes(in), t)) {
      ++fired;
    } else {
      misses += " " + themes::to_string(t) + "@" + fen;
    }
  };
  for (const auto& f : c.fixtures["booklet"]) {
    auto section = f["section"].get<std::string>();
    auto sans = f["line"].get<std::vector<std::string>>();
    auto ends_in_stalemate = [&] {
      Position p = parse_fen(f["fen"].get<std::string>());
      return game_state(play_line(p, parse_san_line(p, sans))) == GameState::Stalemate;
    };
    if (section == "Underpromotion") expect(f["fen"], sans, Theme::Underpromotion);
    if (section == "Sacrifice Pieces to Stalemate" && ends_in_stalemate()) expect(f["fen"], sans, Theme::StalemateSacrifice);
    if (!sans.empty() && sans.front() == "Qg8+" && sans.back() == "Ng6#") expect(f["fen"], sans, Theme::SmotheredMate);
  }

  std::vector<CorpusRecord> mates;
  for (const auto& r : c.corpus)
    if (std::find(r.themes.begin(), r.themes.end(), "mateIn2") != r.themes.end()) mates.push_back(r);
  mates = sample_corpus(mates, kNegativeCorpus, kSeed);
  int false_hits = 0;
  for (const auto& r : mates) {
    themes::ThemeInput in;
    in.root = r.position();
    Position q = in.root;
    for (const auto& m : r.moves) {
      in.line.push_back(parse_uci(q, m));
      q = apply_move(q, in.line.back());
    }
    auto labels = themes::detect_themes(in);
    for (Theme t : {Theme::Underpromotion, Theme::StalemateSacrifice, Theme::SmotheredMate}) false_hits += fires(labels, t);
  }
  bool ok = positives > 0 && fired == positives && false_hits == 0 && mates.size() == kNegativeCorpus;
  return {ok, std::to_string(fired) + "/" + std::to_string(positives) + " fixtures fire; " + std::to_string(false_hits) +
                  " hits on " + std::to_string(mates.size()) + " mate-in-2 negatives" + misses};
}

Outcome novelty_sanity(Context& c) {
  auto baseline = sample_corpus(c.corpus, kNoveltyBaseline, kSeed);
  int with_triples = 0;
  int consistent = 0;
  for (const auto& f : c.fixtures["booklet"]) {
    if (!f.contains("closest") || f["closest"].size() != 3) continue;
    ++with_triples;
    Position p = parse_fen(f["fen"].get<std::string>());
    double listed = 0;
    for (const auto& fen : f["closest"]) listed += novelty::similarity(p, parse_fen(fen.get<std::string>()));
    listed /= 3;
    double random = 0;
    for (const auto& r : baseline) random += novelty::similarity(p, r.position());
    random /= static_cast<double>(baseline.size());
    consistent += listed > random;
  }
  double frac = with_triples ? static_cast<double>(consistent) / with_triples : 0;
  return {with_triples > 0 && frac >= kNoveltyRequired,
          std::to_string(consistent) + "/" + std::to_string(with_triples) + " puzzles closer to their listed triple than to " +
              std::to_string(baseline.size()) + " random corpus positions (" + fmt(100 * frac) + "%)"};
}

Outcome evolution(Context& c) {
  auto t0 = Clock::now();
  auto eng = c.settings(kSearchDepth, kWeakDepth);
  uci::EnginePool pool(eng.strong_profile(), eng.weak_profile(), eng.workers);
  sources::EvoConfig cfg;
  cfg.population = kEvoPopulation;
  cfg.generations = kEvoGenerations;
  cfg.seed = kSeed;
  std::vector<Position> seeds;
  for (const auto& r : sample_corpus(c.corpus, kEvoSeeds, kSeed)) seeds.push_back(r.position());
  auto res = sources::evolve(seeds, cfg, pool_scorer(pool, eng.reward_config()), [&](const sources::GenerationStats& s) {
    if (s.round % 10 == 0)
      std::cerr << "  evolution gen " << s.round << " mean " << s.mean_reward << " max " << s.max_reward << " ("
                << fmt(minutes_since(t0)) << " min)" << std::endl;
  });
  double hours = minutes_since(t0) / 60;

  std::vector<double> ma;
  for (int g = kEvoWindow - 1; g < kEvoHorizon && g < static_cast<int>(res.stats.size()); ++g) {
    double sum = 0;
    for (int i = g - kEvoWindow + 1; i <= g; ++i) sum += res.stats[i].mean_reward;
    ma.push_back(sum / kEvoWindow);
  }
  int drops = 0;
  for (std::size_t i = 1; i < ma.size(); ++i) drops += ma[i] < ma[i - 1] - 1e-12;
  int hits = 0;
  for (const auto& ind : res.population)
    hits += !ind.report.score_failed && ind.report.uniqueness.unique && ind.report.ci_score >= kEvoMinCi;

  bool ok = drops == 0 && hits >= 1 && hours < kEvoHours && !ma.empty();
  return {ok, "moving average drops " + std::to_string(drops) + " times over generations " + std::to_string(kEvoWindow - 1) + "-" +
                  std::to_string(kEvoHorizon - 1) + " (" + fmt(ma.empty() ? 0 : ma.front()) + " -> " + fmt(ma.empty() ? 0 : ma.back()) +
                  "); " + std::to_string(hits) + " final unique with ci >= " + fmt(kEvoMinCi) + "; " + fmt(hours) + " h"};
}

Outcome rwr(Context& c) {
  auto eng = c.settings(kSearchDepth, kWeakDepth);
  uci::EnginePool pool(eng.strong_profile(), eng.weak_profile(), eng.workers);
  sources::RwrConfig cfg;
  cfg.rounds = kRwrRounds;
  cfg.samples_per_round = kRwrSamples;
  cfg.keep_quantile = kRwrKeep;
  cfg.seed = kSeed;
  std::vector<std::string> texts;
  for (const auto& r : c.corpus) texts.push_back(board_side_fen(r.position()));
  auto res = sources::rwr_iterate(texts, cfg, pool_scorer(pool, eng.reward_config()));
  const auto& st = res.stats;
  if (st.size() != static_cast<std::size_t>(kRwrRounds + 1)) return {false, "expected " + std::to_string(kRwrRounds + 1) + " rounds"};
  bool legal_monotone = true;
  std::string means, legal;
  for (std::size_t i = 0; i < st.size(); ++i) {
    if (i && st[i].legal_fraction < st[i - 1].legal_fraction) legal_monotone = false;
    means += (i ? " " : "") + fmt(st[i].mean_reward);
    legal += (i ? " " : "") + fmt(st[i].legal_fraction);
  }
  double m0 = st.front().mean_reward;
  double m3 = st.back().mean_reward;
  bool gain = m3 > 0 && m3 >= kRwrGain * m0;
  return {gain && legal_monotone, "mean reward by round " + means + "; legal fraction " + legal};
}

Outcome oracles(Context& c) {
  std::vector<std::string> fens;
  for (const char* group : {"booklet", "highlighted", "evolutionary", "adversarial"})
    for (const auto& f : c.fixtures[group]) fens.push_back(f["fen"]);
  int perft_bad = 0;
  for (const auto& fen : fens) {
    Position p = parse_fen(fen);
    for (int d = 1; d <= kPerftDepth; ++d) perft_bad += perft(p, d) != naive::perft(serialize_fen(p), d);
  }

  std::vector<std::pair<std::string, Position>> docs;
  for (const auto& r : sample_corpus(c.corpus, kKnnCorpus, kSeed)) docs.emplace_back(r.puzzle_id, r.position());
  novelty::Index index(docs);
  int knn_bad = 0;
  std::vector<Position> queries;
  for (const auto& [id, p] : docs) queries.push_back(p);
  for (const auto& r : sample_corpus(c.corpus, 60, kSeed + 1)) queries.push_back(r.position());
  for (const auto& q : queries)
    for (std::size_t k : {1u, 3u, 10u}) {
      auto got = index.nearest(q, k);
      auto want = naive::nearest(docs, q, k);
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i)
        same = got[i].source_id == want[i].source_id && std::abs(got[i].similarity - want[i].similarity) < 1e-12;
      knn_bad += !same;
    }

  std::size_t fen_bad = 0;
  for (const auto& r : c.corpus) fen_bad += serialize_fen(parse_fen(r.fen)) != r.fen;
  bool ok = perft_bad == 0 && knn_bad == 0 && fen_bad == 0 && c.corpus.size() == kFenRecords && c.fen_round_trips == c.csv_rows;
  return {ok, "perft mismatches " + std::to_string(perft_bad) + " over " + std::to_string(fens.size()) + " FENs x depths 1-" +
                  std::to_string(kPerftDepth) + "; k-NN mismatches " + std::to_string(knn_bad) + " over " +
                  std::to_string(queries.size()) + " queries; FEN round-trip " + std::to_string(c.corpus.size() - fen_bad) + "/" +
                  std::to_string(c.corpus.size()) + " records, " + std::to_string(c.fen_round_trips) + "/" +
                  std::to_string(c.csv_rows) + " source fields"};
}

Outcome search_cost(Context& c) {
  auto eng = c.settings(kSearchDepth, kWeakDepth);
  uci::EnginePool pool(eng.strong_profile(), eng.weak_profile(), eng.workers);
  std::vector<int> schedule;
  for (int d = 1; d <= kProbeScheduleTop; ++d) schedule.push_back(d);
  std::vector<Position> base;
  for (const auto& r : sample_corpus(c.corpus, kProbeBaseline, kSeed)) base.push_back(r.position());
  auto baseline = measure_search_cost(pool, base, schedule);
  auto threshold = percentile_threshold(baseline, kProbePercentile);
  std::vector<Position> hard;
  for (int i : {0, 1}) hard.push_back(parse_fen(c.fixtures["adversarial"][i]["fen"].get<std::string>()));
  auto costs = measure_search_cost(pool, hard, schedule);
  bool ok = std::all_of(costs.begin(), costs.end(), [&](auto n) { return n > threshold; });
  return {ok, "nodes " + std::to_string(costs[0]) + " and " + std::to_string(costs[1]) + " vs p" + fmt(kProbePercentile) + " " +
                  std::to_string(threshold) + " (median " + std::to_string(percentile_threshold(baseline, 50)) + ")"};
}

Outcome reproducibility(Context& c) {
  auto run = [&](const fs::path& dir) {
    fs::create_directories(dir);
    std::string base = c.cli + " --store " + (dir / "store.jsonl").string() + " --corpus " + (dir / "corpus.jsonl").string() +
                       " --model " + (dir / "model.ngram").string() + " --seed 7 --strong-engine " + c.engine + " --weak-engine " +
                       c.engine + " --depth-strong 8 --depth-weak 4 --hash 16 ";
    std::vector<std::string> steps = {
        "ingest " + c.csv,
        "train",
        "generate --source ngram -n 40",
        "generate --source evolve --population 8 --generations 3 --elite 2 --seeds 8",
        "probe --baseline 20 --schedule 1-8",
        "rank -o " + (dir / "manifest.json").string(),
    };
    for (const auto& s : steps) {
      std::string cmd = base + s + " > " + (dir / "log.txt").string() + " 2>&1";
      if (std::system(cmd.c_str()) != 0) return "step failed: " + s;
    }
    return std::string();
  };
  auto a = c.scratch / "repro-a";
  auto b = c.scratch / "repro-b";
  if (auto err = run(a); !err.empty()) return {false, err};
  if (auto err = run(b); !err.empty()) return {false, err};
  auto sa = slurp(a / "store.jsonl");
  auto sb = slurp(b / "store.jsonl");
  bool same = !sa.empty() && sa == sb && slurp(a / "manifest.json") == slurp(b / "manifest.json");
  auto lines = std::count(sa.begin(), sa.end(), '\n');
  return {same, std::to_string(lines) + " events, stores " + (sa == sb ? "identical" : "differ")};
}

struct Criterion {
  std::string name;
  bool engine;
  Outcome (*run)(Context&);
};

const std::vector<Criterion> kCriteria = {
    {"golden-uniqueness", true, golden_uniqueness}, {"line-fidelity", true, line_fidelity},
    {"theme-fixtures", false, theme_fixtures},      {"novelty-sanity", false, novelty_sanity},
    {"evolution", true, evolution},                 {"rwr", true, rwr},
    {"oracle-equivalence", false, oracles},         {"search-cost-probe", true, search_cost},
    {"reproducibility", true, reproducibility},
};

std::string default_engine() {
  if (const char* env = std::getenv("STRONG_ENGINE"); env && *env) return env;
  return ::access("/root/engines/stockfish", X_OK) == 0 ? "/root/engines/stockfish" : "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foundry acceptance run"};
  Context c;
  c.engine = default_engine();
  c.csv = FOUNDRY_SYNTH_CSV;
  c.cli = FOUNDRY_CLI_PATH;
  std::string fixtures = std::string(FOUNDRY_TEST_DATA) + "/booklet.json";
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--engine", c.engine, "UCI engine (default $STRONG_ENGINE or /root/engines/stockfish)");
  app.add_option("--csv", c.csv, "puzzle CSV for the corpus")->capture_default_str();
  app.add_option("--fixtures", fixtures)->capture_default_str();
  app.add_option("--workers", c.workers)->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run only these criteria");
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& cr : kCriteria) std::cout << cr.name << "\n";
    return 0;
  }
  for (const auto& o : only)
    if (std::none_of(kCriteria.begin(), kCriteria.end(), [&](const auto& cr) { return cr.name == o; })) {
      std::cerr << "error: unknown criterion " << o << "\n";
      return 2;
    }

  std::ifstream fx(fixtures);
  c.fixtures = nlohmann::json::parse(fx);
  auto ingest = ingest_lichess_csv(c.csv);
  c.corpus = std::move(ingest.records);
  c.fen_round_trips = ingest.fen_round_trips;
  c.csv_rows = ingest.rows;
  c.scratch = fs::temp_directory_path() / ("foundry-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(c.scratch);

  int failures = 0;
  for (const auto& cr : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), cr.name) == only.end()) continue;
    Outcome out;
    if (cr.engine && c.engine.empty()) {
      out = {false, "no engine configured"};
    } else {
      try {
        out = cr.run(c);
      } catch (const std::exception& e) {
        out = {false, std::string("error: ") + e.what()};
      }
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << cr.name << ": " << out.detail << std::endl;
  }
  fs::remove_all(c.scratch);
  return failures;
}
