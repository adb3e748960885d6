#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "foundry/pipeline/rank.hpp"
#include "foundry/pipeline/steps.hpp"
#include "foundry/review/service.hpp"

using namespace foundry;
using namespace foundry::pipeline;

namespace {

struct Globals {
  std::string store = "store.jsonl";
  std::string corpus = "corpus.jsonl";
  std::string model = "model.ngram";
  std::uint64_t seed = 1;
  EngineSettings engines;
};

// "1-12" or "1,2,4,8".
std::vector<int> parse_schedule(const std::string& text) {
  std::vector<int> out;
  if (auto dash = text.find('-'); dash != std::string::npos) {
    int lo = std::stoi(text.substr(0, dash));
    int hi = std::stoi(text.substr(dash + 1));
    for (int d = lo; d <= hi; ++d) out.push_back(d);
  } else {
    std::stringstream ss(text);
    for (std::string t; std::getline(ss, t, ',');) out.push_back(std::stoi(t));
  }
  if (out.empty() || !std::is_sorted(out.begin(), out.end())) throw std::invalid_argument("schedule must be ascending: " + text);
  return out;
}

void print_stats(const std::string& source, const sources::GenerationStats& s) {
  std::cout << source << " round " << s.round << ": samples " << s.samples << ", legal " << s.legal_fraction << ", mean reward "
            << s.mean_reward << ", max reward " << s.max_reward << ", unique " << s.unique_fraction << ", failed " << s.failed
            << "\n";
}

void write_or_print(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << text;
}

std::unique_ptr<uci::EnginePool> make_pool(const EngineSettings& e) {
  e.require();
  return std::make_unique<uci::EnginePool>(e.strong_profile(), e.weak_profile(), e.workers);
}

review::ReviewService* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Puzzle generation pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  Globals g;
  app.add_option("--store", g.store, "candidate event log")->capture_default_str();
  app.add_option("--corpus", g.corpus, "ingested corpus (JSON lines)")->capture_default_str();
  app.add_option("--model", g.model, "n-gram model file")->capture_default_str();
  app.add_option("--seed", g.seed)->capture_default_str();
  app.add_option("--strong-engine", g.engines.strong_path, "UCI engine used for scoring");
  app.add_option("--weak-engine", g.engines.weak_path, "UCI engine used for the counter-intuitiveness probe");
  app.add_option("--depth-strong", g.engines.strong_depth)->capture_default_str();
  app.add_option("--depth-weak", g.engines.weak_depth)->capture_default_str();
  app.add_option("--workers", g.engines.workers)->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--hash", g.engines.hash_mb, "engine hash in MB")->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "read a Lichess puzzle CSV into the corpus");
  std::string csv;
  ingest->add_option("csv", csv)->required();

  auto* train = app.add_subcommand("train", "fit the n-gram model on corpus positions");
  int order = 8;
  double smoothing = 0.1;
  train->add_option("--order", order)->capture_default_str()->check(CLI::Range(1, sources::kMaxOrder));
  train->add_option("--smoothing", smoothing)->capture_default_str();

  auto* generate = app.add_subcommand("generate", "sample, score, label and gate new candidates");
  std::string source = "ngram";
  int n = 100;
  double temperature = sources::kDefaultTemperature;
  sources::RwrConfig rwr;
  sources::EvoConfig evo;
  int evo_seeds = 32;
  generate->add_option("--source", source)->check(CLI::IsMember({"ngram", "rwr", "evolve"}))->capture_default_str();
  generate->add_option("-n", n, "n-gram samples")->capture_default_str();
  generate->add_option("--temperature", temperature)->capture_default_str();
  generate->add_option("--rounds", rwr.rounds)->capture_default_str();
  generate->add_option("--samples-per-round", rwr.samples_per_round)->capture_default_str();
  generate->add_option("--keep", rwr.keep_quantile, "kept quantile per round")->capture_default_str();
  generate->add_option("--population", evo.population)->capture_default_str();
  generate->add_option("--generations", evo.generations)->capture_default_str();
  generate->add_option("--elite", evo.elite)->capture_default_str();
  generate->add_option("--seeds", evo_seeds, "corpus positions seeding evolution")->capture_default_str();

  auto* score = app.add_subcommand("score", "score candidates without a report at the configured depth");
  auto* label = app.add_subcommand("label", "run theme detectors on scored candidates");
  auto* nov = app.add_subcommand("novelty", "record nearest corpus positions");
  std::size_t k = 3;
  nov->add_option("-k", k)->capture_default_str();

  auto* rank = app.add_subcommand("rank", "per-theme top-k selection manifest");
  int per_theme = 50;
  std::string rank_out;
  rank->add_option("--per-theme", per_theme)->capture_default_str();
  rank->add_option("-o,--out", rank_out);

  auto* probe = app.add_subcommand("probe", "search-cost probe against a corpus baseline");
  std::string schedule = "1-12";
  std::size_t baseline_n = 100;
  double percentile = 95;
  probe->add_option("--schedule", schedule, "depths, '1-12' or '1,2,4'")->capture_default_str();
  probe->add_option("--baseline", baseline_n, "corpus positions in the baseline")->capture_default_str();
  probe->add_option("--percentile", percentile)->capture_default_str()->check(CLI::Range(0.0, 100.0));

  auto* exp = app.add_subcommand("export", "booklet of accepted candidates");
  std::string format = "markdown";
  std::string export_out;
  std::string policy = "any-accept";
  exp->add_option("--format", format)->check(CLI::IsMember({"markdown", "json"}))->capture_default_str();
  exp->add_option("-o,--out", export_out);
  exp->add_option("--policy", policy)->check(CLI::IsMember({"any-accept", "unanimous"}))->capture_default_str();

  auto* serve = app.add_subcommand("serve", "review service over the store");
  int port = review::kDefaultPort;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--policy", policy)->check(CLI::IsMember({"any-accept", "unanimous"}))->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto res = ingest_lichess_csv(csv);
      for (const auto& s : res.skipped) std::cerr << csv << ":" << s.line << ": skipped: " << s.reason << "\n";
      save_corpus(res.records, g.corpus);
      std::cout << "rows " << res.rows << ", records " << res.records.size() << ", skipped " << res.skipped.size() << "\n";
      return 0;
    }
    if (*train) {
      std::vector<std::string> texts;
      for (const auto& r : load_corpus(g.corpus)) texts.push_back(board_side_fen(r.position()));
      auto m = sources::NgramModel::fit(texts, order, smoothing);
      m.save(g.model);
      std::cout << "trained order " << order << " on " << texts.size() << " positions\n";
      return 0;
    }
    if (*rank) {
      Journal j(g.store);
      auto m = j.read([&](const Store& s) { return rank_and_select(s, per_theme); });
      write_or_print(to_json(m).dump(2) + "\n", rank_out);
      return 0;
    }
    if (*exp) {
      Journal j(g.store);
      auto fmt = format == "json" ? BookletFormat::Json : BookletFormat::Markdown;
      auto doc = j.read([&](const Store& s) { return export_booklet(s, fmt, *export_policy_from_string(policy)); });
      write_or_print(doc, export_out);
      return 0;
    }
    if (*nov) {
      Journal j(g.store);
      auto rep = novelty_pending(j, load_corpus(g.corpus), k);
      std::cout << "novelty: " << rep.processed << " candidates\n";
      return 0;
    }
    if (*serve) {
      Journal j(g.store);
      review::ReviewService svc(j, {*export_policy_from_string(policy), "*"});
      int bound = svc.bind(host, port);
      if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
      g_service = &svc;
      std::signal(SIGINT, [](int) { g_service->stop(); });
      std::signal(SIGTERM, [](int) { g_service->stop(); });
      std::cerr << "review service on http://" << host << ":" << bound << "\n";
      svc.listen_after_bind();
      return 0;
    }

    // Everything below needs engines; check before touching any input.
    g.engines.require();

    if (*generate) {
      auto corpus = load_corpus(g.corpus);
      Journal j(g.store);
      auto pool = make_pool(g.engines);
      if (source == "ngram") {
        auto model = sources::NgramModel::load(g.model);
        auto run = run_generate_ngram(j, *pool, g.engines, model, corpus, n, g.seed, temperature);
        print_stats("ngram", run.stats);
      } else if (source == "rwr") {
        rwr.seed = g.seed;
        rwr.temperature = temperature;
        for (const auto& s : run_generate_rwr(j, *pool, g.engines, corpus, rwr).stats) print_stats("rwr", s);
      } else {
        evo.seed = g.seed;
        evo.validate();
        auto res = run_generate_evolution(j, *pool, g.engines, corpus, evo, evo_seeds);
        print_stats("evolution", res.stats.back());
      }
      return 0;
    }
    if (*score) {
      Journal j(g.store);
      auto pool = make_pool(g.engines);
      auto rep = score_pending(j, *pool, g.engines.reward_config());
      std::cout << "scored " << rep.processed << ", failed " << rep.failed << "\n";
      return 0;
    }
    if (*label) {
      Journal j(g.store);
      auto pool = make_pool(g.engines);
      auto rep = label_pending(j, *pool);
      std::cout << "labeled " << rep.processed << ", probe failures " << rep.failed << "\n";
      return 0;
    }
    if (*probe) {
      auto sched = parse_schedule(schedule);
      std::vector<Position> base;
      for (const auto& r : sample_corpus(load_corpus(g.corpus), baseline_n, g.seed)) base.push_back(r.position());
      Journal j(g.store);
      auto pool = make_pool(g.engines);
      auto costs = measure_search_cost(*pool, base, sched);
      auto rep = probe_search_cost(j, *pool, sched, costs, percentile);
      std::cout << "probed " << rep.processed << ", failed " << rep.failed << ", threshold "
                << percentile_threshold(costs, percentile) << " nodes\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
