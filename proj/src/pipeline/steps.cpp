#include "foundry/pipeline/steps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "foundry/novelty/index.hpp"

namespace foundry::pipeline {

void EngineSettings::require() const {
  if (!configured()) throw EnginesNotConfigured();
}

uci::EngineProfile EngineSettings::strong_profile() const {
  uci::EngineProfile p;
  p.executable_path = strong_path;
  p.role = uci::EngineRole::Strong;
  p.depth_limit = strong_depth;
  p.hash_mb = hash_mb;
  return p;
}

uci::EngineProfile EngineSettings::weak_profile() const {
  uci::EngineProfile p;
  p.executable_path = weak_path;
  p.role = uci::EngineRole::Weak;
  p.depth_limit = weak_depth;
  p.hash_mb = hash_mb;
  return p;
}

reward::RewardConfig EngineSettings::reward_config() const {
  reward::RewardConfig cfg;
  cfg.strong_depth = strong_depth;
  cfg.weak_depth = weak_depth;
  return cfg;
}

sources::BatchScorer pool_scorer(uci::EnginePool& pool, const reward::RewardConfig& cfg) {
  return [&pool, cfg](const std::vector<Position>& ps) {
    std::vector<reward::RewardReport> out(ps.size());
    pool.for_each(ps.size(), [&](std::size_t i, uci::EnginePair e) { out[i] = reward::score_position(e.strong, e.weak, ps[i], cfg); });
    return out;
  };
}

namespace {

template <class Pred>
std::vector<std::pair<std::string, std::string>> pending(const Journal& j, Pred pred) {
  return j.read([&](const Store& s) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [id, c] : s.candidates())
      if (pred(c)) out.emplace_back(id, c.fen);
    return out;
  });
}

std::vector<CorpusNeighbor> to_corpus_neighbors(const std::vector<novelty::Neighbor>& nbs,
                                                const std::map<std::string, std::string>& fen_of) {
  std::vector<CorpusNeighbor> out;
  for (const auto& n : nbs) out.push_back({n.source_id, n.similarity, fen_of.at(n.source_id)});
  return out;
}

// Adds a candidate with a score computed during generation, unless it already has one.
void persist_scored(Journal& j, const Position& p, const std::string& source, const reward::RewardReport& r, const EngineSettings& eng) {
  std::string id = j.add_candidate(p, source);
  bool scored = j.read([&](const Store& s) { return s.at(id).reward_report.has_value(); });
  if (!scored) j.append(events::scored(id, r, eng.strong_depth, eng.weak_depth));
}

bool pool_healthy(uci::EnginePool& pool) {
  try {
    pool.for_each(1, [](std::size_t, uci::EnginePair e) {
      e.strong.analyse(parse_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"), 1, 1);
    });
    return true;
  } catch (const uci::EngineError&) {
    return false;
  }
}

}  // namespace

StepReport score_pending(Journal& j, uci::EnginePool& pool, const reward::RewardConfig& cfg, std::size_t batch) {
  auto todo = pending(j, [&](const PuzzleCandidate& c) { return !c.reward_report || c.strong_depth < cfg.strong_depth; });
  StepReport rep;
  for (std::size_t start = 0; start < todo.size(); start += batch) {
    std::size_t n = std::min(batch, todo.size() - start);
    std::vector<reward::RewardReport> out(n);
    pool.for_each(n, [&](std::size_t i, uci::EnginePair e) {
      out[i] = reward::score_position(e.strong, e.weak, parse_fen(todo[start + i].second), cfg);
    });
    bool all_failed = std::all_of(out.begin(), out.end(), [](const auto& r) { return r.score_failed; });
    if (all_failed && !pool_healthy(pool))
      throw ScoringAborted("engines unusable after " + std::to_string(rep.processed) + " candidates: " + out.front().failure);
    std::vector<json> evs;
    for (std::size_t i = 0; i < n; ++i) {
      evs.push_back(events::scored(todo[start + i].first, out[i], cfg.strong_depth, cfg.weak_depth));
      rep.failed += out[i].score_failed;
    }
    j.append_all(std::move(evs));
    rep.processed += n;
  }
  return rep;
}

StepReport label_pending(Journal& j, uci::EnginePool& pool, const themes::ThemeConfig& cfg, std::size_t batch) {
  struct Job {
    std::string id;
    Position root;
    std::vector<Move> line;
  };
  auto jobs = j.read([](const Store& s) {
    std::vector<Job> out;
    for (const auto& [id, c] : s.candidates()) {
      if (!c.reward_report || c.themes) continue;
      const auto& r = *c.reward_report;
      out.push_back({id, c.position(), r.uniqueness.unique && !r.score_failed ? r.solution_line : std::vector<Move>{}});
    }
    return out;
  });
  StepReport rep;
  for (std::size_t start = 0; start < jobs.size(); start += batch) {
    std::size_t n = std::min(batch, jobs.size() - start);
    std::vector<std::vector<themes::ThemeLabel>> labels(n);
    std::vector<bool> failed(n, false);
    pool.for_each(n, [&](std::size_t i, uci::EnginePair e) {
      const Job& job = jobs[start + i];
      if (job.line.empty()) return;
      themes::ThemeInput in{job.root, job.line, {}, &e.strong};
      try {
        labels[i] = themes::detect_themes(in, cfg);
      } catch (const uci::EngineError&) {
        // Probe failures fall back to the static rules.
        in.probe = nullptr;
        labels[i] = themes::detect_themes(in, cfg);
        failed[i] = true;
      }
    });
    std::vector<json> evs;
    for (std::size_t i = 0; i < n; ++i) {
      evs.push_back(events::labeled(jobs[start + i].id, labels[i]));
      rep.failed += failed[i];
    }
    j.append_all(std::move(evs));
    rep.processed += n;
  }
  return rep;
}

StepReport novelty_pending(Journal& j, const std::vector<CorpusRecord>& corpus, std::size_t k, double duplicate_threshold) {
  auto todo = pending(j, [](const PuzzleCandidate& c) { return !c.neighbors; });
  StepReport rep;
  if (todo.empty()) return rep;
  std::vector<std::pair<std::string, Position>> docs;
  std::map<std::string, std::string> fen_of;
  for (const auto& r : corpus) {
    docs.emplace_back(r.puzzle_id, r.position());
    fen_of[r.puzzle_id] = r.fen;
  }
  novelty::Index index(docs);
  std::vector<json> evs;
  for (const auto& [id, fen] : todo) {
    auto nbs = index.nearest(parse_fen(fen), k);
    bool dup = !nbs.empty() && nbs.front().similarity >= duplicate_threshold;
    evs.push_back(events::novelty(id, to_corpus_neighbors(nbs, fen_of), dup));
  }
  j.append_all(std::move(evs));
  rep.processed = todo.size();
  return rep;
}

NgramRun run_generate_ngram(Journal& j, uci::EnginePool& pool, const EngineSettings& eng, const sources::NgramModel& model,
                            const std::vector<CorpusRecord>& corpus, int n, std::uint64_t seed, double temperature) {
  eng.require();
  std::mt19937_64 rng(seed);
  NgramRun run;
  for (int i = 0; i < n; ++i) {
    try {
      auto s = sources::sample_fen(model, rng, 100, temperature);
      run.ids.push_back(j.add_candidate(s.position, "ngram"));
    } catch (const sources::RejectionBudgetExhausted&) {
    }
  }
  auto cfg = eng.reward_config();
  score_pending(j, pool, cfg);
  label_pending(j, pool);
  novelty_pending(j, corpus);

  auto reports = j.read([&](const Store& s) {
    std::vector<reward::RewardReport> out;
    for (const auto& id : run.ids) out.push_back(*s.at(id).reward_report);
    return out;
  });
  run.stats = sources::summarize(0, n, static_cast<int>(run.ids.size()), reports);
  j.append(events::generation_stats("ngram", run.stats));
  return run;
}

sources::RwrResult run_generate_rwr(Journal& j, uci::EnginePool& pool, const EngineSettings& eng,
                                    const std::vector<CorpusRecord>& corpus, const sources::RwrConfig& cfg) {
  eng.require();
  std::vector<std::string> texts;
  for (const auto& r : corpus) texts.push_back(board_side_fen(r.position()));
  auto res = sources::rwr_iterate(texts, cfg, pool_scorer(pool, eng.reward_config()));
  for (const auto& s : res.samples) persist_scored(j, s.position, "rwr-round-" + std::to_string(s.round), s.report, eng);
  for (const auto& st : res.stats) j.append(events::generation_stats("rwr", st));
  label_pending(j, pool);
  novelty_pending(j, corpus);
  return res;
}

sources::EvolutionResult run_generate_evolution(Journal& j, uci::EnginePool& pool, const EngineSettings& eng,
                                                const std::vector<CorpusRecord>& corpus, const sources::EvoConfig& cfg, int seeds) {
  eng.require();
  std::vector<Position> start;
  for (const auto& r : sample_corpus(corpus, static_cast<std::size_t>(seeds), cfg.seed)) start.push_back(r.position());
  auto res = sources::evolve(start, cfg, pool_scorer(pool, eng.reward_config()));
  for (const auto& ind : res.population)
    persist_scored(j, ind.position, "evolution-gen-" + std::to_string(ind.born), ind.report, eng);
  for (const auto& st : res.stats) j.append(events::generation_stats("evolution", st));
  label_pending(j, pool);
  novelty_pending(j, corpus);
  return res;
}

std::vector<CorpusRecord> sample_corpus(const std::vector<CorpusRecord>& corpus, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(corpus.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(n, idx.size()));
  std::vector<CorpusRecord> out;
  for (auto i : idx) out.push_back(corpus[i]);
  return out;
}

std::uint64_t percentile_threshold(std::vector<std::uint64_t> sample, double pct) {
  if (sample.empty()) throw std::invalid_argument("empty baseline");
  if (!(pct > 0 && pct <= 100)) throw std::invalid_argument("percentile must be in (0, 100]");
  std::sort(sample.begin(), sample.end());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sample.size())));
  return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

std::vector<std::uint64_t> measure_search_cost(uci::EnginePool& pool, const std::vector<Position>& positions,
                                               const std::vector<int>& schedule) {
  std::vector<std::uint64_t> out(positions.size());
  pool.for_each(positions.size(), [&](std::size_t i, uci::EnginePair e) {
    out[i] = uci::bestmove_stability(e.strong, positions[i], schedule).nodes_total;
  });
  return out;
}

StepReport probe_search_cost(Journal& j, uci::EnginePool& pool, const std::vector<int>& schedule,
                             const std::vector<std::uint64_t>& baseline, double pct) {
  const auto threshold = percentile_threshold(baseline, pct);
  auto todo = pending(j, [](const PuzzleCandidate& c) { return c.reward_report && !c.search_cost; });
  std::vector<SearchCost> costs(todo.size());
  pool.for_each(todo.size(), [&](std::size_t i, uci::EnginePair e) {
    SearchCost& c = costs[i];
    c.threshold = threshold;
    try {
      auto st = uci::bestmove_stability(e.strong, parse_fen(todo[i].second), schedule);
      c.nodes_total = st.nodes_total;
      c.stable_move = st.stable_move;
      c.first_stable_depth = st.first_stable_depth;
      c.adversarial = c.nodes_total > threshold;
    } catch (const uci::EngineError& ex) {
      c.error = ex.what();
    }
  });
  StepReport rep;
  std::vector<json> evs;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    evs.push_back(events::probed(todo[i].first, costs[i]));
    rep.failed += costs[i].error.has_value();
  }
  j.append_all(std::move(evs));
  rep.processed = todo.size();
  return rep;
}

}  // namespace foundry::pipeline
