#include "foundry/sources/rwr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace foundry::sources {

namespace {

std::mt19937_64 round_rng(std::uint64_t seed, int round) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(round)};
  return std::mt19937_64(seq);
}

}  // namespace

RwrResult rwr_iterate(const std::vector<std::string>& corpus, const RwrConfig& cfg, const BatchScorer& score) {
  if (cfg.rounds < 0 || cfg.samples_per_round <= 0) throw std::invalid_argument("rwr needs rounds >= 0 and samples > 0");
  if (!(cfg.keep_quantile > 0 && cfg.keep_quantile <= 1)) throw std::invalid_argument("keep quantile must be in (0, 1]");
  if (cfg.replay_mix < 0 || cfg.replay_mix > 1) throw std::invalid_argument("replay mix must be in [0, 1]");

  RwrResult result{NgramModel::fit(corpus, cfg.order, cfg.smoothing), {}, {}};
  std::vector<std::vector<std::pair<std::string, double>>> winners;  // per round

  for (int round = 0; round <= cfg.rounds; ++round) {
    auto rng = round_rng(cfg.seed, round);
    std::vector<Position> legal;
    for (int i = 0; i < cfg.samples_per_round; ++i) {
      auto text = result.model.sample_text(rng, kMaxSampleChars, cfg.temperature);
      if (!text) continue;
      if (auto p = accept_sample(*text)) legal.push_back(*p);
    }
    std::vector<reward::RewardReport> reports;
    if (!legal.empty()) reports = score(legal);
    if (reports.size() != legal.size()) throw std::logic_error("scorer returned a report count that does not match its input");
    result.stats.push_back(summarize(round, cfg.samples_per_round, static_cast<int>(legal.size()), reports));
    for (std::size_t i = 0; i < legal.size(); ++i) result.samples.push_back({legal[i], reports[i], round});
    if (round == cfg.rounds) break;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < legal.size(); ++i)
      if (!reports[i].score_failed) order.push_back(i);
    std::vector<std::string> fens(legal.size());
    for (std::size_t i = 0; i < legal.size(); ++i) fens[i] = board_side_fen(legal[i]);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (reports[a].reward != reports[b].reward) return reports[a].reward > reports[b].reward;
      return fens[a] < fens[b];
    });
    auto keep = static_cast<std::size_t>(std::ceil(cfg.keep_quantile * static_cast<double>(order.size())));
    std::vector<std::pair<std::string, double>> kept;
    for (std::size_t i = 0; i < keep && i < order.size(); ++i) kept.emplace_back(fens[order[i]], reports[order[i]].reward);
    winners.push_back(std::move(kept));

    std::vector<std::size_t> idx(corpus.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto replay = static_cast<std::size_t>(std::llround(cfg.replay_mix * static_cast<double>(corpus.size())));
    std::vector<std::string> train;
    for (std::size_t i = 0; i < replay; ++i) train.push_back(corpus[idx[i]]);

    // Each round's winners weigh as much as the replayed corpus, split by reward.
    for (const auto& round_winners : winners) {
      double total = 0;
      for (const auto& w : round_winners) total += w.second;
      double mass = static_cast<double>(std::max(train.size() > 0 ? replay : 0, round_winners.size()));
      for (const auto& [fen, r] : round_winners) {
        long repeats = total > 0 ? std::max(1L, std::lround(mass * r / total)) : 1L;
        for (long k = 0; k < repeats; ++k) train.push_back(fen);
      }
    }
    if (train.empty()) train = corpus;
    result.model = NgramModel::fit(train, cfg.order, cfg.smoothing);
  }
  return result;
}

}  // namespace foundry::sources
