#include "foundry/sources/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace foundry::sources {

namespace {

constexpr int kMutationRetries = 50;
constexpr PieceKind kAddable[] = {PieceKind::Pawn, PieceKind::Knight, PieceKind::Bishop, PieceKind::Rook, PieceKind::Queen};

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool back_rank(Square s) { return s.rank() == 0 || s.rank() == 7; }

std::vector<Square> squares_where(const Position& p, bool occupied, bool allow_kings = true) {
  std::vector<Square> out;
  for (int i = 0; i < 64; ++i) {
    const auto& pc = p.board[i];
    if (occupied != pc.has_value()) continue;
    if (pc && !allow_kings && pc->kind == PieceKind::King) continue;
    out.emplace_back(i);
  }
  return out;
}

std::vector<Square> empty_for(const Position& p, PieceKind k) {
  std::vector<Square> out;
  for (Square s : squares_where(p, false))
    if (k != PieceKind::Pawn || !back_rank(s)) out.push_back(s);
  return out;
}

bool apply_kind(Position& p, MutationKind kind, std::mt19937_64& rng) {
  switch (kind) {
    case MutationKind::MovePiece: {
      auto from = squares_where(p, true);
      Square s = pick(from, rng);
      Piece pc = *p.at(s);
      auto to = empty_for(p, pc.kind);
      if (to.empty()) return false;
      p.at(s).reset();
      p.at(pick(to, rng)) = pc;
      return true;
    }
    case MutationKind::AddPiece: {
      Color c = std::uniform_int_distribution<int>(0, 1)(rng) ? Color::Black : Color::White;
      PieceKind k = kAddable[std::uniform_int_distribution<int>(0, 4)(rng)];
      auto to = empty_for(p, k);
      if (to.empty()) return false;
      p.at(pick(to, rng)) = Piece{c, k};
      return true;
    }
    case MutationKind::RemovePiece: {
      auto from = squares_where(p, true, false);
      if (from.empty()) return false;
      p.at(pick(from, rng)).reset();
      return true;
    }
    case MutationKind::ReplacePiece: {
      auto from = squares_where(p, true, false);
      if (from.empty()) return false;
      Square s = pick(from, rng);
      std::vector<PieceKind> kinds;
      for (PieceKind k : kAddable)
        if (k != p.at(s)->kind && (k != PieceKind::Pawn || !back_rank(s))) kinds.push_back(k);
      p.at(s)->kind = pick(kinds, rng);
      return true;
    }
    case MutationKind::FlipSide:
      p.side_to_move = opposite(p.side_to_move);
      return true;
  }
  return false;
}

void mutate_once(Position& p, std::mt19937_64& rng, const EvoConfig& cfg) {
  auto weights = cfg.weights;
  while (true) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0) return;
    std::discrete_distribution<int> kind(weights.begin(), weights.end());
    int k = kind(rng);
    if (apply_kind(p, static_cast<MutationKind>(k), rng)) return;
    weights[static_cast<std::size_t>(k)] = 0;  // not applicable here, draw another kind
  }
}

Position normalized(Position p) {
  p.castling = {};
  p.en_passant.reset();
  p.halfmove_clock = 0;
  p.fullmove_number = 1;
  return p;
}

double fitness(const reward::RewardReport& r) {
  return r.score_failed ? -std::numeric_limits<double>::infinity() : r.reward;
}

std::mt19937_64 individual_rng(std::uint64_t seed, int generation, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

}  // namespace

std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::MovePiece: return "move-piece";
    case MutationKind::AddPiece: return "add-piece";
    case MutationKind::RemovePiece: return "remove-piece";
    case MutationKind::ReplacePiece: return "replace-piece";
    case MutationKind::FlipSide: return "flip-side-to-move";
  }
  return "?";
}

void EvoConfig::validate() const {
  if (population <= 0) throw std::invalid_argument("population must be positive");
  if (elite < 0 || elite >= population) throw std::invalid_argument("elite must be below the population size");
  if (tournament < 1) throw std::invalid_argument("tournament size must be at least 1");
  if (max_mutations < 1) throw std::invalid_argument("max_mutations must be at least 1");
  if (generations < 1) throw std::invalid_argument("generations must be at least 1");
  double sum = 0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("mutation weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mutation weights must sum to 1");
}

MutationResult mutate(const Position& p, std::mt19937_64& rng, const EvoConfig& cfg) {
  std::vector<double> count_weights;
  for (int k = 1; k <= cfg.max_mutations; ++k) count_weights.push_back(std::ldexp(1.0, -k));
  std::discrete_distribution<int> count(count_weights.begin(), count_weights.end());
  const Position base = normalized(p);
  for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
    Position q = base;
    int n = count(rng) + 1;
    for (int i = 0; i < n; ++i) mutate_once(q, rng, cfg);
    if (q == base) continue;
    if (!structural_violations(q).empty()) continue;
    if (cfg.realism_enforced && !validate_realism(q).empty()) continue;
    return {q, false};
  }
  return {p, true};
}

EvolutionResult evolve(const std::vector<Position>& seeds, const EvoConfig& cfg, const BatchScorer& score,
                       const GenerationCallback& on_generation) {
  cfg.validate();
  if (seeds.empty()) throw std::invalid_argument("evolution needs at least one seed");

  std::map<std::string, reward::RewardReport> cache;
  auto evaluate = [&](std::vector<Individual>& pop) {
    std::vector<Position> todo;
    std::vector<std::string> keys;
    for (const auto& ind : pop) {
      std::string key = board_side_fen(ind.position);
      if (cache.count(key) || std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      keys.push_back(key);
      todo.push_back(ind.position);
    }
    if (!todo.empty()) {
      auto reports = score(todo);
      if (reports.size() != todo.size()) throw std::logic_error("scorer returned a report count that does not match its input");
      for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(keys[i], reports[i]);
    }
    for (auto& ind : pop) ind.report = cache.at(board_side_fen(ind.position));
  };
  // Best first; ties keep population order.
  auto ranking = [](const std::vector<Individual>& pop) {
    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fitness(pop[a].report) > fitness(pop[b].report); });
    return idx;
  };

  EvolutionResult result;
  std::vector<Individual> pop;
  int noops = 0;
  for (int i = 0; i < cfg.population; ++i) {
    if (i < static_cast<int>(seeds.size())) {
      pop.push_back({seeds[static_cast<std::size_t>(i)], {}, 0});
      continue;
    }
    auto rng = individual_rng(cfg.seed, 0, i);
    auto m = mutate(seeds[static_cast<std::size_t>(i) % seeds.size()], rng, cfg);
    noops += m.noop;
    pop.push_back({m.position, {}, 0});
  }
  auto record = [&](int generation, int children) {
    std::vector<reward::RewardReport> reports;
    for (const auto& ind : pop) reports.push_back(ind.report);
    int legal = cfg.population - noops;
    GenerationStats s = summarize(generation, cfg.population, legal, reports);
    if (children > 0) s.legal_fraction = static_cast<double>(children - noops) / children;
    result.stats.push_back(s);
    if (on_generation) on_generation(s);
  };
  evaluate(pop);
  record(0, 0);

  for (int g = 1; g < cfg.generations; ++g) {
    auto order = ranking(pop);
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = fitness(pop[i].report);
    std::vector<Individual> next;
    for (int e = 0; e < cfg.elite; ++e) next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    noops = 0;
    for (int c = cfg.elite; c < cfg.population; ++c) {
      auto rng = individual_rng(cfg.seed, g, c);
      std::uniform_int_distribution<std::size_t> any(0, pop.size() - 1);
      std::size_t best = any(rng);
      for (int t = 1; t < cfg.tournament; ++t) {
        std::size_t rival = any(rng);
        if (fit[rival] > fit[best] || (fit[rival] == fit[best] && rival < best)) best = rival;
      }
      auto m = mutate(pop[best].position, rng, cfg);
      noops += m.noop;
      next.push_back({m.position, {}, m.noop ? pop[best].born : g});
    }
    pop = std::move(next);
    evaluate(pop);
    record(g, cfg.population - cfg.elite);
  }

  auto order = ranking(pop);
  for (std::size_t i : order) result.population.push_back(pop[i]);
  return result;
}

}  // namespace foundry::sources
