#include "foundry/novelty/index.hpp"

#include <algorithm>
#include <fstream>

namespace foundry::novelty {

namespace {

constexpr const char* kHeader = "foundry-novelty-index 1";
constexpr std::size_t kTokenCount = 64 * 12;

double jaccard(std::size_t shared, std::size_t a, std::size_t b) {
  std::size_t uni = a + b - shared;
  return uni == 0 ? 1.0 : static_cast<double>(shared) / static_cast<double>(uni);
}

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.source_id < b.source_id;
}

void keep_top(std::vector<Neighbor>& v, std::size_t k) {
  if (v.size() > k) {
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), ranks_before);
    v.resize(k);
  } else {
    std::sort(v.begin(), v.end(), ranks_before);
  }
}

}  // namespace

PositionSketch sketch(const Position& p, std::string source_id) {
  PositionSketch s;
  s.source_id = std::move(source_id);
  for (int i = 0; i < 64; ++i) {
    const auto& pc = p.board[i];
    if (!pc) continue;
    s.tokens.push_back(static_cast<Token>(i * 12 + static_cast<int>(pc->color) * 6 + static_cast<int>(pc->kind)));
  }
  return s;
}

double similarity(const PositionSketch& a, const PositionSketch& b) {
  std::size_t shared = 0;
  auto i = a.tokens.begin();
  auto j = b.tokens.begin();
  while (i != a.tokens.end() && j != b.tokens.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return jaccard(shared, a.tokens.size(), b.tokens.size());
}

double similarity(const Position& a, const Position& b) { return similarity(sketch(a), sketch(b)); }

Index::Index(const std::vector<std::pair<std::string, Position>>& corpus) : postings_(kTokenCount) {
  if (corpus.empty()) throw EmptyCorpus();
  docs_.reserve(corpus.size());
  fens_.reserve(corpus.size());
  for (const auto& [id, p] : corpus) {
    auto doc = static_cast<std::uint32_t>(docs_.size());
    docs_.push_back(sketch(p, id));
    fens_.push_back(board_side_fen(p));
    for (Token t : docs_.back().tokens) postings_[t].push_back(doc);
  }
}

std::vector<Neighbor> Index::nearest(const Position& p, std::size_t k) const {
  if (k == 0) return {};
  PositionSketch q = sketch(p);
  std::vector<std::uint16_t> shared(docs_.size(), 0);
  for (Token t : q.tokens)
    for (std::uint32_t d : postings_[t]) ++shared[d];
  std::vector<Neighbor> hits;
  std::vector<std::uint32_t> misses;
  for (std::uint32_t d = 0; d < docs_.size(); ++d) {
    if (shared[d] > 0) {
      hits.push_back({docs_[d].source_id, jaccard(shared[d], q.tokens.size(), docs_[d].tokens.size())});
    } else {
      misses.push_back(d);
    }
  }
  keep_top(hits, k);
  if (hits.size() < k) {
    std::vector<Neighbor> rest;
    for (std::uint32_t d : misses) rest.push_back({docs_[d].source_id, jaccard(0, q.tokens.size(), docs_[d].tokens.size())});
    keep_top(rest, k - hits.size());
    hits.insert(hits.end(), rest.begin(), rest.end());
  }
  return hits;
}

double Index::max_similarity(const Position& p) const { return nearest(p, 1).front().similarity; }

bool Index::is_duplicate(const Position& p, double threshold) const { return max_similarity(p) >= threshold; }

void Index::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kHeader << "\n";
  for (std::size_t i = 0; i < docs_.size(); ++i) out << docs_[i].source_id << '\t' << fens_[i] << '\n';
}

Index Index::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw IndexFormatError("unexpected index header in " + path);
  std::vector<std::pair<std::string, Position>> corpus;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw IndexFormatError("malformed index line: " + line);
    corpus.emplace_back(line.substr(0, tab), parse_fen_unchecked(line.substr(tab + 1)));
  }
  return Index(corpus);
}

std::vector<Neighbor> brute_force_nearest(const std::vector<std::pair<std::string, Position>>& corpus,
                                          const Position& p, std::size_t k) {
  std::vector<Neighbor> all;
  for (const auto& [id, q] : corpus) all.push_back({id, similarity(p, q)});
  std::sort(all.begin(), all.end(), ranks_before);
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace foundry::novelty
