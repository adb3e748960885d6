#include "foundry/sources/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace foundry::sources {

namespace {

constexpr std::uint64_t kBosCode = 31;

int symbol_of(char c) {
  if (c == kEosChar) return 0;
  auto pos = kFenAlphabet.find(c);
  if (pos == std::string_view::npos) throw std::invalid_argument(std::string("character outside the FEN alphabet: '") + c + "'");
  return static_cast<int>(pos) + 1;
}

char char_of(int symbol) { return symbol == 0 ? kEosChar : kFenAlphabet[static_cast<std::size_t>(symbol - 1)]; }

// Context of the given length ending just before position `at` of the symbol string.
std::uint64_t context_key(const std::vector<int>& symbols, std::size_t at, int length) {
  std::uint64_t key = static_cast<std::uint64_t>(length) << 58;
  for (int j = length; j >= 1; --j) {
    std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(at) - j;
    std::uint64_t code = idx < 0 ? kBosCode : static_cast<std::uint64_t>(symbols[static_cast<std::size_t>(idx)]);
    key |= code << (5 * (j - 1));
  }
  return key;
}

std::vector<int> symbols_of(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) {
    int s = symbol_of(c);
    if (s == 0) throw std::invalid_argument("end marker inside text");
    out.push_back(s);
  }
  return out;
}

}  // namespace

NgramModel NgramModel::fit(const std::vector<std::string>& corpus, int order, double smoothing) {
  if (corpus.empty()) throw EmptyCorpus();
  if (order < 0 || order > kMaxOrder) throw std::invalid_argument("n-gram order must be in 0.." + std::to_string(kMaxOrder));
  if (!(smoothing > 0)) throw std::invalid_argument("smoothing must be positive");
  NgramModel m(order, smoothing);
  for (const auto& text : corpus) {
    auto symbols = symbols_of(text);
    for (std::size_t i = 0; i <= symbols.size(); ++i) {
      int next = i < symbols.size() ? symbols[i] : 0;
      for (int len = 0; len <= order; ++len) m.add(context_key(symbols, i, len), next);
    }
  }
  return m;
}

void NgramModel::add(std::uint64_t key, int symbol) {
  Counts& c = table_[key];
  ++c.total;
  for (auto& [s, n] : c.next) {
    if (s == symbol) {
      ++n;
      return;
    }
  }
  c.next.emplace_back(static_cast<std::uint8_t>(symbol), 1);
}

const NgramModel::Counts* NgramModel::lookup(std::uint64_t key) const {
  auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

std::array<double, kSymbols> NgramModel::next_distribution(std::string_view prefix) const {
  auto symbols = symbols_of(prefix);
  std::array<double, kSymbols> p;
  p.fill(1.0 / kSymbols);
  for (int len = 0; len <= order_; ++len) {
    const Counts* c = lookup(context_key(symbols, symbols.size(), len));
    if (!c) break;
    // Backoff mass: the additive constant plus one unit per distinct continuation.
    double backoff = smoothing_ + static_cast<double>(c->next.size());
    std::array<double, kSymbols> q;
    for (int s = 0; s < kSymbols; ++s) q[static_cast<std::size_t>(s)] = backoff * p[static_cast<std::size_t>(s)];
    for (auto [s, n] : c->next) q[s] += n;
    for (auto& v : q) v /= (c->total + backoff);
    p = q;
  }
  return p;
}

double NgramModel::log_prob(std::string_view text) const {
  double lp = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    auto dist = next_distribution(text.substr(0, i));
    int next = i < text.size() ? symbol_of(text[i]) : 0;
    lp += std::log(dist[static_cast<std::size_t>(next)]);
  }
  return lp;
}

double NgramModel::perplexity(const std::vector<std::string>& texts) const {
  double lp = 0;
  std::size_t n = 0;
  for (const auto& t : texts) {
    lp += log_prob(t);
    n += t.size() + 1;
  }
  return n == 0 ? 1.0 : std::exp(-lp / static_cast<double>(n));
}

std::optional<std::string> NgramModel::sample_text(std::mt19937_64& rng, std::size_t max_chars, double temperature) const {
  if (!(temperature > 0)) throw std::invalid_argument("temperature must be positive");
  std::string text;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (text.size() < max_chars) {
    auto dist = next_distribution(text);
    if (temperature != 1.0) {
      double z = 0;
      for (auto& v : dist) z += (v = std::pow(v, 1.0 / temperature));
      for (auto& v : dist) v /= z;
    }
    double u = unit(rng);
    int pick = kSymbols - 1;
    for (int s = 0; s < kSymbols; ++s) {
      u -= dist[static_cast<std::size_t>(s)];
      if (u < 0) {
        pick = s;
        break;
      }
    }
    if (pick == 0) return text;
    text.push_back(char_of(pick));
  }
  return std::nullopt;
}

std::uint64_t NgramModel::count(std::string_view context, char next) const {
  if (static_cast<int>(context.size()) > order_) return 0;
  std::uint64_t key = static_cast<std::uint64_t>(context.size()) << 58;
  for (std::size_t j = 0; j < context.size(); ++j) {
    std::uint64_t code = context[j] == kBosChar ? kBosCode : static_cast<std::uint64_t>(symbol_of(context[j]));
    key |= code << (5 * (context.size() - 1 - j));
  }
  const Counts* c = lookup(key);
  if (!c) return 0;
  int s = symbol_of(next);
  for (auto [sym, n] : c->next)
    if (sym == s) return n;
  return 0;
}

std::uint64_t NgramModel::total_count(int level) const {
  std::uint64_t total = 0;
  for (const auto& [key, c] : table_)
    if (static_cast<int>(key >> 58) == level) total += c.total;
  return total;
}

void NgramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "foundry-ngram 1 " << order_ << ' ' << smoothing_ << '\n';
  std::vector<std::uint64_t> keys;
  keys.reserve(table_.size());
  for (const auto& kv : table_) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  for (auto key : keys) {
    const Counts& c = table_.at(key);
    out << std::hex << key << std::dec;
    for (auto [s, n] : c.next) out << ' ' << static_cast<int>(s) << ':' << n;
    out << '\n';
  }
}

NgramModel NgramModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string magic;
  int version = 0;
  int order = 0;
  double smoothing = 0;
  in >> magic >> version >> order >> smoothing;
  if (magic != "foundry-ngram" || version != 1 || order < 0 || order > kMaxOrder || !(smoothing > 0))
    throw ModelFormatError("not an n-gram model file: " + path);
  NgramModel m(order, smoothing);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::uint64_t key;
    if (!(ls >> std::hex >> key >> std::dec)) throw ModelFormatError("bad model line: " + line);
    Counts& c = m.table_[key];
    std::string pair;
    while (ls >> pair) {
      auto colon = pair.find(':');
      if (colon == std::string::npos) throw ModelFormatError("bad count: " + pair);
      int s = std::stoi(pair.substr(0, colon));
      auto n = static_cast<std::uint32_t>(std::stoul(pair.substr(colon + 1)));
      if (s < 0 || s >= kSymbols) throw ModelFormatError("bad symbol: " + pair);
      c.next.emplace_back(static_cast<std::uint8_t>(s), n);
      c.total += n;
    }
  }
  return m;
}

std::optional<Position> accept_sample(const std::string& text) {
  try {
    Position p = parse_fen(text);
    if (!validate_realism(p).empty()) return std::nullopt;
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

SampleOutcome sample_fen(const NgramModel& m, std::mt19937_64& rng, int max_attempts, double temperature) {
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto text = m.sample_text(rng, kMaxSampleChars, temperature);
    if (!text) continue;
    if (auto p = accept_sample(*text)) return {*p, attempt};
  }
  throw RejectionBudgetExhausted(max_attempts);
}

}  // namespace foundry::sources
