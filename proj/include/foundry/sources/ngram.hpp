#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "foundry/board/position.hpp"

namespace foundry::sources {

// FEN characters of the board+side form; symbol 0 is end-of-string.
inline constexpr std::string_view kFenAlphabet = "12345678/pnbrqkPNBRQK wb";
inline constexpr int kSymbols = static_cast<int>(kFenAlphabet.size()) + 1;
inline constexpr int kMaxOrder = 11;
inline constexpr char kBosChar = '^';
inline constexpr char kEosChar = '$';
inline constexpr std::size_t kMaxSampleChars = 120;
inline constexpr double kDefaultTemperature = 0.7;

class EmptyCorpus : public std::invalid_argument {
 public:
  EmptyCorpus() : std::invalid_argument("n-gram corpus is empty") {}
};

class RejectionBudgetExhausted : public std::runtime_error {
 public:
  explicit RejectionBudgetExhausted(int attempts)
      : std::runtime_error("no valid position after " + std::to_string(attempts) + " samples") {}
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Character n-gram model with counts at every context length 0..order.
// Next-symbol probabilities interpolate each level with the one below:
//   p_L(c) = (n_L(c) + b_L * p_{L-1}(c)) / (N_L + b_L),  b_L = smoothing + distinct_L
// bottoming out in the uniform distribution, so every symbol (end-of-string
// included) keeps positive mass. Unseen contexts fall through to shorter ones.
class NgramModel {
 public:
  static NgramModel fit(const std::vector<std::string>& corpus, int order = 8, double smoothing = 0.1);

  int order() const { return order_; }
  double smoothing() const { return smoothing_; }

  std::array<double, kSymbols> next_distribution(std::string_view prefix) const;
  // Natural-log probability of text followed by end-of-string.
  double log_prob(std::string_view text) const;
  double perplexity(const std::vector<std::string>& texts) const;

  // Draws from the distribution raised to 1/temperature and renormalized.
  // nullopt when max_chars is reached before end-of-string.
  std::optional<std::string> sample_text(std::mt19937_64& rng, std::size_t max_chars = kMaxSampleChars,
                                         double temperature = kDefaultTemperature) const;

  // Raw counts. context uses kBosChar for padding, next uses kEosChar for end.
  std::uint64_t count(std::string_view context, char next) const;
  std::uint64_t total_count(int level) const;
  std::size_t context_count() const { return table_.size(); }

  void save(const std::string& path) const;
  static NgramModel load(const std::string& path);

 private:
  struct Counts {
    std::uint32_t total = 0;
    std::vector<std::pair<std::uint8_t, std::uint32_t>> next;
  };

  NgramModel(int order, double smoothing) : order_(order), smoothing_(smoothing) {}
  const Counts* lookup(std::uint64_t key) const;
  void add(std::uint64_t key, int symbol);

  int order_;
  double smoothing_;
  std::unordered_map<std::uint64_t, Counts> table_;
};

struct SampleOutcome {
  Position position;
  int attempts;
};

// Parses a sampled board+side string; nullopt unless it is structurally valid
// and passes the realism check.
std::optional<Position> accept_sample(const std::string& text);

SampleOutcome sample_fen(const NgramModel& m, std::mt19937_64& rng, int max_attempts = 100,
                         double temperature = kDefaultTemperature);

}  // namespace foundry::sources
