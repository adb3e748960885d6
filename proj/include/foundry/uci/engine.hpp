#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "foundry/board/position.hpp"
#include "foundry/uci/process.hpp"

namespace foundry::uci {

// Mate in n plies scores kMateScore - n for the mating side.
inline constexpr int kMateScore = 100000;

enum class EngineRole { Strong, Weak };

struct EngineProfile {
  std::string executable_path;
  std::vector<std::string> args;
  EngineRole role = EngineRole::Strong;
  int depth_limit = 18;
  std::optional<std::uint64_t> node_limit;
  int multipv = 1;
  int hash_mb = 16;
  int threads = 1;
  std::map<std::string, std::string> extra_options;
  // Threads pinned to 1, fixed hash, hash cleared before every analysis.
  bool deterministic = true;
  std::chrono::milliseconds handshake_timeout{30000};
  std::chrono::milliseconds analysis_timeout{600000};
};

// Throws std::invalid_argument when the pair breaks the strong/weak depth ordering.
void check_profiles(const EngineProfile& strong, const EngineProfile& weak);

struct ScoredLine {
  int rank = 1;
  Move move;
  int eval = 0;  // centipawns from the side to move
  int depth = 0;
  std::vector<Move> pv;
  std::uint64_t nodes = 0;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EngineNotFound : public EngineError {
 public:
  using EngineError::EngineError;
};
class HandshakeTimeout : public EngineError {
 public:
  using EngineError::EngineError;
};
class OptionRejected : public EngineError {
 public:
  using EngineError::EngineError;
};
class EngineCrashed : public EngineError {
 public:
  using EngineError::EngineError;
};
class ProtocolError : public EngineError {
 public:
  using EngineError::EngineError;
};

// Anything that can produce ranked lines for a position.
class Analyzer {
 public:
  virtual ~Analyzer() = default;
  virtual std::vector<ScoredLine> analyse(const Position& p, int depth, int multipv) = 0;
  // Nodes reported by the most recent analyse call.
  virtual std::uint64_t last_nodes() const = 0;
};

int mate_to_eval(int mate_in_moves);

// Parses one "info" record. Returns nullopt for records without a score and pv
// (currmove, string, hashfull...). Throws ProtocolError on malformed fields.
struct InfoRecord {
  int depth = 0;
  int multipv = 1;
  int eval = 0;
  bool bound = false;
  std::uint64_t nodes = 0;
  std::vector<std::string> pv;
};
std::optional<InfoRecord> parse_info(const std::string& line);

class UciEngine : public Analyzer {
 public:
  // Spawns the process and completes the handshake.
  explicit UciEngine(EngineProfile profile);
  ~UciEngine() override;

  std::vector<ScoredLine> analyse(const Position& p, int depth, int multipv) override;
  std::uint64_t last_nodes() const override { return last_nodes_; }

  const EngineProfile& profile() const { return profile_; }
  const std::string& name() const { return name_; }

 private:
  void send(const std::string& cmd);
  void wait_ready(std::chrono::milliseconds timeout, std::vector<std::string>* seen = nullptr);
  void set_option(const std::string& name, const std::string& value);

  EngineProfile profile_;
  std::unique_ptr<ChildProcess> process_;
  std::string name_;
  std::vector<std::string> advertised_;
  int current_multipv_ = 1;
  std::uint64_t last_nodes_ = 0;
};

// Respawns a crashed engine once and retries the analysis once.
class ResilientEngine : public Analyzer {
 public:
  explicit ResilientEngine(EngineProfile profile);

  std::vector<ScoredLine> analyse(const Position& p, int depth, int multipv) override;
  std::uint64_t last_nodes() const override { return last_nodes_; }
  const EngineProfile& profile() const { return profile_; }
  int respawns() const { return respawns_; }

 private:
  EngineProfile profile_;
  std::unique_ptr<UciEngine> engine_;
  std::uint64_t last_nodes_ = 0;
  int respawns_ = 0;
};

struct Stability {
  std::optional<Move> stable_move;
  std::uint64_t nodes_total = 0;
  // nullopt means the rank-1 move never held for three consecutive entries.
  std::optional<int> first_stable_depth;
};

Stability bestmove_stability(Analyzer& engine, const Position& p, std::span<const int> depth_schedule);

}  // namespace foundry::uci
