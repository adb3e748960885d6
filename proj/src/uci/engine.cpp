#include "foundry/uci/engine.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <unistd.h>

#include "foundry/board/notation.hpp"

namespace foundry::uci {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

template <typename T>
T number(const std::string& tok, const std::string& line) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ProtocolError("bad number '" + tok + "' in: " + line);
  return value;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::chrono::steady_clock::time_point after(std::chrono::milliseconds d) { return std::chrono::steady_clock::now() + d; }

}  // namespace

void check_profiles(const EngineProfile& strong, const EngineProfile& weak) {
  if (strong.depth_limit <= weak.depth_limit) {
    throw std::invalid_argument("strong depth must exceed weak depth");
  }
  for (const auto* p : {&strong, &weak}) {
    if (p->multipv < 1) throw std::invalid_argument("multipv must be at least 1");
    if (p->deterministic && p->threads != 1) throw std::invalid_argument("determinism mode requires one thread");
  }
}

int mate_to_eval(int mate_in_moves) {
  if (mate_in_moves > 0) return kMateScore - (2 * mate_in_moves - 1);
  return -(kMateScore - 2 * (-mate_in_moves));
}

std::optional<InfoRecord> parse_info(const std::string& line) {
  auto tok = split(line);
  if (tok.empty() || tok[0] != "info") throw ProtocolError("not an info record: " + line);
  InfoRecord rec;
  bool has_score = false;
  auto need = [&](size_t i) {
    if (i >= tok.size()) throw ProtocolError("truncated info record: " + line);
    return tok[i];
  };
  for (size_t i = 1; i < tok.size(); ++i) {
    const std::string& key = tok[i];
    if (key == "depth") {
      rec.depth = number<int>(need(++i), line);
    } else if (key == "multipv") {
      rec.multipv = number<int>(need(++i), line);
      if (rec.multipv < 1) throw ProtocolError("multipv must be positive: " + line);
    } else if (key == "nodes") {
      rec.nodes = number<std::uint64_t>(need(++i), line);
    } else if (key == "seldepth" || key == "time" || key == "nps" || key == "hashfull" || key == "tbhits" ||
               key == "currmovenumber" || key == "cpuload" || key == "currmove") {
      need(++i);
    } else if (key == "wdl") {
      need(i + 3);
      i += 3;
    } else if (key == "score") {
      const std::string kind = need(++i);
      int value = number<int>(need(++i), line);
      if (kind == "cp") {
        rec.eval = value;
      } else if (kind == "mate") {
        rec.eval = mate_to_eval(value);
      } else {
        throw ProtocolError("unknown score kind '" + kind + "': " + line);
      }
      has_score = true;
      if (i + 1 < tok.size() && (tok[i + 1] == "lowerbound" || tok[i + 1] == "upperbound")) {
        rec.bound = true;
        ++i;
      }
    } else if (key == "pv") {
      rec.pv.assign(tok.begin() + static_cast<long>(i) + 1, tok.end());
      break;
    } else if (key == "string" || key == "refutation" || key == "currline") {
      break;
    }
  }
  if (!has_score || rec.pv.empty()) return std::nullopt;
  return rec;
}

UciEngine::UciEngine(EngineProfile profile) : profile_(std::move(profile)) {
  const auto& path = profile_.executable_path;
  if (path.empty()) throw EngineNotFound("no engine path configured");
  if (path.find('/') != std::string::npos && ::access(path.c_str(), X_OK) != 0) {
    throw EngineNotFound("engine not found or not executable: " + path);
  }
  try {
    process_ = std::make_unique<ChildProcess>(path, profile_.args);
  } catch (const ProcessError& e) {
    throw EngineNotFound(e.what());
  }

  send("uci");
  auto deadline = after(profile_.handshake_timeout);
  std::string line;
  for (;;) {
    auto st = process_->read_line(line, deadline);
    if (st == ChildProcess::ReadStatus::Timeout) throw HandshakeTimeout("no uciok from " + path);
    if (st == ChildProcess::ReadStatus::Closed) throw HandshakeTimeout(path + " exited during handshake");
    if (line == "uciok") break;
    auto tok = split(line);
    if (tok.size() >= 3 && tok[0] == "id" && tok[1] == "name") {
      name_ = line.substr(line.find("name") + 5);
    } else if (tok.size() >= 3 && tok[0] == "option" && tok[1] == "name") {
      auto type_at = line.find(" type ");
      auto start = line.find("name") + 5;
      advertised_.push_back(lower(line.substr(start, type_at == std::string::npos ? std::string::npos : type_at - start)));
    }
  }

  const int threads = profile_.deterministic ? 1 : profile_.threads;
  set_option("Threads", std::to_string(threads));
  set_option("Hash", std::to_string(profile_.hash_mb));
  for (const auto& [k, v] : profile_.extra_options) set_option(k, v);
  if (profile_.multipv != 1) {
    set_option("MultiPV", std::to_string(profile_.multipv));
    current_multipv_ = profile_.multipv;
  }
  std::vector<std::string> replies;
  wait_ready(profile_.handshake_timeout, &replies);
  for (const auto& r : replies) {
    auto l = lower(r);
    if (l.rfind("no such option", 0) == 0 || l.rfind("error", 0) == 0 || l.find("unknown option") != std::string::npos) {
      throw OptionRejected(r);
    }
  }
}

UciEngine::~UciEngine() {
  if (process_) {
    process_->write_line("quit");
    process_->terminate();
  }
}

void UciEngine::send(const std::string& cmd) {
  if (!process_->write_line(cmd)) throw EngineCrashed("engine pipe closed while sending '" + cmd + "'");
}

void UciEngine::set_option(const std::string& name, const std::string& value) {
  if (std::find(advertised_.begin(), advertised_.end(), lower(name)) == advertised_.end()) {
    throw OptionRejected("engine does not advertise option '" + name + "'");
  }
  send("setoption name " + name + " value " + value);
}

void UciEngine::wait_ready(std::chrono::milliseconds timeout, std::vector<std::string>* seen) {
  send("isready");
  auto deadline = after(timeout);
  std::string line;
  for (;;) {
    auto st = process_->read_line(line, deadline);
    if (st == ChildProcess::ReadStatus::Timeout) {
      process_->terminate();
      throw EngineCrashed("no readyok");
    }
    if (st == ChildProcess::ReadStatus::Closed) throw EngineCrashed("engine exited");
    if (line == "readyok") return;
    if (seen) seen->push_back(line);
  }
}

std::vector<ScoredLine> UciEngine::analyse(const Position& p, int depth, int multipv) {
  auto legal = legal_moves(p);
  if (legal.empty()) throw std::invalid_argument("analyse needs a position with a legal move");
  if (depth < 1 || multipv < 1) throw std::invalid_argument("depth and multipv must be positive");

  if (profile_.deterministic) send("ucinewgame");
  if (multipv != current_multipv_) {
    set_option("MultiPV", std::to_string(multipv));
    current_multipv_ = multipv;
  }
  wait_ready(profile_.handshake_timeout);

  send("position fen " + serialize_fen(p));
  std::string go = "go depth " + std::to_string(depth);
  if (profile_.node_limit) go += " nodes " + std::to_string(*profile_.node_limit);
  send(go);

  // Latest exact record per multipv index, plus a bound record as fallback.
  std::map<int, InfoRecord> exact;
  std::map<int, InfoRecord> any;
  std::uint64_t nodes = 0;
  std::string bestmove;
  auto deadline = after(profile_.analysis_timeout);
  std::string line;
  for (;;) {
    auto st = process_->read_line(line, deadline);
    if (st == ChildProcess::ReadStatus::Timeout) {
      process_->terminate();
      throw EngineCrashed("analysis timed out");
    }
    if (st == ChildProcess::ReadStatus::Closed) throw EngineCrashed("engine exited during analysis");
    if (line.rfind("bestmove", 0) == 0) {
      auto tok = split(line);
      if (tok.size() < 2) throw ProtocolError("bestmove without a move");
      bestmove = tok[1];
      break;
    }
    if (line.rfind("info", 0) != 0) continue;
    auto rec = parse_info(line);
    if (!rec) {
      auto tok = split(line);
      auto it = std::find(tok.begin(), tok.end(), "nodes");
      if (it != tok.end() && it + 1 != tok.end()) nodes = std::max(nodes, number<std::uint64_t>(*(it + 1), line));
      continue;
    }
    nodes = std::max(nodes, rec->nodes);
    auto& slot = rec->bound ? any : exact;
    auto found = slot.find(rec->multipv);
    if (found == slot.end() || rec->depth >= found->second.depth) slot[rec->multipv] = *rec;
  }
  last_nodes_ = nodes;

  for (const auto& [k, rec] : any) {
    if (!exact.count(k)) exact[k] = rec;
  }
  if (!exact.count(1)) throw ProtocolError("engine returned no scored line; bestmove " + bestmove);

  const int top_depth = exact[1].depth;
  std::vector<ScoredLine> out;
  const int wanted = std::min<int>(multipv, static_cast<int>(legal.size()));
  for (int k = 1; k <= wanted; ++k) {
    auto it = exact.find(k);
    if (it == exact.end()) break;
    // A lower-ranked line left over from a shallower iteration is stale.
    if (it->second.depth < top_depth - 1 && k > 1) break;
    ScoredLine sl;
    sl.rank = k;
    sl.eval = it->second.eval;
    sl.depth = it->second.depth;
    sl.nodes = it->second.nodes;
    Position cur = p;
    for (const auto& text : it->second.pv) {
      Move m;
      try {
        m = parse_uci(cur, text);
      } catch (const NotationError& e) {
        if (sl.pv.empty()) throw ProtocolError(std::string("illegal pv move: ") + e.what());
        break;  // keep the legal prefix
      }
      sl.pv.push_back(m);
      cur = apply_move_unchecked(cur, m);
    }
    sl.move = sl.pv.front();
    out.push_back(std::move(sl));
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredLine& a, const ScoredLine& b) { return a.eval > b.eval; });
  for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

ResilientEngine::ResilientEngine(EngineProfile profile) : profile_(std::move(profile)) {
  engine_ = std::make_unique<UciEngine>(profile_);
}

std::vector<ScoredLine> ResilientEngine::analyse(const Position& p, int depth, int multipv) {
  try {
    if (!engine_) engine_ = std::make_unique<UciEngine>(profile_);
    auto lines = engine_->analyse(p, depth, multipv);
    last_nodes_ = engine_->last_nodes();
    return lines;
  } catch (const EngineCrashed&) {
    engine_.reset();
    ++respawns_;
  } catch (const ProtocolError&) {
    engine_.reset();
    ++respawns_;
  }
  try {
    engine_ = std::make_unique<UciEngine>(profile_);
  } catch (const EngineError& e) {
    throw EngineCrashed(std::string("respawn failed: ") + e.what());
  }
  try {
    auto lines = engine_->analyse(p, depth, multipv);
    last_nodes_ = engine_->last_nodes();
    return lines;
  } catch (const EngineError&) {
    engine_.reset();
    throw;
  }
}

Stability bestmove_stability(Analyzer& engine, const Position& p, std::span<const int> depth_schedule) {
  if (depth_schedule.empty()) throw std::invalid_argument("empty depth schedule");
  if (!std::is_sorted(depth_schedule.begin(), depth_schedule.end())) {
    throw std::invalid_argument("depth schedule must be ascending");
  }
  Stability out;
  std::optional<Move> run_move;
  int run_length = 0;
  int run_start = 0;
  std::optional<Move> last;
  for (int depth : depth_schedule) {
    auto lines = engine.analyse(p, depth, 1);
    out.nodes_total += engine.last_nodes();
    const Move best = lines.front().move;
    last = best;
    if (run_move && *run_move == best) {
      ++run_length;
    } else {
      run_move = best;
      run_length = 1;
      run_start = depth;
    }
    if (run_length == 3 && !out.first_stable_depth) {
      out.stable_move = best;
      out.first_stable_depth = run_start;
    }
  }
  if (!out.stable_move) out.stable_move = last;
  return out;
}

}  // namespace foundry::uci
