#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "foundry/uci/engine.hpp"

namespace foundry::uci {

// A strong/weak handle pair owned by one worker at a time.
struct EnginePair {
  Analyzer& strong;
  Analyzer& weak;
};

class EnginePool {
 public:
  EnginePool(const EngineProfile& strong, const EngineProfile& weak, int workers);

  int size() const { return static_cast<int>(strong_.size()); }

  // Calls fn(i, pair) for every i in [0, n). Each index runs on exactly one
  // worker; results must be written to per-index slots by the caller.
  void for_each(std::size_t n, const std::function<void(std::size_t, EnginePair)>& fn);

 private:
  std::vector<std::unique_ptr<ResilientEngine>> strong_;
  std::vector<std::unique_ptr<ResilientEngine>> weak_;
};

}  // namespace foundry::uci
