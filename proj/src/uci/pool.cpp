#include "foundry/uci/pool.hpp"

namespace foundry::uci {

EnginePool::EnginePool(const EngineProfile& strong, const EngineProfile& weak, int workers) {
  check_profiles(strong, weak);
  if (workers < 1) workers = 1;
  for (int i = 0; i < workers; ++i) {
    strong_.push_back(std::make_unique<ResilientEngine>(strong));
    weak_.push_back(std::make_unique<ResilientEngine>(weak));
  }
}

void EnginePool::for_each(std::size_t n, const std::function<void(std::size_t, EnginePair)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&](int w) {
    EnginePair pair{*strong_[w], *weak_[w]};
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i, pair);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
        return;
      }
    }
  };
  if (size() == 1 || n <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < size(); ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace foundry::uci
