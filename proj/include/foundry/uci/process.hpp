#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <sys/types.h>
#include <vector>

namespace foundry::uci {

class ProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A child process with line-oriented pipes on stdin/stdout. stderr is discarded.
class ChildProcess {
 public:
  // Throws ProcessError if the executable cannot be started.
  ChildProcess(const std::string& path, const std::vector<std::string>& args);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  // Returns false if the child has gone away.
  bool write_line(const std::string& line);

  enum class ReadStatus { Line, Timeout, Closed };
  // Waits until a full line arrives, the deadline passes, or the child closes stdout.
  ReadStatus read_line(std::string& out, std::chrono::steady_clock::time_point deadline);

  bool running();
  void terminate();
  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool closed_ = false;
};

}  // namespace foundry::uci
