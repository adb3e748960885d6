// Scripted stand-in for a UCI engine, used by the bridge tests.
//
// Usage: fake_uci_engine SCRIPT
//
// The script is a list of blocks. "on PREFIX" starts a block that answers any
// command beginning with PREFIX (longest prefix wins). Repeated blocks for the
// same prefix are used in order and the last one repeats. Lines inside a block
// are echoed verbatim, except directives:
//   @sleep MS          pause
//   @partial TEXT      write TEXT without a newline
//   @exit              exit immediately with status 1
//   @crash-once FILE   exit with status 1 unless FILE exists (FILE is created)
// Commands with no matching block get no reply. "quit" exits.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace {

struct Script {
  std::map<std::string, std::vector<std::vector<std::string>>> blocks;
  std::map<std::string, size_t> used;
};

Script load(const char* path) {
  Script s;
  std::ifstream in(path);
  std::string line;
  std::vector<std::string>* current = nullptr;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#", 0) == 0) continue;
    if (line.rfind("on ", 0) == 0) {
      auto& list = s.blocks[line.substr(3)];
      list.emplace_back();
      current = &list.back();
    } else if (current && !line.empty()) {
      current->push_back(line);
    }
  }
  return s;
}

void emit(const std::vector<std::string>& block) {
  for (const auto& line : block) {
    if (line.rfind("@sleep ", 0) == 0) {
      std::cout.flush();
      std::this_thread::sleep_for(std::chrono::milliseconds(std::stoi(line.substr(7))));
    } else if (line.rfind("@partial ", 0) == 0) {
      std::cout << line.substr(9);
      std::cout.flush();
    } else if (line == "@exit") {
      std::cout.flush();
      std::_Exit(1);
    } else if (line.rfind("@crash-once ", 0) == 0) {
      std::string marker = line.substr(12);
      if (!std::ifstream(marker)) {
        std::ofstream(marker) << "crashed\n";
        std::cout.flush();
        std::_Exit(1);
      }
    } else {
      std::cout << line << '\n';
    }
  }
  std::cout.flush();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fake_uci_engine SCRIPT\n";
    return 2;
  }
  Script script = load(argv[1]);
  std::string cmd;
  while (std::getline(std::cin, cmd)) {
    if (cmd == "quit") return 0;
    const std::string* best = nullptr;
    for (const auto& [prefix, list] : script.blocks) {
      if (cmd.rfind(prefix, 0) == 0 && (!best || prefix.size() > best->size())) best = &prefix;
    }
    if (!best) continue;
    auto& list = script.blocks[*best];
    size_t& i = script.used[*best];
    emit(list[std::min(i, list.size() - 1)]);
    ++i;
  }
  return 0;
}
