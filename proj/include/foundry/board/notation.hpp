#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "foundry/board/movegen.hpp"

namespace foundry {

class NotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_san(const Position& p, const Move& m);

// Tolerates annotation glyphs (!, ?), missing or extra check marks, "0-0",
// over-disambiguation and a missing capture sign. Throws NotationError.
Move parse_san(const Position& p, std::string_view san);

// "e2e4", "e7e8q". Throws NotationError unless legal in p.
Move parse_uci(const Position& p, std::string_view text);

// Splits a printed line such as "1. Rg6+! Kh8 2. Rxh7+" into SAN tokens,
// dropping move numbers and result markers.
std::vector<std::string> tokenize_line(std::string_view text);

std::vector<Move> parse_san_line(const Position& start, std::span<const std::string> sans);
std::vector<std::string> to_san_line(const Position& start, std::span<const Move> moves);
std::vector<std::string> to_uci_line(std::span<const Move> moves);

Position play_line(const Position& start, std::span<const Move> moves);

}  // namespace foundry
