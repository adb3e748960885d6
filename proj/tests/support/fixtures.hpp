#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(FOUNDRY_TEST_DATA) + "/" + name; }

inline const nlohmann::json& booklet() {
  static const nlohmann::json doc = [] {
    std::ifstream in(data_path("booklet.json"));
    if (!in) throw std::runtime_error("missing booklet.json");
    return nlohmann::json::parse(in);
  }();
  return doc;
}

}  // namespace fixtures
