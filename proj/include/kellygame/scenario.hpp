#pragma once

// Scenario files:
//   {"r": 0.0, "mu": [0.24], "sigma": [0.69], "rho": [[1]],
//    "b": [0.5], "c": [1.0],                                   (optional)
//    "sim": {"T": 300, "steps": 300, "paths": 1, "seed": 7}}   (optional)

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kellygame/market.hpp"
#include "kellygame/monte_carlo.hpp"

namespace kelly {

/// Invalid scenario content. `where` is a JSON field path ("/sigma/1") or a
/// "line:column" position for syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string where, std::string detail)
      : std::runtime_error(where + ": " + detail), where_(std::move(where)), detail_(std::move(detail)) {}
  const std::string& where() const { return where_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

/// The scenario file could not be read.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  Market market;
  std::optional<Rule> b;
  std::optional<Rule> c;
  std::optional<SimConfig> sim;
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Market& m);
nlohmann::json to_json(const Rule& rule);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const SimConfig& cfg);

}  // namespace kelly
