#pragma once

// Declarative scenario model and its JSON document format.
//
//   {
//     "name": "...",
//     "assets": [{"id", "name"?, "layer", "exposure": "remote"|"internal",
//                 "relation"?: "and"|"or"}],
//     "mechanisms": [{"id", "kind", "protects": [asset ids]}],
//     "vulnerabilities": [{"id", "cve", "asset", "vector"?, "cvss_score"?}],
//     "attack_edges": [{"from", "to"}],
//     "attacker": "ATK",
//     "target": "PLC",
//     "fcm": {"lambda"?, "epsilon"?, "max_iterations"?, "initial_activation"?}
//   }

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvca/environment.hpp"
#include "dvca/fcm.hpp"

namespace dvca {

struct ScenarioModel {
  std::string name;
  std::vector<Asset> assets;
  std::vector<SecurityMechanism> mechanisms;
  std::vector<Vulnerability> vulnerabilities;
  std::vector<AttackEdge> attack_edges;
  std::string attacker_id;
  std::string target_id;
  FcmConfig fcm;

  friend bool operator==(const ScenarioModel&, const ScenarioModel&) = default;
};

enum class ScenarioErrorKind { ParseError, SchemaError, ValidationError };

std::string_view to_string(ScenarioErrorKind kind);

class ScenarioError : public std::runtime_error {
 public:
  // `where` is a document path ("assets[2].exposure") for schema errors and
  // the offending id for validation errors.
  ScenarioError(ScenarioErrorKind kind, std::string where, const std::string& message)
      : std::runtime_error(message), kind_(kind), where_(std::move(where)) {}

  ScenarioErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ScenarioErrorKind kind_;
  std::string where_;
};

// Throws ScenarioError. Returns non-fatal findings (e.g. cycles).
std::vector<std::string> validate_scenario(const ScenarioModel& model);

// Parses, defaults and validates. Warnings from validation are appended to
// `warnings` when given.
ScenarioModel load_scenario(std::string_view document, std::vector<std::string>* warnings = nullptr);

// Reads the file; I/O failures raise std::system_error.
ScenarioModel load_scenario_file(const std::filesystem::path& path,
                                 std::vector<std::string>* warnings = nullptr);

std::string render_scenario(const ScenarioModel& model);

}  // namespace dvca
