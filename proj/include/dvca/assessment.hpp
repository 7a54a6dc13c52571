#pragma once

// End-to-end pipeline: modify -> score -> normalize -> aggregate -> FCM, and
// what-if comparison between scenario variants.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvca/attack_tree.hpp"
#include "dvca/cvss.hpp"
#include "dvca/fcm.hpp"
#include "dvca/nvd_client.hpp"
#include "dvca/scenario.hpp"

namespace dvca {

struct CveAssessment {
  std::string vuln_id;
  std::string cve_id;
  std::string asset_id;
  std::optional<double> cvss_score;
  ExploitabilityVector original;
  ExploitabilityScore original_score = ExploitabilityScore::from_tenths(39);
  ExploitabilityVector modified;
  ExploitabilityScore modified_score = ExploitabilityScore::from_tenths(39);
  VulnerabilityScore vulnerability_score = VulnerabilityScore::from_hundredths(100);

  friend bool operator==(const CveAssessment&, const CveAssessment&) = default;
};

struct TargetValue {
  double unit = 0.0;    // 4 decimals
  double ten = 0.0;     // 2 decimals, 0-10 range
  double cvss39 = 0.0;  // 2 decimals, 0-3.9 range

  friend bool operator==(const TargetValue&, const TargetValue&) = default;
};

struct AssessmentReport {
  std::string scenario_name;
  std::string attacker_id;
  std::string target_id;
  FcmConfig config;
  std::vector<CveAssessment> per_cve;
  std::vector<AssetAggregate> per_asset;
  std::vector<std::string> concepts;
  IterationTrace trace;
  TargetValue target_value;

  bool converged() const { return trace.converged; }
  std::size_t iterations_used() const { return trace.steps(); }
  // Full-precision equilibrium activation of the target.
  double target_activation() const;
};

bool operator==(const AssessmentReport& a, const AssessmentReport& b);

// Vectors for vulnerabilities without an inline one, keyed by CVE id.
using VectorLookup = std::map<std::string, ExploitabilityVector>;

VectorLookup vectors_from_records(std::span<const CveRecord> records);

class AssessmentError : public std::runtime_error {
 public:
  AssessmentError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Errors from the stages are rethrown as AssessmentError labelled with the
// stage ("resolve", "modify", "aggregate", "fcm").
AssessmentReport assess(const ScenarioModel& model, const VectorLookup& resolved = {});

struct ComparisonRow {
  std::string name;
  double value = 0.0;
  double absolute_reduction = 0.0;  // 4 decimals
  double percent_reduction = 0.0;   // 2 decimals

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct ComparisonReport {
  std::string target_id;
  std::string baseline_name;
  double baseline_value = 0.0;
  std::vector<ComparisonRow> variants;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

// Reductions use the 4-decimal target values. Throws std::invalid_argument if
// the reports assess different targets.
ComparisonReport compare(const AssessmentReport& baseline,
                         std::span<const AssessmentReport> variants);

}  // namespace dvca
