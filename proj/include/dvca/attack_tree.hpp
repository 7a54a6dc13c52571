#pragma once

// Per-asset aggregation of vulnerability scores.
//   conjunctive (AND): Pc = prod P(i)
//   disjunctive (OR):  Pd = 1 - prod (1 - P(i))
// Results are rounded half-up to two decimals before they are used as FCM
// edge weights.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvca/cvss.hpp"
#include "dvca/environment.hpp"

namespace dvca {

enum class AggregateRelation { And, Or, Single };

std::string_view to_string(AggregateRelation r);

struct AssetAggregate {
  std::string asset_id;
  AggregateRelation relation = AggregateRelation::Single;
  std::vector<VulnerabilityScore> inputs;
  VulnerabilityScore value = VulnerabilityScore::from_hundredths(100);
};

enum class AttackTreeErrorKind { EmptyInput, RelationMissing, RelationUnexpected };

class AttackTreeError : public std::runtime_error {
 public:
  AttackTreeError(AttackTreeErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  AttackTreeErrorKind kind() const noexcept { return kind_; }

 private:
  AttackTreeErrorKind kind_;
};

// Unrounded formulas over arbitrary probabilities in [0, 1].
double conjunctive_probability(std::span<const double> p);
double disjunctive_probability(std::span<const double> p);

// Rounded to two decimals. A product that would round to 0.00 is reported as
// 0.01, the smallest positive two-decimal score.
VulnerabilityScore aggregate_and(std::span<const VulnerabilityScore> scores);
VulnerabilityScore aggregate_or(std::span<const VulnerabilityScore> scores);

// Dispatches on relation: one input is passed through (relation must be
// absent); two or more need a relation.
AssetAggregate aggregate_asset(std::string asset_id, std::optional<Relation> relation,
                               std::vector<VulnerabilityScore> inputs);

}  // namespace dvca
