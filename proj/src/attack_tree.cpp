#include "dvca/attack_tree.hpp"

#include <algorithm>

#include "dvca/rounding.hpp"

namespace dvca {

namespace {

std::vector<double> values_of(std::span<const VulnerabilityScore> scores) {
  if (scores.empty()) {
    throw AttackTreeError(AttackTreeErrorKind::EmptyInput, "EmptyInput: no scores to aggregate");
  }
  std::vector<double> out;
  out.reserve(scores.size());
  for (const auto s : scores) out.push_back(s.value());
  return out;
}

VulnerabilityScore to_score(double p) {
  const auto units = std::clamp<long long>(round_half_up_units(p, 2), 1, 100);
  return VulnerabilityScore::from_hundredths(static_cast<int>(units));
}

}  // namespace

std::string_view to_string(AggregateRelation r) {
  switch (r) {
    case AggregateRelation::And: return "and";
    case AggregateRelation::Or: return "or";
    case AggregateRelation::Single: return "single";
  }
  return "?";
}

double conjunctive_probability(std::span<const double> p) {
  double product = 1.0;
  for (const double x : p) product *= x;
  return product;
}

double disjunctive_probability(std::span<const double> p) {
  double none = 1.0;
  for (const double x : p) none *= 1.0 - x;
  return 1.0 - none;
}

VulnerabilityScore aggregate_and(std::span<const VulnerabilityScore> scores) {
  const auto v = values_of(scores);
  return to_score(conjunctive_probability(v));
}

VulnerabilityScore aggregate_or(std::span<const VulnerabilityScore> scores) {
  const auto v = values_of(scores);
  return to_score(disjunctive_probability(v));
}

AssetAggregate aggregate_asset(std::string asset_id, std::optional<Relation> relation,
                               std::vector<VulnerabilityScore> inputs) {
  if (inputs.empty()) {
    throw AttackTreeError(AttackTreeErrorKind::EmptyInput,
                          "EmptyInput: asset " + asset_id + " has no vulnerabilities");
  }
  AssetAggregate agg;
  agg.asset_id = std::move(asset_id);
  if (inputs.size() == 1) {
    if (relation) {
      throw AttackTreeError(AttackTreeErrorKind::RelationUnexpected,
                            "RelationUnexpected: asset " + agg.asset_id +
                                " has a single vulnerability but declares a relation");
    }
    agg.relation = AggregateRelation::Single;
    agg.value = inputs.front();
  } else if (!relation) {
    throw AttackTreeError(AttackTreeErrorKind::RelationMissing,
                          "RelationMissing: asset " + agg.asset_id + " has " +
                              std::to_string(inputs.size()) +
                              " vulnerabilities and no and/or relation");
  } else if (*relation == Relation::And) {
    agg.relation = AggregateRelation::And;
    agg.value = aggregate_and(inputs);
  } else {
    agg.relation = AggregateRelation::Or;
    agg.value = aggregate_or(inputs);
  }
  agg.inputs = std::move(inputs);
  return agg;
}

}  // namespace dvca
