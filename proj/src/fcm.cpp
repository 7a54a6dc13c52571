#include "dvca/fcm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "dvca/rounding.hpp"

namespace dvca {

void FcmConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw FcmError(FcmErrorKind::InvalidConfig, "InvalidConfig: lambda must be positive");
  }
  if (!(initial_activation >= 0.0 && initial_activation <= 1.0)) {
    throw FcmError(FcmErrorKind::InvalidConfig,
                   "InvalidConfig: initial_activation must lie in [0, 1]");
  }
  if (!(epsilon > 0.0)) {
    throw FcmError(FcmErrorKind::InvalidConfig, "InvalidConfig: epsilon must be positive");
  }
  if (max_iterations < 1) {
    throw FcmError(FcmErrorKind::InvalidConfig, "InvalidConfig: max_iterations must be >= 1");
  }
}

FcmModel::FcmModel(std::vector<std::string> concepts, std::vector<FcmEdge> edges,
                   std::size_t attacker, std::size_t target)
    : concepts_(std::move(concepts)), edges_(std::move(edges)), attacker_(attacker),
      target_(target) {
  const auto n = concepts_.size();
  if (attacker_ >= n || target_ >= n) {
    throw FcmError(FcmErrorKind::InvalidModel, "InvalidModel: attacker/target index out of range");
  }
  for (const auto& e : edges_) {
    if (e.from >= n || e.to >= n) {
      throw FcmError(FcmErrorKind::InvalidModel, "InvalidModel: edge endpoint out of range");
    }
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      throw FcmError(FcmErrorKind::InvalidModel, "InvalidModel: edge weight outside [0, 1]");
    }
    if (e.to == attacker_) {
      throw FcmError(FcmErrorKind::InvalidModel,
                     "InvalidModel: attacker " + concepts_[attacker_] + " has an incoming edge");
    }
  }

  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{attacker_};
  seen[attacker_] = true;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& e : edges_) {
      if (e.from == u && !seen[e.to]) {
        seen[e.to] = true;
        queue.push_back(e.to);
      }
    }
  }
  if (!seen[target_]) {
    throw FcmError(FcmErrorKind::UnreachableTarget, "UnreachableTarget: " + concepts_[target_] +
                                                        " is not reachable from " +
                                                        concepts_[attacker_]);
  }
}

std::optional<std::size_t> FcmModel::index_of(std::string_view id) const {
  const auto it = std::find(concepts_.begin(), concepts_.end(), id);
  if (it == concepts_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - concepts_.begin());
}

bool FcmModel::has_cycle() const {
  // Kahn's algorithm: a cycle leaves nodes with positive in-degree.
  std::vector<std::size_t> indegree(size(), 0);
  for (const auto& e : edges_) ++indegree[e.to];
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < size(); ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const auto u = ready.front();
    ready.pop_front();
    ++removed;
    for (const auto& e : edges_) {
      if (e.from == u && --indegree[e.to] == 0) ready.push_back(e.to);
    }
  }
  return removed != size();
}

FcmModel build_fcm(std::string_view attacker_id, std::string_view target_id,
                   std::span<const AttackEdge> edges, std::span<const AssetAggregate> aggregates) {
  std::vector<std::string> concepts{std::string(attacker_id)};
  for (const auto& agg : aggregates) concepts.push_back(agg.asset_id);

  auto index = [&](std::string_view id) -> std::optional<std::size_t> {
    const auto it = std::find(concepts.begin(), concepts.end(), id);
    if (it == concepts.end()) return std::nullopt;
    return static_cast<std::size_t>(it - concepts.begin());
  };

  std::vector<FcmEdge> fcm_edges;
  fcm_edges.reserve(edges.size());
  for (const auto& e : edges) {
    const auto from = index(e.from);
    if (!from) {
      throw FcmError(FcmErrorKind::UnknownConcept,
                     "UnknownConcept: edge " + e.from + " -> " + e.to + " starts at '" + e.from +
                         "', which is neither the attacker nor a vulnerable asset");
    }
    const auto to = index(e.to);
    if (!to || *to == 0) {
      throw FcmError(FcmErrorKind::MissingAggregate, "MissingAggregate: edge " + e.from + " -> " +
                                                         e.to + " targets '" + e.to +
                                                         "', which has no aggregated score");
    }
    fcm_edges.push_back(FcmEdge{*from, *to, aggregates[*to - 1].value.value()});
  }

  const auto target = index(target_id);
  if (!target || *target == 0) {
    throw FcmError(FcmErrorKind::MissingAggregate,
                   "MissingAggregate: target '" + std::string(target_id) + "' has no aggregated score");
  }
  return FcmModel(std::move(concepts), std::move(fcm_edges), 0, *target);
}

double sigmoid(double x, double lambda) { return 1.0 / (1.0 + std::exp(-lambda * x)); }

ActivationState step(const ActivationState& state, const FcmModel& model, const FcmConfig& config) {
  if (state.size() != model.size()) {
    throw FcmError(FcmErrorKind::InvalidModel, "InvalidModel: state dimension " +
                                                   std::to_string(state.size()) + " != " +
                                                   std::to_string(model.size()) + " concepts");
  }
  std::vector<double> input(model.size(), 0.0);
  for (const auto& e : model.edges()) input[e.to] += e.weight * state[e.from];

  ActivationState next(model.size());
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = sigmoid(input[i], config.lambda);
  return next;
}

IterationTrace run_to_equilibrium(const FcmModel& model, const FcmConfig& config) {
  config.validate();
  IterationTrace trace;
  trace.states.emplace_back(model.size(), config.initial_activation);
  for (int it = 0; it < config.max_iterations; ++it) {
    auto next = step(trace.states.back(), model, config);
    double delta = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      delta = std::max(delta, std::fabs(next[i] - trace.states.back()[i]));
    }
    trace.states.push_back(std::move(next));
    if (delta < config.epsilon) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

std::vector<ActivationState> run_rows(const FcmModel& model, const FcmConfig& config,
                                      std::size_t rows) {
  config.validate();
  std::vector<ActivationState> out;
  if (rows == 0) return out;
  out.emplace_back(model.size(), config.initial_activation);
  while (out.size() < rows) out.push_back(step(out.back(), model, config));
  return out;
}

double rescale(double value, Scale scale) {
  switch (scale) {
    case Scale::Unit: return round_half_up(value, 2);
    case Scale::Ten: return round_half_up(10.0 * value, 2);
    case Scale::Cvss39: return round_half_up(3.9 * value, 2);
  }
  return value;
}

}  // namespace dvca
