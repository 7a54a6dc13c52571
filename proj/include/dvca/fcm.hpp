#pragma once

// Fuzzy Cognitive Map over the attack path.
//
// Concepts are the attacker plus every vulnerable asset. An edge u -> v carries
// the aggregated vulnerability score of v. Activations evolve under Kosko's
// standard rule (synchronous, no self term) with a sigmoid transfer:
//
//   A'_i = 1 / (1 + exp(-lambda * sum_j w(j -> i) * A_j))

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvca/attack_tree.hpp"

namespace dvca {

struct AttackEdge {
  std::string from;
  std::string to;

  friend bool operator==(const AttackEdge&, const AttackEdge&) = default;
};

struct FcmEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
};

enum class FcmErrorKind { InvalidModel, InvalidConfig, MissingAggregate, UnknownConcept,
                          UnreachableTarget };

class FcmError : public std::runtime_error {
 public:
  FcmError(FcmErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  FcmErrorKind kind() const noexcept { return kind_; }

 private:
  FcmErrorKind kind_;
};

struct FcmConfig {
  double lambda = 1.0;
  double initial_activation = 0.5;
  double epsilon = 1e-4;
  int max_iterations = 100;

  // Throws FcmError(InvalidConfig).
  void validate() const;

  friend bool operator==(const FcmConfig&, const FcmConfig&) = default;
};

using ActivationState = std::vector<double>;

class FcmModel {
 public:
  // Validates endpoints, weight range [0, 1], attacker in-degree 0 and
  // reachability of the target. Cycles are allowed.
  FcmModel(std::vector<std::string> concepts, std::vector<FcmEdge> edges, std::size_t attacker,
           std::size_t target);

  std::size_t size() const noexcept { return concepts_.size(); }
  const std::vector<std::string>& concepts() const noexcept { return concepts_; }
  const std::vector<FcmEdge>& edges() const noexcept { return edges_; }
  std::size_t attacker_index() const noexcept { return attacker_; }
  std::size_t target_index() const noexcept { return target_; }
  const std::string& attacker_id() const { return concepts_[attacker_]; }
  const std::string& target_id() const { return concepts_[target_]; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool has_cycle() const;

 private:
  std::vector<std::string> concepts_;
  std::vector<FcmEdge> edges_;
  std::size_t attacker_;
  std::size_t target_;
};

struct IterationTrace {
  // states[0] is the initial state (row 1 in the printed trace).
  std::vector<ActivationState> states;
  bool converged = false;

  const ActivationState& equilibrium_state() const { return states.back(); }
  // Number of update steps applied.
  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
  // 1-based row of the first state whose successor moved less than epsilon;
  // 0 when not converged.
  std::size_t equilibrium_row() const { return converged ? states.size() - 1 : 0; }
};

// One concept per aggregate (declaration order) after the attacker; every edge
// into v receives v's aggregate.
FcmModel build_fcm(std::string_view attacker_id, std::string_view target_id,
                   std::span<const AttackEdge> edges, std::span<const AssetAggregate> aggregates);

double sigmoid(double x, double lambda);

ActivationState step(const ActivationState& state, const FcmModel& model, const FcmConfig& config);

IterationTrace run_to_equilibrium(const FcmModel& model, const FcmConfig& config);

// Exactly `rows` states (the initial one included), with no convergence stop.
std::vector<ActivationState> run_rows(const FcmModel& model, const FcmConfig& config,
                                      std::size_t rows);

enum class Scale { Unit, Ten, Cvss39 };

// Linear map of a unit value onto the chosen range, two decimals.
double rescale(double value, Scale scale);

}  // namespace dvca
