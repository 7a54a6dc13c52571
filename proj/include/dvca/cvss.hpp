#pragma once

// CVSS 3.1 exploitability metrics: vector parsing, exploitability scoring and
// normalization to the unit "vulnerability score" scale.
//
// Scores are carried as integer tenths / hundredths so that the rounding
// cascade between stages is exact.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dvca {

enum class AttackVector : std::uint8_t { Network, Adjacent, Local, Physical };
enum class AttackComplexity : std::uint8_t { Low, High };
enum class PrivilegesRequired : std::uint8_t { None, Low, High };
enum class UserInteraction : std::uint8_t { None, Required };

inline constexpr std::array<AttackVector, 4> kAttackVectors = {
    AttackVector::Network, AttackVector::Adjacent, AttackVector::Local, AttackVector::Physical};
inline constexpr std::array<AttackComplexity, 2> kAttackComplexities = {AttackComplexity::Low,
                                                                       AttackComplexity::High};
inline constexpr std::array<PrivilegesRequired, 3> kPrivilegesRequired = {
    PrivilegesRequired::None, PrivilegesRequired::Low, PrivilegesRequired::High};
inline constexpr std::array<UserInteraction, 2> kUserInteractions = {UserInteraction::None,
                                                                    UserInteraction::Required};

// Base (AV/AC/PR/UI) or modified (MAV/MAC/MPR/MUI) exploitability metrics.
// Which of the two a value represents is decided by the stage that produced it.
struct ExploitabilityVector {
  AttackVector av = AttackVector::Network;
  AttackComplexity ac = AttackComplexity::Low;
  PrivilegesRequired pr = PrivilegesRequired::None;
  UserInteraction ui = UserInteraction::None;

  friend bool operator==(const ExploitabilityVector&, const ExploitabilityVector&) = default;
};

// CVSS 3.1 metric weights in hundredths (AV:N = 85 -> 0.85).
constexpr int weight_hundredths(AttackVector v) {
  switch (v) {
    case AttackVector::Network: return 85;
    case AttackVector::Adjacent: return 62;
    case AttackVector::Local: return 55;
    case AttackVector::Physical: return 20;
  }
  return 0;
}
constexpr int weight_hundredths(AttackComplexity v) {
  return v == AttackComplexity::Low ? 77 : 44;
}
constexpr int weight_hundredths(PrivilegesRequired v) {
  switch (v) {
    case PrivilegesRequired::None: return 85;
    case PrivilegesRequired::Low: return 62;
    case PrivilegesRequired::High: return 27;
  }
  return 0;
}
constexpr int weight_hundredths(UserInteraction v) {
  return v == UserInteraction::None ? 85 : 62;
}

template <typename Metric>
constexpr double weight(Metric v) {
  return weight_hundredths(v) / 100.0;
}

// Exploitability score E = 8.22 * AV * AC * PR * UI, one decimal, [0.1, 3.9].
class ExploitabilityScore {
 public:
  static constexpr int kMinTenths = 1;
  static constexpr int kMaxTenths = 39;

  static ExploitabilityScore from_tenths(int tenths);

  int tenths() const noexcept { return tenths_; }
  double value() const noexcept { return tenths_ / 10.0; }

  friend auto operator<=>(const ExploitabilityScore&, const ExploitabilityScore&) = default;

 private:
  explicit ExploitabilityScore(int tenths) : tenths_(tenths) {}
  int tenths_;
};

// Exploitability rescaled to a base of 1, two decimals, in (0, 1].
class VulnerabilityScore {
 public:
  static VulnerabilityScore from_hundredths(int hundredths);
  // Rounds half-up to two decimals; throws if the result leaves (0, 1].
  static VulnerabilityScore from_value(double value);

  int hundredths() const noexcept { return hundredths_; }
  double value() const noexcept { return hundredths_ / 100.0; }

  friend auto operator<=>(const VulnerabilityScore&, const VulnerabilityScore&) = default;

 private:
  explicit VulnerabilityScore(int hundredths) : hundredths_(hundredths) {}
  int hundredths_;
};

enum class CvssErrorKind { MissingMetric, UnknownValue, DuplicateMetric, MalformedToken };

class CvssError : public std::runtime_error {
 public:
  CvssError(CvssErrorKind kind, std::string metric, const std::string& message)
      : std::runtime_error(message), kind_(kind), metric_(std::move(metric)) {}

  CvssErrorKind kind() const noexcept { return kind_; }
  // Metric name involved ("AV", "UI", ...), or the offending token.
  const std::string& metric() const noexcept { return metric_; }

 private:
  CvssErrorKind kind_;
  std::string metric_;
};

std::string_view to_string(CvssErrorKind kind);

// Accepts a full CVSS 3.1 vector (optionally prefixed "CVSS:3.1/") or an
// exploitability-only fragment. MAV/MAC/MPR/MUI fill the same slots as
// AV/AC/PR/UI. Components outside the exploitability subset are ignored.
ExploitabilityVector parse_vector(std::string_view text);

// "AV:N/AC:L/PR:N/UI:N", or "MAV:N/MAC:L/MPR:N/MUI:N" when modified is set.
std::string render(const ExploitabilityVector& v, bool modified = false);

char metric_letter(AttackVector v);
char metric_letter(AttackComplexity v);
char metric_letter(PrivilegesRequired v);
char metric_letter(UserInteraction v);

// Unrounded 8.22 * product of weights.
double exploitability_raw(const ExploitabilityVector& v);

ExploitabilityScore exploitability_score(const ExploitabilityVector& v);

// round_half_up(score / 3.9, 2)
VulnerabilityScore normalize(ExploitabilityScore score);

}  // namespace dvca
