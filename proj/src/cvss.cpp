#include "dvca/cvss.hpp"

#include <optional>
#include <vector>

#include "dvca/rounding.hpp"

namespace dvca {

namespace {

enum class Slot { AV, AC, PR, UI };

std::optional<Slot> slot_for(std::string_view name) {
  if (name.size() == 3 && name.front() == 'M') name.remove_prefix(1);
  if (name == "AV") return Slot::AV;
  if (name == "AC") return Slot::AC;
  if (name == "PR") return Slot::PR;
  if (name == "UI") return Slot::UI;
  return std::nullopt;
}

std::string_view slot_name(Slot s) {
  switch (s) {
    case Slot::AV: return "AV";
    case Slot::AC: return "AC";
    case Slot::PR: return "PR";
    case Slot::UI: return "UI";
  }
  return "?";
}

[[noreturn]] void fail(CvssErrorKind kind, std::string_view metric, const std::string& detail) {
  throw CvssError(kind, std::string(metric), std::string(to_string(kind)) + ": " + detail);
}

// Encodes the parsed letter as the enum's underlying value.
int decode(Slot slot, std::string_view name, std::string_view value) {
  if (value.size() == 1) {
    const char c = value.front();
    switch (slot) {
      case Slot::AV:
        if (c == 'N') return 0;
        if (c == 'A') return 1;
        if (c == 'L') return 2;
        if (c == 'P') return 3;
        break;
      case Slot::AC:
        if (c == 'L') return 0;
        if (c == 'H') return 1;
        break;
      case Slot::PR:
        if (c == 'N') return 0;
        if (c == 'L') return 1;
        if (c == 'H') return 2;
        break;
      case Slot::UI:
        if (c == 'N') return 0;
        if (c == 'R') return 1;
        break;
    }
  }
  fail(CvssErrorKind::UnknownValue, name,
       "unknown value '" + std::string(value) + "' for metric " + std::string(name));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace

ExploitabilityScore ExploitabilityScore::from_tenths(int tenths) {
  if (tenths < kMinTenths || tenths > kMaxTenths) {
    throw std::out_of_range("exploitability score out of [0.1, 3.9]: " + std::to_string(tenths) +
                            " tenths");
  }
  return ExploitabilityScore(tenths);
}

VulnerabilityScore VulnerabilityScore::from_hundredths(int hundredths) {
  if (hundredths < 1 || hundredths > 100) {
    throw std::out_of_range("vulnerability score out of (0, 1]: " + std::to_string(hundredths) +
                            " hundredths");
  }
  return VulnerabilityScore(hundredths);
}

VulnerabilityScore VulnerabilityScore::from_value(double value) {
  return from_hundredths(static_cast<int>(round_half_up_units(value, 2)));
}

std::string_view to_string(CvssErrorKind kind) {
  switch (kind) {
    case CvssErrorKind::MissingMetric: return "MissingMetric";
    case CvssErrorKind::UnknownValue: return "UnknownValue";
    case CvssErrorKind::DuplicateMetric: return "DuplicateMetric";
    case CvssErrorKind::MalformedToken: return "MalformedToken";
  }
  return "CvssError";
}

ExploitabilityVector parse_vector(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\n' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) fail(CvssErrorKind::MalformedToken, "", "empty vector string");

  std::array<std::optional<int>, 4> slots;
  bool first = true;
  for (const auto token : split(text, '/')) {
    const auto colon = token.find(':');
    if (token.empty() || colon == std::string_view::npos || colon == 0 ||
        colon + 1 == token.size() || token.find(':', colon + 1) != std::string_view::npos) {
      fail(CvssErrorKind::MalformedToken, token, "malformed token '" + std::string(token) + "'");
    }
    const auto name = token.substr(0, colon);
    const auto value = token.substr(colon + 1);

    if (name == "CVSS") {
      if (!first) fail(CvssErrorKind::MalformedToken, token, "version prefix must come first");
      if (value != "3.1") {
        fail(CvssErrorKind::UnknownValue, "CVSS",
             "unsupported CVSS version '" + std::string(value) + "'");
      }
      first = false;
      continue;
    }
    first = false;

    const auto slot = slot_for(name);
    if (!slot) continue;  // S, C, I, A, temporal, CR/IR/AR, ...
    const int code = decode(*slot, name, value);
    auto& cell = slots[static_cast<std::size_t>(*slot)];
    if (cell && *cell != code) {
      fail(CvssErrorKind::DuplicateMetric, slot_name(*slot),
           "conflicting values for metric " + std::string(slot_name(*slot)));
    }
    cell = code;
  }

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      const auto name = slot_name(static_cast<Slot>(i));
      fail(CvssErrorKind::MissingMetric, name, "missing metric " + std::string(name));
    }
  }
  return ExploitabilityVector{static_cast<AttackVector>(*slots[0]),
                              static_cast<AttackComplexity>(*slots[1]),
                              static_cast<PrivilegesRequired>(*slots[2]),
                              static_cast<UserInteraction>(*slots[3])};
}

char metric_letter(AttackVector v) { return "NALP"[static_cast<int>(v)]; }
char metric_letter(AttackComplexity v) { return "LH"[static_cast<int>(v)]; }
char metric_letter(PrivilegesRequired v) { return "NLH"[static_cast<int>(v)]; }
char metric_letter(UserInteraction v) { return "NR"[static_cast<int>(v)]; }

std::string render(const ExploitabilityVector& v, bool modified) {
  const std::string m = modified ? "M" : "";
  std::string out;
  out += m + "AV:" + metric_letter(v.av);
  out += "/" + m + "AC:" + metric_letter(v.ac);
  out += "/" + m + "PR:" + metric_letter(v.pr);
  out += "/" + m + "UI:" + metric_letter(v.ui);
  return out;
}

double exploitability_raw(const ExploitabilityVector& v) {
  return 8.22 * weight(v.av) * weight(v.ac) * weight(v.pr) * weight(v.ui);
}

ExploitabilityScore exploitability_score(const ExploitabilityVector& v) {
  // 822 * four hundredths-weights is the score in units of 1e-10; exact in int64.
  const std::int64_t units = std::int64_t{822} * weight_hundredths(v.av) * weight_hundredths(v.ac) *
                             weight_hundredths(v.pr) * weight_hundredths(v.ui);
  const std::int64_t tenths = (units + 500'000'000) / 1'000'000'000;
  return ExploitabilityScore::from_tenths(static_cast<int>(tenths));
}

VulnerabilityScore normalize(ExploitabilityScore score) {
  // floor(100 * t / 39 + 1/2) hundredths
  const int hundredths = (200 * score.tenths() + 39) / 78;
  return VulnerabilityScore::from_hundredths(hundredths);
}

}  // namespace dvca
