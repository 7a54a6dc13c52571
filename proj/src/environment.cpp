#include "dvca/environment.hpp"

#include <cctype>

namespace dvca {

std::string_view to_string(Exposure e) { return e == Exposure::Remote ? "remote" : "internal"; }
std::string_view to_string(Relation r) { return r == Relation::And ? "and" : "or"; }

bool is_valid_cve_id(std::string_view text) {
  constexpr std::string_view prefix = "CVE-";
  if (text.substr(0, prefix.size()) != prefix) return false;
  text.remove_prefix(prefix.size());
  const auto dash = text.find('-');
  if (dash != 4) return false;
  const auto year = text.substr(0, 4);
  const auto seq = text.substr(5);
  auto all_digits = [](std::string_view s) {
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  return all_digits(year) && seq.size() >= 4 && all_digits(seq);
}

AttackVector apply_rule1(AttackVector av, Exposure exposure) {
  if (av == AttackVector::Network && exposure == Exposure::Internal) return AttackVector::Adjacent;
  return av;
}

AttackComplexity apply_rule2(AttackComplexity ac, bool is_protected) {
  if (ac == AttackComplexity::Low && is_protected) return AttackComplexity::High;
  return ac;
}

Environment::Environment(std::span<const Asset> assets,
                         std::span<const SecurityMechanism> mechanisms) {
  for (const auto& a : assets) assets_.emplace(a.id, a);
  for (const auto& m : mechanisms) {
    for (const auto& id : m.protects) protected_.insert(id);
  }
}

const Asset* Environment::find(std::string_view asset_id) const {
  const auto it = assets_.find(std::string(asset_id));
  return it == assets_.end() ? nullptr : &it->second;
}

bool Environment::is_protected(std::string_view asset_id) const {
  return protected_.contains(std::string(asset_id));
}

ExploitabilityVector modify_vector(const ExploitabilityVector& base, std::string_view asset_id,
                                   const Environment& env) {
  const Asset* asset = env.find(asset_id);
  if (asset == nullptr) throw UnknownAssetError(std::string(asset_id));
  return ExploitabilityVector{apply_rule1(base.av, asset->exposure),
                              apply_rule2(base.ac, env.is_protected(asset_id)), base.pr, base.ui};
}

ExploitabilityVector modify_vector(const Vulnerability& vuln, const Environment& env) {
  if (!vuln.vector) {
    throw std::invalid_argument("vulnerability " + vuln.id + " (" + vuln.cve_id +
                                ") has no resolved vector");
  }
  return modify_vector(*vuln.vector, vuln.asset_id, env);
}

}  // namespace dvca
