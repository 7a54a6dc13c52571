#pragma once

// Environment model (assets, exposure, security mechanisms) and the two
// adjustment rules that derive modified exploitability metrics from it:
//   RULE#1  (AV, exposure)   -> MAV
//   RULE#2  (AC, protected)  -> MAC
// PR and UI pass through unchanged.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dvca/cvss.hpp"

namespace dvca {

// Remote: exploitable from remote networks. Internal: only from the same
// logical network.
enum class Exposure { Remote, Internal };

// Interdependency of the vulnerabilities co-located on one asset.
enum class Relation { And, Or };

std::string_view to_string(Exposure e);
std::string_view to_string(Relation r);

struct Asset {
  std::string id;
  std::string name;
  std::string layer;
  Exposure exposure = Exposure::Remote;
  std::optional<Relation> relation;  // present iff the asset has >= 2 vulnerabilities

  friend bool operator==(const Asset&, const Asset&) = default;
};

struct SecurityMechanism {
  std::string id;
  std::string kind;
  std::vector<std::string> protects;

  friend bool operator==(const SecurityMechanism&, const SecurityMechanism&) = default;
};

struct Vulnerability {
  std::string id;
  std::string cve_id;
  std::string asset_id;
  std::optional<ExploitabilityVector> vector;  // absent: resolve through NVD
  std::optional<double> base_cvss_score;       // informational only

  friend bool operator==(const Vulnerability&, const Vulnerability&) = default;
};

// CVE-<4 digits>-<4 or more digits>
bool is_valid_cve_id(std::string_view text);

AttackVector apply_rule1(AttackVector av, Exposure exposure);
AttackComplexity apply_rule2(AttackComplexity ac, bool is_protected);

class UnknownAssetError : public std::runtime_error {
 public:
  explicit UnknownAssetError(std::string asset_id)
      : std::runtime_error("UnknownAsset: no asset with id '" + asset_id + "'"),
        asset_id_(std::move(asset_id)) {}
  const std::string& asset_id() const noexcept { return asset_id_; }

 private:
  std::string asset_id_;
};

// Lookup view over assets and mechanisms. Holds copies; cheap for the sizes
// involved and keeps the view independent of the caller's storage.
class Environment {
 public:
  Environment(std::span<const Asset> assets, std::span<const SecurityMechanism> mechanisms);

  const Asset* find(std::string_view asset_id) const;
  // True when any mechanism lists the asset. Stacked mechanisms do not compound.
  bool is_protected(std::string_view asset_id) const;

 private:
  std::unordered_map<std::string, Asset> assets_;
  std::unordered_set<std::string> protected_;
};

ExploitabilityVector modify_vector(const ExploitabilityVector& base, std::string_view asset_id,
                                   const Environment& env);

// Throws std::invalid_argument if the vulnerability's vector is unresolved.
ExploitabilityVector modify_vector(const Vulnerability& vuln, const Environment& env);

}  // namespace dvca
