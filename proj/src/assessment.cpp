#include "dvca/assessment.hpp"

#include <algorithm>
#include <cmath>

#include "dvca/rounding.hpp"

namespace dvca {

double AssessmentReport::target_activation() const {
  const auto it = std::find(concepts.begin(), concepts.end(), target_id);
  if (it == concepts.end() || trace.states.empty()) return 0.0;
  return trace.equilibrium_state()[static_cast<std::size_t>(it - concepts.begin())];
}

bool operator==(const AssessmentReport& a, const AssessmentReport& b) {
  auto same_aggregates = [](const std::vector<AssetAggregate>& x,
                            const std::vector<AssetAggregate>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].asset_id != y[i].asset_id || x[i].relation != y[i].relation ||
          x[i].inputs != y[i].inputs || x[i].value != y[i].value) {
        return false;
      }
    }
    return true;
  };
  return a.scenario_name == b.scenario_name && a.attacker_id == b.attacker_id &&
         a.target_id == b.target_id && a.config == b.config && a.per_cve == b.per_cve &&
         same_aggregates(a.per_asset, b.per_asset) && a.concepts == b.concepts &&
         a.trace.states == b.trace.states && a.trace.converged == b.trace.converged &&
         a.target_value == b.target_value;
}

VectorLookup vectors_from_records(std::span<const CveRecord> records) {
  VectorLookup out;
  for (const auto& r : records) out[r.cve_id] = parse_vector(r.vector_string);
  return out;
}

AssessmentReport assess(const ScenarioModel& model, const VectorLookup& resolved) {
  AssessmentReport report;
  report.scenario_name = model.name;
  report.attacker_id = model.attacker_id;
  report.target_id = model.target_id;
  report.config = model.fcm;

  const Environment env(model.assets, model.mechanisms);

  for (const auto& v : model.vulnerabilities) {
    CveAssessment row;
    row.vuln_id = v.id;
    row.cve_id = v.cve_id;
    row.asset_id = v.asset_id;
    row.cvss_score = v.base_cvss_score;
    if (v.vector) {
      row.original = *v.vector;
    } else if (const auto it = resolved.find(v.cve_id); it != resolved.end()) {
      row.original = it->second;
    } else {
      throw AssessmentError("resolve", "no CVSS vector for " + v.id + " (" + v.cve_id + ")");
    }
    try {
      row.modified = modify_vector(row.original, v.asset_id, env);
    } catch (const std::exception& e) {
      throw AssessmentError("modify", e.what());
    }
    row.original_score = exploitability_score(row.original);
    row.modified_score = exploitability_score(row.modified);
    row.vulnerability_score = normalize(row.modified_score);
    report.per_cve.push_back(std::move(row));
  }

  try {
    for (const auto& asset : model.assets) {
      std::vector<VulnerabilityScore> inputs;
      for (const auto& row : report.per_cve) {
        if (row.asset_id == asset.id) inputs.push_back(row.vulnerability_score);
      }
      if (inputs.empty()) continue;
      report.per_asset.push_back(aggregate_asset(asset.id, asset.relation, std::move(inputs)));
    }
  } catch (const AttackTreeError& e) {
    throw AssessmentError("aggregate", e.what());
  }

  try {
    const auto fcm = build_fcm(model.attacker_id, model.target_id, model.attack_edges,
                               report.per_asset);
    report.concepts = fcm.concepts();
    report.trace = run_to_equilibrium(fcm, model.fcm);
  } catch (const FcmError& e) {
    throw AssessmentError("fcm", e.what());
  }

  const double unit = round_half_up(report.target_activation(), 4);
  report.target_value = TargetValue{unit, rescale(unit, Scale::Ten), rescale(unit, Scale::Cvss39)};
  return report;
}

ComparisonReport compare(const AssessmentReport& baseline,
                         std::span<const AssessmentReport> variants) {
  ComparisonReport out;
  out.target_id = baseline.target_id;
  out.baseline_name = baseline.scenario_name;
  out.baseline_value = baseline.target_value.unit;
  for (const auto& v : variants) {
    if (v.target_id != baseline.target_id) {
      throw std::invalid_argument("cannot compare target '" + v.target_id + "' of '" +
                                  v.scenario_name + "' with baseline target '" +
                                  baseline.target_id + "'");
    }
    ComparisonRow row;
    row.name = v.scenario_name;
    row.value = v.target_value.unit;
    const double diff = out.baseline_value - row.value;
    row.absolute_reduction = round_half_up(diff, 4);
    row.percent_reduction =
        out.baseline_value == 0.0 ? 0.0 : round_half_up(100.0 * diff / out.baseline_value, 2);
    if (row.percent_reduction == 0.0) row.percent_reduction = 0.0;  // no "-0.00"
    out.variants.push_back(std::move(row));
  }
  return out;
}

}  // namespace dvca
