#include "dvca/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dvca {

using nlohmann::json;

namespace {

std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

// Left-aligned text columns separated by two spaces.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::ostringstream out;
    for (const auto& r : rows_) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        line += r[i];
        if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
      }
      out << line << "\n";
    }
    return out.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

AggregateRelation relation_from_string(const std::string& s) {
  if (s == "and") return AggregateRelation::And;
  if (s == "or") return AggregateRelation::Or;
  if (s == "single") return AggregateRelation::Single;
  throw std::invalid_argument("unknown relation '" + s + "'");
}

json config_json(const FcmConfig& c) {
  return {{"lambda", c.lambda},
          {"epsilon", c.epsilon},
          {"max_iterations", c.max_iterations},
          {"initial_activation", c.initial_activation}};
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  return out.str();
}

std::string render_trace_table(const std::vector<std::string>& concepts,
                               const std::vector<ActivationState>& states) {
  std::vector<std::string> header{"Iteration"};
  header.insert(header.end(), concepts.begin(), concepts.end());
  TextTable table(std::move(header));
  for (std::size_t r = 0; r < states.size(); ++r) {
    std::vector<std::string> row{std::to_string(r + 1)};
    for (const double a : states[r]) row.push_back(format_fixed(a, 4));
    table.add(std::move(row));
  }
  return table.str();
}

std::string render_trace_csv(const std::vector<std::string>& concepts,
                             const std::vector<ActivationState>& states) {
  std::ostringstream out;
  out << "iteration";
  for (const auto& c : concepts) out << "," << c;
  out << "\n";
  for (std::size_t r = 0; r < states.size(); ++r) {
    out << r + 1;
    for (const double a : states[r]) out << "," << shortest(a);
    out << "\n";
  }
  return out.str();
}

std::string render_report_table(const AssessmentReport& report, bool with_trace) {
  std::ostringstream out;
  out << "Scenario: " << report.scenario_name << "\n";
  out << "Attacker: " << report.attacker_id << "   Target: " << report.target_id << "\n\n";

  out << "Exploitability (original -> modified -> vulnerability score)\n";
  TextTable cves({"Vuln", "Asset", "CVE", "CVSS", "Original", "E", "Modified", "ME", "Score"});
  for (const auto& r : report.per_cve) {
    cves.add({r.vuln_id, r.asset_id, r.cve_id, r.cvss_score ? format_fixed(*r.cvss_score, 1) : "-",
              render(r.original), format_fixed(r.original_score.value(), 1),
              render(r.modified, true), format_fixed(r.modified_score.value(), 1),
              format_fixed(r.vulnerability_score.value(), 2)});
  }
  out << cves.str() << "\n";

  out << "Per-asset aggregation\n";
  TextTable assets({"Asset", "CVEs", "Relation", "Inputs", "Score"});
  for (const auto& a : report.per_asset) {
    std::string inputs;
    for (const auto& s : a.inputs) {
      if (!inputs.empty()) inputs += ", ";
      inputs += format_fixed(s.value(), 2);
    }
    assets.add({a.asset_id, std::to_string(a.inputs.size()), std::string(to_string(a.relation)),
                inputs, format_fixed(a.value.value(), 2)});
  }
  out << assets.str() << "\n";

  if (with_trace) {
    out << "FCM iterations\n" << render_trace_table(report.concepts, report.trace.states) << "\n";
  }

  if (report.converged()) {
    out << "Equilibrium reached at iteration " << report.trace.equilibrium_row() << " ("
        << report.iterations_used() << " updates, epsilon " << report.config.epsilon << ")\n";
  } else {
    out << "NOT CONVERGED after " << report.iterations_used()
        << " updates; value below is the last state\n";
  }
  out << "Target " << report.target_id << ": " << format_fixed(report.target_value.unit, 4)
      << " (0-1)  " << format_fixed(report.target_value.ten, 2) << " (0-10)  "
      << format_fixed(report.target_value.cvss39, 2) << " (0-3.9)\n";
  return out.str();
}

std::string render_report_json(const AssessmentReport& report) {
  json doc;
  doc["scenario"] = report.scenario_name;
  doc["attacker"] = report.attacker_id;
  doc["target"] = report.target_id;
  doc["config"] = config_json(report.config);
  doc["per_cve"] = json::array();
  for (const auto& r : report.per_cve) {
    json j = {{"id", r.vuln_id},
              {"cve", r.cve_id},
              {"asset", r.asset_id},
              {"original_vector", render(r.original)},
              {"original_score", r.original_score.value()},
              {"modified_vector", render(r.modified, true)},
              {"modified_score", r.modified_score.value()},
              {"vulnerability_score", r.vulnerability_score.value()}};
    j["cvss_score"] = r.cvss_score ? json(*r.cvss_score) : json();
    doc["per_cve"].push_back(std::move(j));
  }
  doc["per_asset"] = json::array();
  for (const auto& a : report.per_asset) {
    json inputs = json::array();
    for (const auto& s : a.inputs) inputs.push_back(s.value());
    doc["per_asset"].push_back({{"asset", a.asset_id},
                                {"relation", std::string(to_string(a.relation))},
                                {"inputs", inputs},
                                {"value", a.value.value()}});
  }
  doc["trace"] = {{"concepts", report.concepts},
                  {"states", report.trace.states},
                  {"converged", report.trace.converged}};
  doc["target_value"] = {{"unit", report.target_value.unit},
                         {"ten", report.target_value.ten},
                         {"cvss39", report.target_value.cvss39}};
  doc["target_activation"] = report.target_activation();
  doc["converged"] = report.converged();
  doc["iterations_used"] = report.iterations_used();
  doc["equilibrium_row"] = report.trace.equilibrium_row();
  return doc.dump(2) + "\n";
}

AssessmentReport report_from_json(std::string_view text) {
  const json doc = json::parse(text);
  AssessmentReport r;
  r.scenario_name = doc.at("scenario").get<std::string>();
  r.attacker_id = doc.at("attacker").get<std::string>();
  r.target_id = doc.at("target").get<std::string>();
  const auto& c = doc.at("config");
  r.config.lambda = c.at("lambda").get<double>();
  r.config.epsilon = c.at("epsilon").get<double>();
  r.config.max_iterations = c.at("max_iterations").get<int>();
  r.config.initial_activation = c.at("initial_activation").get<double>();
  for (const auto& j : doc.at("per_cve")) {
    CveAssessment row;
    row.vuln_id = j.at("id").get<std::string>();
    row.cve_id = j.at("cve").get<std::string>();
    row.asset_id = j.at("asset").get<std::string>();
    if (!j.at("cvss_score").is_null()) row.cvss_score = j["cvss_score"].get<double>();
    row.original = parse_vector(j.at("original_vector").get<std::string>());
    row.modified = parse_vector(j.at("modified_vector").get<std::string>());
    row.original_score = ExploitabilityScore::from_tenths(
        static_cast<int>(std::lround(j.at("original_score").get<double>() * 10)));
    row.modified_score = ExploitabilityScore::from_tenths(
        static_cast<int>(std::lround(j.at("modified_score").get<double>() * 10)));
    row.vulnerability_score = VulnerabilityScore::from_value(j.at("vulnerability_score").get<double>());
    r.per_cve.push_back(std::move(row));
  }
  for (const auto& j : doc.at("per_asset")) {
    AssetAggregate a;
    a.asset_id = j.at("asset").get<std::string>();
    a.relation = relation_from_string(j.at("relation").get<std::string>());
    for (const auto& s : j.at("inputs")) a.inputs.push_back(VulnerabilityScore::from_value(s.get<double>()));
    a.value = VulnerabilityScore::from_value(j.at("value").get<double>());
    r.per_asset.push_back(std::move(a));
  }
  const auto& t = doc.at("trace");
  r.concepts = t.at("concepts").get<std::vector<std::string>>();
  r.trace.states = t.at("states").get<std::vector<ActivationState>>();
  r.trace.converged = t.at("converged").get<bool>();
  const auto& tv = doc.at("target_value");
  r.target_value = TargetValue{tv.at("unit").get<double>(), tv.at("ten").get<double>(),
                               tv.at("cvss39").get<double>()};
  return r;
}

std::string render_comparison_table(const ComparisonReport& report) {
  std::ostringstream out;
  out << "Target: " << report.target_id << "\n";
  TextTable table({"Scenario", "Result", "Reduction", "Reduction (%)"});
  table.add({report.baseline_name + " (baseline)", format_fixed(report.baseline_value, 4), "-", "-"});
  for (const auto& v : report.variants) {
    table.add({v.name, format_fixed(v.value, 4), format_fixed(v.absolute_reduction, 4),
               format_fixed(v.percent_reduction, 2)});
  }
  out << table.str();
  return out.str();
}

std::string render_comparison_json(const ComparisonReport& report) {
  json doc;
  doc["target"] = report.target_id;
  doc["baseline"] = {{"name", report.baseline_name}, {"value", report.baseline_value}};
  doc["variants"] = json::array();
  for (const auto& v : report.variants) {
    doc["variants"].push_back({{"name", v.name},
                               {"value", v.value},
                               {"absolute_reduction", v.absolute_reduction},
                               {"percent_reduction", v.percent_reduction}});
  }
  return doc.dump(2) + "\n";
}

std::string render_comparison_csv(const ComparisonReport& report) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  out << "scenario,value,absolute_reduction,percent_reduction\n";
  out << quote(report.baseline_name) << "," << format_fixed(report.baseline_value, 4)
      << ",0.0000,0.00\n";
  for (const auto& v : report.variants) {
    out << quote(v.name) << "," << format_fixed(v.value, 4) << ","
        << format_fixed(v.absolute_reduction, 4) << "," << format_fixed(v.percent_reduction, 2)
        << "\n";
  }
  return out.str();
}

ComparisonReport comparison_from_json(std::string_view text) {
  const json doc = json::parse(text);
  ComparisonReport r;
  r.target_id = doc.at("target").get<std::string>();
  r.baseline_name = doc.at("baseline").at("name").get<std::string>();
  r.baseline_value = doc.at("baseline").at("value").get<double>();
  for (const auto& j : doc.at("variants")) {
    r.variants.push_back(ComparisonRow{j.at("name").get<std::string>(), j.at("value").get<double>(),
                                       j.at("absolute_reduction").get<double>(),
                                       j.at("percent_reduction").get<double>()});
  }
  return r;
}

}  // namespace dvca
