#include "dvca/scenario.hpp"

#include <cerrno>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

namespace dvca {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ScenarioError(ScenarioErrorKind::SchemaError, path, "SchemaError at " + path + ": " + what);
}

[[noreturn]] void invalid(const std::string& id, const std::string& what) {
  throw ScenarioError(ScenarioErrorKind::ValidationError, id, "ValidationError: " + what);
}

std::string type_name(const json& j) { return j.type_name(); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> required,
                std::initializer_list<std::string_view> optional) {
  if (!obj.is_object()) schema_error(path, "expected object, got " + type_name(obj));
  for (const auto& key : required) {
    if (!obj.contains(std::string(key))) schema_error(path + "." + std::string(key), "missing field");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const auto& k : required) known = known || k == key;
    for (const auto& k : optional) known = known || k == key;
    if (!known) schema_error(path + "." + key, "unknown field");
  }
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) schema_error(path + "." + key, "expected string, got " + type_name(v));
  return v.get<std::string>();
}

const json& get_array(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_array()) schema_error(path + "." + key, "expected array, got " + type_name(v));
  return v;
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) schema_error(path + "." + key, "expected number, got " + type_name(v));
  return v.get<double>();
}

Asset parse_asset(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "layer", "exposure"}, {"name", "relation"});
  Asset a;
  a.id = get_string(j, "id", path);
  a.name = j.contains("name") ? get_string(j, "name", path) : a.id;
  a.layer = get_string(j, "layer", path);
  const auto exposure = get_string(j, "exposure", path);
  if (exposure == "remote") {
    a.exposure = Exposure::Remote;
  } else if (exposure == "internal") {
    a.exposure = Exposure::Internal;
  } else {
    schema_error(path + ".exposure", "expected \"remote\" or \"internal\", got \"" + exposure + "\"");
  }
  if (j.contains("relation")) {
    const auto rel = get_string(j, "relation", path);
    if (rel == "and") {
      a.relation = Relation::And;
    } else if (rel == "or") {
      a.relation = Relation::Or;
    } else {
      schema_error(path + ".relation", "expected \"and\" or \"or\", got \"" + rel + "\"");
    }
  }
  return a;
}

SecurityMechanism parse_mechanism(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "kind", "protects"}, {});
  SecurityMechanism m;
  m.id = get_string(j, "id", path);
  m.kind = get_string(j, "kind", path);
  const auto& protects = get_array(j, "protects", path);
  for (std::size_t i = 0; i < protects.size(); ++i) {
    if (!protects[i].is_string()) {
      schema_error(path + ".protects[" + std::to_string(i) + "]", "expected string");
    }
    m.protects.push_back(protects[i].get<std::string>());
  }
  return m;
}

Vulnerability parse_vulnerability(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "cve", "asset"}, {"vector", "cvss_score"});
  Vulnerability v;
  v.id = get_string(j, "id", path);
  v.cve_id = get_string(j, "cve", path);
  v.asset_id = get_string(j, "asset", path);
  if (j.contains("vector") && !j["vector"].is_null()) {
    const auto text = get_string(j, "vector", path);
    try {
      v.vector = parse_vector(text);
    } catch (const CvssError& e) {
      schema_error(path + ".vector", e.what());
    }
  }
  if (j.contains("cvss_score")) v.base_cvss_score = get_number(j, "cvss_score", path);
  return v;
}

FcmConfig parse_fcm(const json& j, const std::string& path) {
  check_keys(j, path, {}, {"lambda", "epsilon", "max_iterations", "initial_activation"});
  FcmConfig c;
  if (j.contains("lambda")) c.lambda = get_number(j, "lambda", path);
  if (j.contains("epsilon")) c.epsilon = get_number(j, "epsilon", path);
  if (j.contains("initial_activation")) {
    c.initial_activation = get_number(j, "initial_activation", path);
  }
  if (j.contains("max_iterations")) {
    const auto& v = j["max_iterations"];
    if (!v.is_number_integer()) schema_error(path + ".max_iterations", "expected integer");
    c.max_iterations = v.get<int>();
  }
  return c;
}

}  // namespace

std::string_view to_string(ScenarioErrorKind kind) {
  switch (kind) {
    case ScenarioErrorKind::ParseError: return "ParseError";
    case ScenarioErrorKind::SchemaError: return "SchemaError";
    case ScenarioErrorKind::ValidationError: return "ValidationError";
  }
  return "ScenarioError";
}

std::vector<std::string> validate_scenario(const ScenarioModel& model) {
  std::vector<std::string> warnings;

  if (model.attacker_id.empty()) invalid("attacker", "attacker id is empty");
  std::map<std::string, const Asset*> assets;
  for (const auto& a : model.assets) {
    if (a.id.empty()) invalid("", "asset with empty id");
    if (a.id == model.attacker_id) {
      invalid(a.id, "asset id '" + a.id + "' collides with the attacker id");
    }
    if (!assets.emplace(a.id, &a).second) invalid(a.id, "duplicate asset id '" + a.id + "'");
  }

  std::set<std::string> mechanism_ids;
  for (const auto& m : model.mechanisms) {
    if (!mechanism_ids.insert(m.id).second) invalid(m.id, "duplicate mechanism id '" + m.id + "'");
    if (m.protects.empty()) invalid(m.id, "mechanism '" + m.id + "' protects no asset");
    for (const auto& id : m.protects) {
      if (!assets.contains(id)) {
        invalid(id, "mechanism '" + m.id + "' protects unknown asset '" + id + "'");
      }
    }
  }

  std::set<std::string> vuln_ids;
  std::map<std::string, int> vuln_count;
  for (const auto& v : model.vulnerabilities) {
    if (!vuln_ids.insert(v.id).second) invalid(v.id, "duplicate vulnerability id '" + v.id + "'");
    if (!is_valid_cve_id(v.cve_id)) {
      invalid(v.cve_id, "vulnerability '" + v.id + "' has malformed CVE id '" + v.cve_id + "'");
    }
    if (!assets.contains(v.asset_id)) {
      invalid(v.asset_id, "vulnerability '" + v.id + "' references unknown asset '" + v.asset_id + "'");
    }
    ++vuln_count[v.asset_id];
  }

  for (const auto& a : model.assets) {
    const int n = vuln_count[a.id];
    if (n >= 2 && !a.relation) {
      invalid(a.id, "asset '" + a.id + "' has " + std::to_string(n) +
                        " vulnerabilities but no relation (and/or)");
    }
    if (n < 2 && a.relation) {
      invalid(a.id, "asset '" + a.id + "' declares a relation but has " + std::to_string(n) +
                        " vulnerabilities");
    }
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (std::size_t i = 0; i < model.attack_edges.size(); ++i) {
    const auto& e = model.attack_edges[i];
    const std::string label = "attack_edges[" + std::to_string(i) + "] " + e.from + " -> " + e.to;
    if (e.to == model.attacker_id) {
      invalid(e.to, label + ": the attacker may only appear as an edge source");
    }
    if (e.from != model.attacker_id) {
      if (!assets.contains(e.from)) invalid(e.from, label + ": unknown asset '" + e.from + "'");
      if (vuln_count[e.from] == 0) {
        invalid(e.from, label + ": source asset '" + e.from + "' has no vulnerabilities");
      }
    }
    if (!assets.contains(e.to)) invalid(e.to, label + ": unknown asset '" + e.to + "'");
    if (vuln_count[e.to] == 0) {
      invalid(e.to, label + ": target asset '" + e.to + "' has no vulnerabilities");
    }
    if (!seen_edges.emplace(e.from, e.to).second) invalid(e.from, label + ": duplicate edge");
    if (e.from == e.to) warnings.push_back(label + ": self-loop");
  }

  if (!assets.contains(model.target_id)) {
    invalid(model.target_id, "target '" + model.target_id + "' is not a declared asset");
  }
  if (vuln_count[model.target_id] == 0) {
    invalid(model.target_id, "target '" + model.target_id + "' has no vulnerabilities");
  }

  std::set<std::string> reached{model.attacker_id};
  std::deque<std::string> queue{model.attacker_id};
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (const auto& e : model.attack_edges) {
      if (e.from == u && reached.insert(e.to).second) queue.push_back(e.to);
    }
  }
  if (!reached.contains(model.target_id)) {
    invalid(model.target_id, "target '" + model.target_id + "' is not reachable from attacker '" +
                                 model.attacker_id + "'");
  }

  // Cycle check over the edge list (DFS colouring).
  std::map<std::string, int> colour;
  bool cyclic = false;
  std::function<void(const std::string&)> visit = [&](const std::string& u) {
    colour[u] = 1;
    for (const auto& e : model.attack_edges) {
      if (e.from != u) continue;
      if (colour[e.to] == 1) cyclic = true;
      if (colour[e.to] == 0) visit(e.to);
    }
    colour[u] = 2;
  };
  for (const auto& e : model.attack_edges) {
    if (colour[e.from] == 0) visit(e.from);
  }
  if (cyclic) warnings.push_back("attack graph contains a cycle");

  try {
    model.fcm.validate();
  } catch (const FcmError& e) {
    invalid("fcm", e.what());
  }
  return warnings;
}

ScenarioModel load_scenario(std::string_view document, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ScenarioError(ScenarioErrorKind::ParseError, "$",
                        std::string("ParseError: ") + e.what());
  }

  const std::string root = "$";
  check_keys(doc, root,
             {"name", "assets", "vulnerabilities", "attack_edges", "attacker", "target"},
             {"mechanisms", "fcm"});
  ScenarioModel model;
  model.name = get_string(doc, "name", root);
  model.attacker_id = get_string(doc, "attacker", root);
  model.target_id = get_string(doc, "target", root);

  const auto& assets = get_array(doc, "assets", root);
  for (std::size_t i = 0; i < assets.size(); ++i) {
    model.assets.push_back(parse_asset(assets[i], "$.assets[" + std::to_string(i) + "]"));
  }
  if (doc.contains("mechanisms")) {
    const auto& mechs = get_array(doc, "mechanisms", root);
    for (std::size_t i = 0; i < mechs.size(); ++i) {
      model.mechanisms.push_back(parse_mechanism(mechs[i], "$.mechanisms[" + std::to_string(i) + "]"));
    }
  }
  const auto& vulns = get_array(doc, "vulnerabilities", root);
  for (std::size_t i = 0; i < vulns.size(); ++i) {
    model.vulnerabilities.push_back(
        parse_vulnerability(vulns[i], "$.vulnerabilities[" + std::to_string(i) + "]"));
  }
  const auto& edges = get_array(doc, "attack_edges", root);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "$.attack_edges[" + std::to_string(i) + "]";
    check_keys(edges[i], path, {"from", "to"}, {});
    model.attack_edges.push_back(
        AttackEdge{get_string(edges[i], "from", path), get_string(edges[i], "to", path)});
  }
  if (doc.contains("fcm")) model.fcm = parse_fcm(doc["fcm"], "$.fcm");

  auto found = validate_scenario(model);
  if (warnings != nullptr) warnings->insert(warnings->end(), found.begin(), found.end());
  return model;
}

ScenarioModel load_scenario_file(const std::filesystem::path& path,
                                 std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), warnings);
}

std::string render_scenario(const ScenarioModel& model) {
  json doc;
  doc["name"] = model.name;
  doc["attacker"] = model.attacker_id;
  doc["target"] = model.target_id;
  doc["assets"] = json::array();
  for (const auto& a : model.assets) {
    json j = {{"id", a.id},
              {"name", a.name},
              {"layer", a.layer},
              {"exposure", std::string(to_string(a.exposure))}};
    if (a.relation) j["relation"] = std::string(to_string(*a.relation));
    doc["assets"].push_back(std::move(j));
  }
  doc["mechanisms"] = json::array();
  for (const auto& m : model.mechanisms) {
    doc["mechanisms"].push_back({{"id", m.id}, {"kind", m.kind}, {"protects", m.protects}});
  }
  doc["vulnerabilities"] = json::array();
  for (const auto& v : model.vulnerabilities) {
    json j = {{"id", v.id}, {"cve", v.cve_id}, {"asset", v.asset_id}};
    if (v.vector) j["vector"] = render(*v.vector);
    if (v.base_cvss_score) j["cvss_score"] = *v.base_cvss_score;
    doc["vulnerabilities"].push_back(std::move(j));
  }
  doc["attack_edges"] = json::array();
  for (const auto& e : model.attack_edges) {
    doc["attack_edges"].push_back({{"from", e.from}, {"to", e.to}});
  }
  doc["fcm"] = {{"lambda", model.fcm.lambda},
                {"epsilon", model.fcm.epsilon},
                {"max_iterations", model.fcm.max_iterations},
                {"initial_activation", model.fcm.initial_activation}};
  return doc.dump(2) + "\n";
}

}  // namespace dvca
