#include "cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <system_error>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dvca/assessment.hpp"
#include "dvca/report_io.hpp"
#include "dvca/scenario.hpp"

namespace dvca::cli {

namespace {

struct CommonFlags {
  std::string format = "table";
  bool trace = false;
  bool offline = false;
  bool strict = false;
  bool refresh = false;
  std::string cache_dir;
  std::string fixture_dir;
  std::string api_key_env;
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<int> max_iter;
};

// Machine-readable one-line diagnostic on stderr.
int diagnose(std::ostream& err, int code, std::string_view kind, const std::string& message,
             const std::string& where = {}) {
  nlohmann::json d = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!where.empty()) d["where"] = where;
  err << d.dump() << "\n";
  return code;
}

std::filesystem::path default_cache_dir() {
  if (const char* p = std::getenv("DVCA_CACHE_DIR"); p && *p) return p;
  if (const char* p = std::getenv("XDG_CACHE_HOME"); p && *p) {
    return std::filesystem::path(p) / "dvca" / "nvd";
  }
  if (const char* p = std::getenv("HOME"); p && *p) {
    return std::filesystem::path(p) / ".cache" / "dvca" / "nvd";
  }
  return ".dvca-cache";
}

NvdClient make_client(const CommonFlags& flags, const Environment& env) {
  NvdOptions opts;
  opts.offline = flags.offline;
  opts.refresh = flags.refresh;
  opts.cache_dir = flags.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(flags.cache_dir);
  if (!flags.fixture_dir.empty()) opts.fixture_dir = flags.fixture_dir;
  if (!flags.api_key_env.empty()) {
    if (const char* key = std::getenv(flags.api_key_env.c_str()); key && *key) opts.api_key = key;
  }
  return NvdClient(std::move(opts), env.transport);
}

void apply_overrides(ScenarioModel& model, const CommonFlags& flags) {
  if (flags.epsilon) model.fcm.epsilon = *flags.epsilon;
  if (flags.lambda) model.fcm.lambda = *flags.lambda;
  if (flags.max_iter) model.fcm.max_iterations = *flags.max_iter;
  try {
    model.fcm.validate();
  } catch (const FcmError& e) {
    throw ScenarioError(ScenarioErrorKind::ValidationError, "fcm", e.what());
  }
}

ScenarioModel load(const std::string& path, std::ostream& err) {
  std::vector<std::string> warnings;
  auto model = load_scenario_file(path, &warnings);
  for (const auto& w : warnings) err << "warning: " << path << ": " << w << "\n";
  return model;
}

AssessmentReport load_and_assess(const std::string& path, const CommonFlags& flags,
                                 const Environment& env) {
  auto model = load(path, *env.err);
  apply_overrides(model, flags);
  auto client = make_client(flags, env);
  const auto records = client.prefetch(model.vulnerabilities);
  return assess(model, vectors_from_records(records));
}

int cmd_validate(const std::string& path, const Environment& env) {
  const auto model = load(path, *env.err);
  *env.out << "OK: " << model.name << " (" << model.assets.size() << " assets, "
           << model.vulnerabilities.size() << " vulnerabilities, " << model.attack_edges.size()
           << " attack edges)\n";
  return kOk;
}

int cmd_assess(const std::string& path, const CommonFlags& flags, const Environment& env) {
  const auto report = load_and_assess(path, flags, env);
  if (flags.format == "json") {
    *env.out << render_report_json(report);
  } else if (flags.format == "csv") {
    *env.out << render_trace_csv(report.concepts, report.trace.states);
  } else {
    *env.out << render_report_table(report, flags.trace);
  }
  if (!report.converged()) {
    *env.err << "warning: FCM did not converge within " << report.config.max_iterations
             << " iterations (converged=false)\n";
    if (flags.strict) {
      return diagnose(*env.err, kComputeError, "NotConverged",
                      "FCM did not reach equilibrium and --strict is set");
    }
  }
  return kOk;
}

int cmd_compare(const std::string& baseline, const std::vector<std::string>& variants,
                const CommonFlags& flags, const Environment& env) {
  const auto base = load_and_assess(baseline, flags, env);
  std::vector<AssessmentReport> others;
  for (const auto& v : variants) others.push_back(load_and_assess(v, flags, env));

  bool all_converged = base.converged();
  for (const auto& r : others) all_converged = all_converged && r.converged();

  ComparisonReport cmp;
  try {
    cmp = compare(base, others);
  } catch (const std::invalid_argument& e) {
    return diagnose(*env.err, kValidationError, "TargetMismatch", e.what());
  }
  if (flags.format == "json") {
    *env.out << render_comparison_json(cmp);
  } else if (flags.format == "csv") {
    *env.out << render_comparison_csv(cmp);
  } else {
    *env.out << render_comparison_table(cmp);
  }
  if (!all_converged && flags.strict) {
    return diagnose(*env.err, kComputeError, "NotConverged",
                    "at least one scenario did not reach equilibrium and --strict is set");
  }
  return kOk;
}

int cmd_fetch(const std::vector<std::string>& ids_in, const std::string& scenario_path,
              const CommonFlags& flags, const Environment& env) {
  for (const auto& id : ids_in) {
    if (!is_valid_cve_id(id)) {
      return diagnose(*env.err, kValidationError, "InvalidId", "'" + id + "' is not a CVE id", id);
    }
  }
  auto client = make_client(flags, env);
  std::vector<CveRecord> records;
  if (!scenario_path.empty()) {
    const auto model = load(scenario_path, *env.err);
    records = client.prefetch(model.vulnerabilities);
  }
  std::vector<Vulnerability> wanted;
  for (const auto& id : ids_in) wanted.push_back(Vulnerability{id, id, "", std::nullopt, {}});
  const auto more = client.prefetch(wanted);
  records.insert(records.end(), more.begin(), more.end());

  if (flags.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) arr.push_back(nlohmann::json::parse(record_to_json(r)));
    *env.out << arr.dump(2) << "\n";
    return kOk;
  }
  for (const auto& r : records) {
    *env.out << r.cve_id << "  " << render(parse_vector(r.vector_string)) << "  base "
             << format_fixed(r.base_score, 1) << "  (" << to_string(r.source) << ")  "
             << r.vector_string << "\n";
  }
  *env.out << records.size() << " fetched\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, const Environment& env_in) {
  Environment env = env_in;
  if (env.out == nullptr) env.out = &std::cout;
  if (env.err == nullptr) env.err = &std::cerr;

  CLI::App app{"Dynamic vulnerability criticality assessment for ICS/SCADA scenarios", "dvca"};
  app.require_subcommand(1, 1);

  CommonFlags flags;
  auto add_nvd_flags = [&](CLI::App* cmd) {
    cmd->add_flag("--offline", flags.offline, "Never contact the NVD service");
    cmd->add_option("--cache-dir", flags.cache_dir, "NVD record cache directory");
    cmd->add_option("--fixture-dir", flags.fixture_dir,
                    "Read NVD-shaped documents from this directory instead of the service");
    cmd->add_option("--api-key-env", flags.api_key_env,
                    "Environment variable holding an NVD API key");
  };
  auto add_assess_flags = [&](CLI::App* cmd) {
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    cmd->add_flag("--strict", flags.strict, "Exit 3 when the FCM does not converge");
    cmd->add_option("--epsilon", flags.epsilon, "Convergence threshold");
    cmd->add_option("--lambda", flags.lambda, "Sigmoid steepness");
    cmd->add_option("--max-iter", flags.max_iter, "Iteration cap");
    add_nvd_flags(cmd);
  };

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Load and validate a scenario file");
  validate->add_option("scenario", validate_path, "Scenario JSON file")->required();

  std::string assess_path;
  auto* assess_cmd = app.add_subcommand("assess", "Run the assessment pipeline on a scenario");
  assess_cmd->add_option("scenario", assess_path, "Scenario JSON file")->required();
  assess_cmd->add_flag("--trace", flags.trace, "Print the full FCM iteration table");
  add_assess_flags(assess_cmd);

  std::vector<std::string> compare_paths;
  auto* compare_cmd = app.add_subcommand("compare", "Compare variants against a baseline");
  compare_cmd->add_option("scenarios", compare_paths, "Baseline followed by variant files")
      ->required()
      ->expected(2, -1);
  add_assess_flags(compare_cmd);

  std::vector<std::string> fetch_ids;
  std::string fetch_scenario;
  auto* fetch = app.add_subcommand("fetch", "Resolve CVE vectors into the local cache");
  fetch->add_option("cve", fetch_ids, "CVE ids");
  fetch->add_option("--scenario", fetch_scenario, "Resolve every vector a scenario lacks");
  fetch->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}));
  fetch->add_flag("--refresh", flags.refresh, "Ignore cached records");
  add_nvd_flags(fetch);

  std::vector<std::string> argv_storage{"dvca"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    *env.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    *env.out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return diagnose(*env.err, kValidationError, "ArgumentError", e.what());
  }

  try {
    if (*validate) return cmd_validate(validate_path, env);
    if (*assess_cmd) return cmd_assess(assess_path, flags, env);
    if (*compare_cmd) {
      return cmd_compare(compare_paths.front(), {compare_paths.begin() + 1, compare_paths.end()},
                         flags, env);
    }
    if (*fetch) {
      if (fetch_ids.empty() && fetch_scenario.empty()) {
        return diagnose(*env.err, kValidationError, "ArgumentError",
                        "fetch needs CVE ids or --scenario");
      }
      return cmd_fetch(fetch_ids, fetch_scenario, flags, env);
    }
  } catch (const ScenarioError& e) {
    return diagnose(*env.err, kValidationError, to_string(e.kind()), e.what(), e.where());
  } catch (const std::system_error& e) {
    return diagnose(*env.err, kIoError, "IoError", e.what());
  } catch (const NvdError& e) {
    return diagnose(*env.err, kIoError, to_string(e.kind()), e.what(), e.cve_id());
  } catch (const PrefetchError& e) {
    std::string where;
    std::string_view kind = "PrefetchError";
    const auto first = e.failures().front().kind();
    bool uniform = true;
    for (const auto& f : e.failures()) {
      uniform = uniform && f.kind() == first;
      where += (where.empty() ? "" : ",") + f.cve_id();
    }
    if (uniform) kind = to_string(first);
    return diagnose(*env.err, kIoError, kind, e.what(), where);
  } catch (const AssessmentError& e) {
    return diagnose(*env.err, kComputeError, "AssessmentError", e.what(), e.stage());
  } catch (const std::exception& e) {
    return diagnose(*env.err, kComputeError, "InternalError", e.what());
  }
  return kOk;
}

}  // namespace dvca::cli
