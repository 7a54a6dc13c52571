#include "dvca/nvd_client.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dvca/cvss.hpp"

namespace dvca {

using nlohmann::json;

namespace {

std::string format_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::chrono::system_clock::time_point parse_utc(const std::string& text) {
  std::tm tm{};
  std::istringstream in(text);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  if (in.fail()) throw std::invalid_argument("bad UTC timestamp '" + text + "'");
  return std::chrono::system_clock::from_time_t(timegm(&tm));
}

RecordSource source_from_string(const std::string& s) {
  if (s == "live") return RecordSource::Live;
  if (s == "cache") return RecordSource::Cache;
  if (s == "fixture") return RecordSource::Fixture;
  throw std::invalid_argument("unknown record source '" + s + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<std::chrono::seconds> parse_retry_after(const HttpResponse& resp) {
  for (const auto& [name, value] : resp.headers) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "retry-after") {
      try {
        return std::chrono::seconds(std::stol(value));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(RecordSource s) {
  switch (s) {
    case RecordSource::Live: return "live";
    case RecordSource::Cache: return "cache";
    case RecordSource::Fixture: return "fixture";
  }
  return "?";
}

std::string_view to_string(NvdErrorKind kind) {
  switch (kind) {
    case NvdErrorKind::InvalidId: return "InvalidId";
    case NvdErrorKind::OfflineMiss: return "OfflineMiss";
    case NvdErrorKind::NotFound: return "NotFound";
    case NvdErrorKind::NoV31Metrics: return "NoV31Metrics";
    case NvdErrorKind::RateLimited: return "RateLimited";
    case NvdErrorKind::Transport: return "Transport";
    case NvdErrorKind::BadResponse: return "BadResponse";
  }
  return "NvdError";
}

PrefetchError::PrefetchError(std::vector<NvdError> failures)
    : std::runtime_error([&] {
        std::string msg = "unresolved CVE vectors:";
        for (const auto& f : failures) msg += "\n  " + f.cve_id() + ": " + f.what();
        return msg;
      }()),
      failures_(std::move(failures)) {}

RateLimiter::RateLimiter(std::size_t max_requests, std::chrono::steady_clock::duration window,
                         Clock clock, Sleeper sleeper)
    : max_requests_(std::max<std::size_t>(1, max_requests)), window_(window),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      sleeper_(sleeper ? std::move(sleeper)
                       : Sleeper([](auto d) { std::this_thread::sleep_for(d); })) {}

void RateLimiter::acquire() {
  std::unique_lock lock(mutex_);
  while (true) {
    const auto now = clock_();
    while (!recent_.empty() && now - recent_.front() >= window_) recent_.pop_front();
    if (recent_.size() < max_requests_) {
      recent_.push_back(now);
      return;
    }
    const auto wait = recent_.front() + window_ - now;
    lock.unlock();
    sleeper_(wait);
    lock.lock();
  }
}

std::shared_ptr<RateLimiter> make_nvd_rate_limiter(bool has_api_key) {
  return std::make_shared<RateLimiter>(has_api_key ? 50 : 5, std::chrono::seconds(30));
}

CveRecord parse_nvd_response(std::string_view cve_id, std::string_view body) {
  const std::string id(cve_id);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw NvdError(NvdErrorKind::BadResponse, id, "BadResponse: " + std::string(e.what()));
  }
  const auto vulns = doc.find("vulnerabilities");
  if (vulns == doc.end() || !vulns->is_array() || vulns->empty()) {
    throw NvdError(NvdErrorKind::NotFound, id, "NotFound: NVD returned no record for " + id);
  }
  const json& cve = (*vulns)[0].value("cve", json::object());
  const auto metrics = cve.value("metrics", json::object());
  const auto v31 = metrics.find("cvssMetricV31");
  if (v31 == metrics.end() || !v31->is_array() || v31->empty()) {
    throw NvdError(NvdErrorKind::NoV31Metrics, id, "NoV31Metrics: " + id + " has no CVSS 3.1 data");
  }
  const json* chosen = &(*v31)[0];
  for (const auto& entry : *v31) {
    if (entry.value("type", "") == "Primary") {
      chosen = &entry;
      break;
    }
  }
  const auto data = chosen->value("cvssData", json::object());
  if (!data.contains("vectorString") || !data["vectorString"].is_string()) {
    throw NvdError(NvdErrorKind::BadResponse, id, "BadResponse: cvssData.vectorString missing");
  }
  CveRecord rec;
  rec.cve_id = cve.value("id", id);
  rec.vector_string = data["vectorString"].get<std::string>();
  rec.base_score = data.value("baseScore", 0.0);
  try {
    parse_vector(rec.vector_string);
  } catch (const CvssError& e) {
    throw NvdError(NvdErrorKind::BadResponse, id,
                   "BadResponse: unparsable vector '" + rec.vector_string + "': " + e.what());
  }
  return rec;
}

std::string record_to_json(const CveRecord& record) {
  json doc = {{"cve_id", record.cve_id},
              {"vector_string", record.vector_string},
              {"base_score", record.base_score},
              {"source", std::string(to_string(record.source))}};
  doc["retrieved_at"] = record.retrieved_at ? json(format_utc(*record.retrieved_at)) : json();
  return doc.dump(2) + "\n";
}

CveRecord record_from_json(std::string_view text) {
  const json doc = json::parse(text);
  CveRecord rec;
  rec.cve_id = doc.at("cve_id").get<std::string>();
  rec.vector_string = doc.at("vector_string").get<std::string>();
  rec.base_score = doc.at("base_score").get<double>();
  rec.source = source_from_string(doc.at("source").get<std::string>());
  if (doc.contains("retrieved_at") && !doc["retrieved_at"].is_null()) {
    rec.retrieved_at = parse_utc(doc["retrieved_at"].get<std::string>());
  }
  return rec;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view cve_id) {
  return dir / (std::string(cve_id) + ".json");
}

std::optional<CveRecord> read_cache(const std::filesystem::path& dir, std::string_view cve_id) {
  const auto path = cache_path(dir, cve_id);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    auto rec = record_from_json(read_file(path));
    parse_vector(rec.vector_string);
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are treated as misses and overwritten
  }
}

void write_cache(const std::filesystem::path& dir, const CveRecord& record) {
  std::filesystem::create_directories(dir);
  const auto target = cache_path(dir, record.cve_id);
  thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = target;
  tmp += ".tmp." + std::to_string(rng());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << record_to_json(record);
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

NvdClient::NvdClient(NvdOptions options, std::shared_ptr<HttpTransport> transport,
                     std::shared_ptr<RateLimiter> limiter)
    : options_(std::move(options)), transport_(std::move(transport)), limiter_(std::move(limiter)) {
  if (!limiter_) limiter_ = make_nvd_rate_limiter(options_.api_key.has_value());
}

CveRecord NvdClient::fetch(const std::string& cve_id) {
  if (!is_valid_cve_id(cve_id)) {
    throw NvdError(NvdErrorKind::InvalidId, cve_id, "InvalidId: '" + cve_id + "' is not a CVE id");
  }
  if (!options_.refresh && !options_.cache_dir.empty()) {
    if (auto cached = read_cache(options_.cache_dir, cve_id)) {
      cached->source = RecordSource::Cache;
      return *cached;
    }
  }
  if (options_.fixture_dir) {
    const auto path = *options_.fixture_dir / (cve_id + ".json");
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      throw NvdError(NvdErrorKind::NotFound, cve_id,
                     "NotFound: no fixture for " + cve_id + " in " + options_.fixture_dir->string());
    }
    auto rec = parse_nvd_response(cve_id, read_file(path));
    rec.source = RecordSource::Fixture;
    return rec;
  }
  if (options_.offline) {
    throw NvdError(NvdErrorKind::OfflineMiss, cve_id,
                   "OfflineMiss: " + cve_id + " is not cached and --offline forbids network access");
  }
  auto rec = fetch_live(cve_id);
  if (!options_.cache_dir.empty()) write_cache(options_.cache_dir, rec);
  return rec;
}

CveRecord NvdClient::fetch_live(const std::string& cve_id) {
  std::shared_ptr<HttpTransport> transport;
  {
    std::lock_guard lock(transport_mutex_);
    if (!transport_) transport_ = make_default_transport();
    transport = transport_;
  }
  HttpHeaders headers{{"Accept", "application/json"}};
  if (options_.api_key) headers["apiKey"] = *options_.api_key;

  limiter_->acquire();
  const auto resp = transport->get(options_.base_url + "?cveId=" + cve_id, headers);
  if (resp.status == 403 || resp.status == 429) {
    const auto hint = parse_retry_after(resp).value_or(std::chrono::seconds(30));
    throw NvdError(NvdErrorKind::RateLimited, cve_id,
                   "RateLimited: NVD answered HTTP " + std::to_string(resp.status) +
                       "; retry after " + std::to_string(hint.count()) + " s",
                   hint);
  }
  if (resp.status == 404) {
    throw NvdError(NvdErrorKind::NotFound, cve_id, "NotFound: NVD has no record for " + cve_id);
  }
  if (resp.status != 200) {
    throw NvdError(NvdErrorKind::Transport, cve_id,
                   "Transport: NVD answered HTTP " + std::to_string(resp.status));
  }
  auto rec = parse_nvd_response(cve_id, resp.body);
  rec.source = RecordSource::Live;
  rec.retrieved_at =
      std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return rec;
}

std::vector<CveRecord> NvdClient::prefetch(std::span<const Vulnerability> vulnerabilities) {
  std::vector<std::string> ids;
  for (const auto& v : vulnerabilities) {
    if (v.vector) continue;
    if (std::find(ids.begin(), ids.end(), v.cve_id) == ids.end()) ids.push_back(v.cve_id);
  }

  std::vector<std::optional<CveRecord>> results(ids.size());
  std::vector<std::optional<NvdError>> errors(ids.size());
  auto resolve = [&](std::size_t i) {
    try {
      results[i] = fetch(ids[i]);
    } catch (const NvdError& e) {
      errors[i] = e;
    } catch (const std::exception& e) {
      errors[i] = NvdError(NvdErrorKind::Transport, ids[i], e.what());
    }
  };

  if (options_.api_key && ids.size() > 1) {
    constexpr std::size_t kWorkers = 4;
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (std::size_t w = 0; w < std::min(kWorkers, ids.size()); ++w) {
      workers.push_back(std::async(std::launch::async, [&] {
        for (auto i = next++; i < ids.size(); i = next++) resolve(i);
      }));
    }
    for (auto& f : workers) f.get();
  } else {
    for (std::size_t i = 0; i < ids.size(); ++i) resolve(i);
  }

  std::vector<NvdError> failures;
  std::vector<CveRecord> records;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (errors[i]) {
      failures.push_back(*errors[i]);
    } else {
      records.push_back(std::move(*results[i]));
    }
  }
  if (!failures.empty()) throw PrefetchError(std::move(failures));
  return records;
}

}  // namespace dvca
