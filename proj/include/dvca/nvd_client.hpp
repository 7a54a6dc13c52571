#pragma once

// NVD CVE API 2.0 client: resolves CVSS 3.1 vector strings for CVE ids, with a
// one-file-per-CVE disk cache, a fixture directory mode for tests and a strict
// offline mode.

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvca/environment.hpp"

namespace dvca {

inline constexpr std::string_view kNvdCveApiUrl = "https://services.nvd.nist.gov/rest/json/cves/2.0";

enum class RecordSource { Live, Cache, Fixture };

std::string_view to_string(RecordSource s);

struct CveRecord {
  std::string cve_id;
  std::string vector_string;
  double base_score = 0.0;
  std::optional<std::chrono::system_clock::time_point> retrieved_at;
  RecordSource source = RecordSource::Live;

  friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

enum class NvdErrorKind { InvalidId, OfflineMiss, NotFound, NoV31Metrics, RateLimited, Transport,
                          BadResponse };

std::string_view to_string(NvdErrorKind kind);

class NvdError : public std::runtime_error {
 public:
  NvdError(NvdErrorKind kind, std::string cve_id, const std::string& message,
           std::optional<std::chrono::seconds> retry_after = std::nullopt)
      : std::runtime_error(message), kind_(kind), cve_id_(std::move(cve_id)),
        retry_after_(retry_after) {}

  NvdErrorKind kind() const noexcept { return kind_; }
  const std::string& cve_id() const noexcept { return cve_id_; }
  // Set for RateLimited.
  std::optional<std::chrono::seconds> retry_after() const noexcept { return retry_after_; }

 private:
  NvdErrorKind kind_;
  std::string cve_id_;
  std::optional<std::chrono::seconds> retry_after_;
};

// Several CVEs failed during prefetch.
class PrefetchError : public std::runtime_error {
 public:
  explicit PrefetchError(std::vector<NvdError> failures);
  const std::vector<NvdError>& failures() const noexcept { return failures_; }

 private:
  std::vector<NvdError> failures_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

using HttpHeaders = std::map<std::string, std::string>;

// Network seam. Implementations throw NvdError(Transport) on connection failure.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers) = 0;
};

// HTTPS transport backed by cpp-httplib.
std::shared_ptr<HttpTransport> make_default_transport();

// Sliding-window limiter: at most `max_requests` in any `window`.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;
  using Sleeper = std::function<void(std::chrono::steady_clock::duration)>;

  RateLimiter(std::size_t max_requests, std::chrono::steady_clock::duration window,
              Clock clock = {}, Sleeper sleeper = {});

  // Blocks until a request slot is free, then claims it.
  void acquire();

 private:
  std::size_t max_requests_;
  std::chrono::steady_clock::duration window_;
  Clock clock_;
  Sleeper sleeper_;
  std::mutex mutex_;
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

struct NvdOptions {
  bool offline = false;
  bool refresh = false;  // bypass cache reads (still writes)
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> fixture_dir;
  std::optional<std::string> api_key;
  std::string base_url = std::string(kNvdCveApiUrl);
};

// Parses an NVD CVE API 2.0 response document for one CVE. The Primary
// cvssMetricV31 entry is preferred, the first one otherwise.
CveRecord parse_nvd_response(std::string_view cve_id, std::string_view body);

// Cache documents: <dir>/<CVE-id>.json holding the full record.
std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view cve_id);
std::optional<CveRecord> read_cache(const std::filesystem::path& dir, std::string_view cve_id);
// Atomic: writes a temporary sibling then renames over the target.
void write_cache(const std::filesystem::path& dir, const CveRecord& record);

std::string record_to_json(const CveRecord& record);
CveRecord record_from_json(std::string_view text);

class NvdClient {
 public:
  // transport may be null when offline or in fixture mode; otherwise the
  // default HTTPS transport is created on first use.
  explicit NvdClient(NvdOptions options, std::shared_ptr<HttpTransport> transport = nullptr,
                     std::shared_ptr<RateLimiter> limiter = nullptr);

  // Cache, then fixture directory, then live service.
  CveRecord fetch(const std::string& cve_id);

  // Resolves every vulnerability without an inline vector (deduplicated by CVE
  // id, in order). Sequential without an API key; bounded parallelism with one.
  // Throws PrefetchError naming every unresolved CVE.
  std::vector<CveRecord> prefetch(std::span<const Vulnerability> vulnerabilities);

  const NvdOptions& options() const noexcept { return options_; }

 private:
  CveRecord fetch_live(const std::string& cve_id);

  NvdOptions options_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<RateLimiter> limiter_;
  std::mutex transport_mutex_;
};

// Published NVD pacing: 5 requests per rolling 30 s, 50 with an API key.
std::shared_ptr<RateLimiter> make_nvd_rate_limiter(bool has_api_key);

}  // namespace dvca
