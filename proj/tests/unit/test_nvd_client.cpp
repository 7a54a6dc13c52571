#include <doctest.h>

#include <chrono>
#include <thread>

#include "dvca/nvd_client.hpp"
#include "test_support.hpp"

using namespace dvca;
using dvca::testing::RecordingTransport;
using dvca::testing::TempDir;

namespace {

const std::filesystem::path kFixtures = DVCA_NVD_FIXTURES;

NvdOptions offline_in(const std::filesystem::path& cache) {
  NvdOptions o;
  o.offline = true;
  o.cache_dir = cache;
  return o;
}

// Limiter that never blocks.
std::shared_ptr<RateLimiter> free_limiter() {
  return std::make_shared<RateLimiter>(1000000, std::chrono::seconds(1));
}

Vulnerability vuln(std::string id, std::string cve, bool inline_vector = false) {
  Vulnerability v;
  v.id = std::move(id);
  v.cve_id = std::move(cve);
  v.asset_id = "X";
  if (inline_vector) v.vector = parse_vector("AV:N/AC:L/PR:N/UI:N");
  return v;
}

class FailingTransport : public HttpTransport {
 public:
  HttpResponse get(const std::string&, const HttpHeaders&) override {
    throw NvdError(NvdErrorKind::Transport, "", "Transport: connection refused");
  }
};

NvdErrorKind live_error_kind(HttpResponse resp, std::optional<std::chrono::seconds>* retry = nullptr) {
  TempDir dir;
  NvdOptions o;
  o.cache_dir = dir.path();
  NvdClient client(o, std::make_shared<RecordingTransport>(std::move(resp)), free_limiter());
  try {
    client.fetch("CVE-2019-11510");
  } catch (const NvdError& e) {
    if (retry) *retry = e.retry_after();
    return e.kind();
  }
  FAIL("expected NvdError");
  return NvdErrorKind::BadResponse;
}

}  // namespace

TEST_CASE("parse_nvd_response picks the Primary v3.1 entry") {
  const auto body = testing::slurp(kFixtures / "CVE-2021-44228.json");
  const auto rec = parse_nvd_response("CVE-2021-44228", body);
  CHECK(rec.cve_id == "CVE-2021-44228");
  CHECK(rec.base_score == 10.0);
  CHECK(render(parse_vector(rec.vector_string), false) == "AV:N/AC:L/PR:N/UI:N");
}

TEST_CASE("parse_nvd_response error mapping") {
  CHECK_THROWS_AS(parse_nvd_response("CVE-2020-0001", "not json"), NvdError);
  try {
    parse_nvd_response("CVE-1999-0001", testing::slurp(kFixtures / "CVE-1999-0001.json"));
    FAIL("no throw");
  } catch (const NvdError& e) {
    CHECK(e.kind() == NvdErrorKind::NoV31Metrics);
  }
  try {
    parse_nvd_response("CVE-2020-0001", R"({"vulnerabilities": []})");
    FAIL("no throw");
  } catch (const NvdError& e) {
    CHECK(e.kind() == NvdErrorKind::NotFound);
  }
}

TEST_CASE("fixture fetch yields the catalogued vectors") {
  NvdOptions o;
  o.fixture_dir = kFixtures;
  NvdClient client(o);
  const auto vpn = client.fetch("CVE-2019-11510");
  CHECK(vpn.source == RecordSource::Fixture);
  CHECK(render(parse_vector(vpn.vector_string), false) == "AV:N/AC:L/PR:N/UI:N");
  const auto plc = client.fetch("CVE-2016-9159");
  CHECK(render(parse_vector(plc.vector_string), false) == "AV:N/AC:H/PR:N/UI:N");

  try {
    client.fetch("CVE-2000-1234");
    FAIL("no throw");
  } catch (const NvdError& e) {
    CHECK(e.kind() == NvdErrorKind::NotFound);
    CHECK(e.cve_id() == "CVE-2000-1234");
  }
}

TEST_CASE("invalid ids are rejected before any lookup") {
  auto stub = std::make_shared<RecordingTransport>();
  NvdClient client(NvdOptions{}, stub, free_limiter());
  for (const char* bad : {"BADID", "CVE-19-1", "cve-2019-11510", "CVE-2019-123"}) {
    try {
      client.fetch(bad);
      FAIL("no throw");
    } catch (const NvdError& e) {
      CHECK(e.kind() == NvdErrorKind::InvalidId);
    }
  }
  CHECK(stub->calls() == 0);
}

TEST_CASE("live fetch writes the cache and the second fetch reads it") {
  TempDir dir;
  auto stub = std::make_shared<RecordingTransport>(kFixtures);
  NvdOptions o;
  o.cache_dir = dir.path();
  o.api_key = "secret";
  NvdClient client(o, stub, free_limiter());

  const auto first = client.fetch("CVE-2017-7269");
  CHECK(first.source == RecordSource::Live);
  CHECK(first.retrieved_at.has_value());
  CHECK(stub->calls() == 1);
  CHECK(stub->urls()[0] == std::string(kNvdCveApiUrl) + "?cveId=CVE-2017-7269");
  CHECK(stub->last_headers().at("apiKey") == "secret");
  CHECK(std::filesystem::exists(cache_path(dir.path(), "CVE-2017-7269")));

  const auto second = client.fetch("CVE-2017-7269");
  CHECK(second.source == RecordSource::Cache);
  CHECK(second.vector_string == first.vector_string);
  CHECK(second.retrieved_at == first.retrieved_at);
  CHECK(stub->calls() == 1);

  o.refresh = true;
  NvdClient refreshing(o, stub, free_limiter());
  CHECK(refreshing.fetch("CVE-2017-7269").source == RecordSource::Live);
  CHECK(stub->calls() == 2);
}

TEST_CASE("no api key header without a key") {
  TempDir dir;
  auto stub = std::make_shared<RecordingTransport>(kFixtures);
  NvdOptions o;
  o.cache_dir = dir.path();
  NvdClient(o, stub, free_limiter()).fetch("CVE-2017-7269");
  CHECK(stub->last_headers().count("apiKey") == 0);
}

TEST_CASE("record JSON round-trip") {
  CveRecord r;
  r.cve_id = "CVE-2017-0143";
  r.vector_string = "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H";
  r.base_score = 8.1;
  r.retrieved_at = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  r.source = RecordSource::Cache;
  CHECK(record_from_json(record_to_json(r)) == r);
  r.retrieved_at.reset();
  CHECK(record_from_json(record_to_json(r)) == r);

  TempDir dir;
  write_cache(dir.path(), r);
  const auto back = read_cache(dir.path(), r.cve_id);
  REQUIRE(back.has_value());
  CHECK(*back == r);
  CHECK_FALSE(read_cache(dir.path(), "CVE-2017-0144").has_value());
}

TEST_CASE("corrupt cache entries are misses") {
  TempDir dir;
  std::ofstream(cache_path(dir.path(), "CVE-2017-0143")) << "{ truncated";
  CHECK_FALSE(read_cache(dir.path(), "CVE-2017-0143").has_value());
}

TEST_CASE("offline mode never touches the network") {
  TempDir dir;
  auto stub = std::make_shared<RecordingTransport>(kFixtures);
  NvdClient client(offline_in(dir.path()), stub, free_limiter());
  try {
    client.fetch("CVE-2019-11510");
    FAIL("no throw");
  } catch (const NvdError& e) {
    CHECK(e.kind() == NvdErrorKind::OfflineMiss);
    CHECK(e.cve_id() == "CVE-2019-11510");
  }
  CHECK(stub->calls() == 0);

  CveRecord warm{"CVE-2019-11510", "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H", 10.0,
                 std::nullopt, RecordSource::Live};
  write_cache(dir.path(), warm);
  CHECK(client.fetch("CVE-2019-11510").source == RecordSource::Cache);

  auto with_fixtures = offline_in(dir.path());
  with_fixtures.fixture_dir = kFixtures;
  NvdClient fixture_client(with_fixtures, stub, free_limiter());
  CHECK(fixture_client.fetch("CVE-2016-9159").source == RecordSource::Fixture);
  CHECK_FALSE(std::filesystem::exists(cache_path(dir.path(), "CVE-2016-9159")));
  CHECK(stub->calls() == 0);
}

TEST_CASE("HTTP status mapping") {
  std::optional<std::chrono::seconds> retry;
  CHECK(live_error_kind({429, "", {{"Retry-After", "7"}}}, &retry) == NvdErrorKind::RateLimited);
  CHECK(retry == std::chrono::seconds(7));
  CHECK(live_error_kind({403, "", {}}, &retry) == NvdErrorKind::RateLimited);
  CHECK(retry == std::chrono::seconds(30));
  CHECK(live_error_kind({404, "", {}}) == NvdErrorKind::NotFound);
  CHECK(live_error_kind({500, "", {}}) == NvdErrorKind::Transport);
  CHECK(live_error_kind({200, "<html>", {}}) == NvdErrorKind::BadResponse);
  CHECK(live_error_kind({200, testing::slurp(kFixtures / "CVE-1999-0001.json"), {}}) ==
        NvdErrorKind::NoV31Metrics);

  TempDir dir;
  NvdOptions o;
  o.cache_dir = dir.path();
  NvdClient client(o, std::make_shared<FailingTransport>(), free_limiter());
  try {
    client.fetch("CVE-2019-11510");
    FAIL("no throw");
  } catch (const NvdError& e) {
    CHECK(e.kind() == NvdErrorKind::Transport);
  }
  CHECK_FALSE(std::filesystem::exists(cache_path(dir.path(), "CVE-2019-11510")));
}

TEST_CASE("rate limiter holds a sliding window") {
  using namespace std::chrono;
  steady_clock::time_point now{};
  std::vector<steady_clock::duration> sleeps;
  RateLimiter limiter(
      5, seconds(30), [&] { return now; },
      [&](steady_clock::duration d) {
        sleeps.push_back(d);
        now += d;
      });
  for (int i = 0; i < 5; ++i) {
    limiter.acquire();
    now += seconds(1);
  }
  CHECK(sleeps.empty());
  limiter.acquire();  // sixth request at t=5 must wait until t=30
  REQUIRE(sleeps.size() == 1);
  CHECK(sleeps[0] == seconds(25));
  CHECK(now == steady_clock::time_point{} + seconds(30));
  limiter.acquire();  // slot of the t=1 request frees at t=31
  CHECK(now == steady_clock::time_point{} + seconds(31));
}

TEST_CASE("prefetch") {
  TempDir dir;
  auto stub = std::make_shared<RecordingTransport>(kFixtures);

  SUBCASE("nothing to do when every vector is inline") {
    std::vector<Vulnerability> vs{vuln("V1", "CVE-2019-11510", true)};
    NvdClient client(offline_in(dir.path()), stub, free_limiter());
    CHECK(client.prefetch(vs).empty());
  }
  SUBCASE("warm cache, deduplicated") {
    write_cache(dir.path(), {"CVE-2016-9159", "AV:N/AC:H/PR:N/UI:N", 5.9, std::nullopt,
                             RecordSource::Live});
    write_cache(dir.path(), {"CVE-2016-8673", "AV:N/AC:L/PR:N/UI:R", 8.8, std::nullopt,
                             RecordSource::Live});
    std::vector<Vulnerability> vs{vuln("V9", "CVE-2016-9159"), vuln("V10", "CVE-2016-8673"),
                                  vuln("V11", "CVE-2016-9159")};
    NvdClient client(offline_in(dir.path()), stub, free_limiter());
    const auto recs = client.prefetch(vs);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].cve_id == "CVE-2016-9159");
    CHECK(recs[1].cve_id == "CVE-2016-8673");
  }
  SUBCASE("offline cold cache names every missing CVE") {
    std::vector<Vulnerability> vs{vuln("V9", "CVE-2016-9159"), vuln("V10", "CVE-2016-8673")};
    NvdClient client(offline_in(dir.path()), stub, free_limiter());
    try {
      client.prefetch(vs);
      FAIL("no throw");
    } catch (const PrefetchError& e) {
      REQUIRE(e.failures().size() == 2);
      CHECK(e.failures()[0].kind() == NvdErrorKind::OfflineMiss);
      CHECK(e.failures()[0].cve_id() == "CVE-2016-9159");
      CHECK(std::string(e.what()).find("CVE-2016-8673") != std::string::npos);
    }
  }
  SUBCASE("parallel with an api key") {
    std::vector<Vulnerability> vs;
    for (const char* id : {"CVE-2019-11510", "CVE-2017-7269", "CVE-2017-0143", "CVE-2017-8692",
                           "CVE-2021-1636", "CVE-2023-21528", "CVE-2016-5743"}) {
      vs.push_back(vuln("V", id));
    }
    NvdOptions o;
    o.cache_dir = dir.path();
    o.api_key = "k";
    NvdClient client(o, stub, free_limiter());
    const auto recs = client.prefetch(vs);
    REQUIRE(recs.size() == vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) CHECK(recs[i].cve_id == vs[i].cve_id);
    CHECK(stub->calls() == vs.size());
  }
  CHECK(stub->calls() <= 7);
}

TEST_CASE("concurrent cache writes leave a whole document") {
  TempDir dir;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        write_cache(dir.path(), {"CVE-2017-0143", "AV:N/AC:H/PR:N/UI:N", 8.0 + t * 0.1,
                                 std::nullopt, RecordSource::Live});
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto rec = read_cache(dir.path(), "CVE-2017-0143");
  REQUIRE(rec.has_value());
  CHECK(rec->vector_string == "AV:N/AC:H/PR:N/UI:N");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}
