#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "dvca/nvd_client.hpp"

namespace dvca {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse get(const std::string& url, const HttpHeaders& headers) override {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    client.set_follow_location(true);

    httplib::Headers h(headers.begin(), headers.end());
    auto res = client.Get(path, h);
    if (!res) {
      throw NvdError(NvdErrorKind::Transport, "",
                     "Transport: GET " + origin + " failed: " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers[k] = v;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_default_transport() {
  return std::make_shared<HttplibTransport>();
}

}  // namespace dvca
