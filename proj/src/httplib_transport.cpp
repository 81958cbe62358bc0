#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "llmcg/error.hpp"
#include "llmcg/http_provider.hpp"

#include <regex>

namespace llmcg {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(url, match, pattern)) {
    throw Error(ErrorCode::InvalidConfig, "unsupported endpoint URL " + url);
  }
  return {match[1].str(), match[2].matched ? match[2].str() : "/"};
}

class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const SplitUrl target = split_url(request.url);
    httplib::Client client(target.origin);
    const auto timeout = std::chrono::duration<double>(request.timeout_seconds);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    client.set_connection_timeout(micros);
    client.set_read_timeout(micros);
    client.set_write_timeout(micros);

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : request.headers) {
      if (name == "Content-Type") {
        content_type = value;
      } else {
        headers.emplace(name, value);
      }
    }
    auto result = client.Post(target.path, headers, request.body, content_type);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_httplib_transport() {
  return std::make_shared<HttplibTransport>();
}

}  // namespace llmcg
