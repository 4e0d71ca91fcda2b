#include "dtm/llm/client.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "dtm/error.hpp"

namespace dtm::llm {

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig c;
  if (const char* url = std::getenv(std::string(kBaseUrlEnv).c_str()); url && *url) c.base_url = url;
  if (const char* key = std::getenv(std::string(kApiKeyEnv).c_str()); key) c.api_key = key;
  return c;
}

BaseUrl BaseUrl::parse(std::string_view url) {
  BaseUrl b;
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) throw Error(Errc::invalid_argument, fmt::format("base url '{}' has no scheme", url));
  b.scheme = std::string(url.substr(0, sep));
  if (b.scheme != "http" && b.scheme != "https")
    throw Error(Errc::invalid_argument, fmt::format("unsupported scheme '{}'", b.scheme));

  std::string_view rest = url.substr(sep + 3);
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) {
    std::string_view path = rest.substr(slash);
    while (!path.empty() && path.back() == '/') path.remove_suffix(1);
    b.path_prefix = std::string(path);
  }
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    b.host = std::string(authority.substr(0, colon));
    try {
      b.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, fmt::format("bad port in '{}'", url));
    }
  } else {
    b.host = std::string(authority);
    b.port = b.scheme == "https" ? 443 : 80;
  }
  if (b.host.empty()) throw Error(Errc::invalid_argument, fmt::format("base url '{}' has no host", url));
  return b;
}

std::string BaseUrl::origin() const { return fmt::format("{}://{}:{}", scheme, host, port); }

LlmClient::LlmClient(EndpointConfig config) : config_(std::move(config)), url_(BaseUrl::parse(config_.base_url)) {}

ChatResponse LlmClient::call(const ChatRequest& request) const {
  if (config_.api_key.empty()) throw Error(Errc::auth_error, fmt::format("{} is not set", kApiKeyEnv));

  const std::string path = url_.path_prefix + "/v1/chat/completions";
  const std::string body = request.body();
  const httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}, {"Accept", "application/json"}};

  std::string last_failure;
  Errc last_code = Errc::transport_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff);

    httplib::Client cli(url_.origin());
    cli.set_connection_timeout(config_.timeout);
    cli.set_read_timeout(config_.timeout);
    cli.set_write_timeout(config_.timeout);

    const auto started = std::chrono::steady_clock::now();
    auto res = cli.Post(path, headers, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= config_.timeout);
      last_code = timed_out ? Errc::timeout : Errc::transport_error;
      last_failure = fmt::format("{} after attempt {}", httplib::to_string(err), attempt + 1);
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403) throw Error(Errc::auth_error, fmt::format("HTTP {}", status));
    if (status == 429) throw Error(Errc::rate_limited, "HTTP 429");
    if (status >= 400 && status < 500) throw Error(Errc::transport_error, fmt::format("HTTP {}", status));
    if (status >= 500) {
      last_code = Errc::transport_error;
      last_failure = fmt::format("HTTP {} after attempt {}", status, attempt + 1);
      continue;
    }
    return parse_chat_response(res->body);
  }
  throw Error(last_code, last_failure);
}

}  // namespace dtm::llm
