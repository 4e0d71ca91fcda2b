#pragma once

#include <chrono>
#include <string>

#include "dtm/llm/chat.hpp"

namespace dtm::llm {

inline constexpr std::string_view kDefaultBaseUrl = "https://api.openai.com";
inline constexpr std::string_view kApiKeyEnv = "DTM_LLM_API_KEY";
inline constexpr std::string_view kBaseUrlEnv = "DTM_LLM_BASE_URL";

struct EndpointConfig {
  std::string base_url{kDefaultBaseUrl};
  std::string api_key;  // never logged or serialised
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds backoff{500};

  /// base_url from DTM_LLM_BASE_URL when set, api_key from DTM_LLM_API_KEY.
  static EndpointConfig from_env();
};

/// Parsed "scheme://host[:port][/prefix]".
struct BaseUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path_prefix;  // no trailing slash

  /// Throws InvalidArgument.
  static BaseUrl parse(std::string_view url);
  std::string origin() const;
};

/// Blocking chat-completions client. Holds no connection between calls, so an
/// instance can be moved across threads freely.
class LlmClient {
 public:
  explicit LlmClient(EndpointConfig config);

  /// One POST to {base_url}/v1/chat/completions. Transport failures, timeouts
  /// and 5xx are retried `retries` times; 4xx never is.
  /// Throws AuthError (missing key, 401, 403), RateLimited (429), Timeout,
  /// TransportError, MalformedResponse.
  ChatResponse call(const ChatRequest& request) const;

  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  BaseUrl url_;
};

}  // namespace dtm::llm
