#include "dtm/agents/backend.hpp"

#include "dtm/error.hpp"

namespace dtm::agents {

std::string_view to_string(OnError e) { return e == OnError::reject ? "reject" : "retry_reject"; }

std::optional<OnError> parse_on_error(std::string_view s) {
  if (s == "reject") return OnError::reject;
  if (s == "retry_reject") return OnError::retry_reject;
  return std::nullopt;
}

LlmBackend::LlmBackend(llm::EndpointConfig endpoint, std::string model, OnError on_error)
    : client_(std::move(endpoint)), model_(std::move(model)), on_error_(on_error) {}

DecisionResponse LlmBackend::try_decide(const DecisionRequest& request) const {
  try {
    return llm::parse_decision(client_.call(llm::build_chat_request(request, model_)));
  } catch (const Error& e) {
    throw Error(Errc::backend_unavailable, e.what());
  }
}

DecisionResponse LlmBackend::decide(const AgentProfile& /*profile*/, const DecisionRequest& request,
                                    const ValueEstimate& /*value*/, const MarketObservation& /*obs*/) {
  const int attempts = on_error_ == OnError::retry_reject ? 2 : 1;
  for (int i = 0; i < attempts; ++i) {
    try {
      return try_decide(request);
    } catch (const Error& e) {
      failures_.emplace_back(e.what());
    }
  }
  return {false, std::string(kBackendUnavailableReason)};
}

}  // namespace dtm::agents
