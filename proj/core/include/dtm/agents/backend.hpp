#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dtm/agents/policy.hpp"
#include "dtm/llm/client.hpp"

namespace dtm::agents {

inline constexpr std::string_view kBackendUnavailableReason = "backend_unavailable";

class DecisionBackend {
 public:
  virtual ~DecisionBackend() = default;
  virtual std::string_view name() const = 0;
  virtual DecisionResponse decide(const AgentProfile& profile, const DecisionRequest& request,
                                  const ValueEstimate& value, const MarketObservation& obs) = 0;
};

class RuleBackend final : public DecisionBackend {
 public:
  explicit RuleBackend(PricingParams params = {}) : params_(params) {}
  std::string_view name() const override { return "rule"; }
  DecisionResponse decide(const AgentProfile& profile, const DecisionRequest& request, const ValueEstimate& value,
                          const MarketObservation& obs) override {
    return rule_decide(profile, request, value, obs, params_);
  }

 private:
  PricingParams params_;
};

enum class OnError { reject, retry_reject };

std::string_view to_string(OnError e);
std::optional<OnError> parse_on_error(std::string_view s);

/// Decisions from a chat-completions model. Any client failure becomes
/// BackendUnavailable inside try_decide; decide() then applies the on-error
/// policy and answers {false, "backend_unavailable"}.
class LlmBackend final : public DecisionBackend {
 public:
  LlmBackend(llm::EndpointConfig endpoint, std::string model = std::string(llm::kDefaultModel),
             OnError on_error = OnError::reject);

  std::string_view name() const override { return "llm"; }
  DecisionResponse decide(const AgentProfile& profile, const DecisionRequest& request, const ValueEstimate& value,
                          const MarketObservation& obs) override;

  /// One round trip, no fallback. Throws BackendUnavailable carrying the
  /// client error text.
  DecisionResponse try_decide(const DecisionRequest& request) const;

  /// Client failures seen so far, oldest first. Never contains the API key.
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  llm::LlmClient client_;
  std::string model_;
  OnError on_error_;
  std::vector<std::string> failures_;
};

/// Dispatch point shared by the harness and the tools.
inline DecisionResponse decide(DecisionBackend& backend, const AgentProfile& profile, const DecisionRequest& request,
                               const ValueEstimate& value, const MarketObservation& obs) {
  return backend.decide(profile, request, value, obs);
}

}  // namespace dtm::agents
