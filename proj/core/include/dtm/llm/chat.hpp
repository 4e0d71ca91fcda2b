#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dtm/agents/types.hpp"

namespace dtm::llm {

inline constexpr std::string_view kDefaultModel = "gpt-4-1106-preview";
inline constexpr std::string_view kDecisionFunction = "offer_decision";
inline constexpr std::string_view kPreambleVersion = "dtm-preamble/1";

/// Fixed system prompt: the traffic-control and market rules the model is
/// expected to reason with.
std::string_view system_preamble();

/// The offer_decision function declaration. Key order is fixed, so dump()
/// is byte-stable.
nlohmann::ordered_json offer_decision_function();

struct ChatRequest {
  std::string model{kDefaultModel};
  double temperature = 0.0;
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  nlohmann::ordered_json functions = nlohmann::ordered_json::array();

  /// OpenAI-compatible chat-completions body with "functions" and a forced
  /// "function_call" of offer_decision.
  nlohmann::ordered_json to_json() const;
  std::string body() const { return to_json().dump(); }
};

ChatRequest build_chat_request(const agents::DecisionRequest& request, std::string_view model = kDefaultModel,
                               double temperature = 0.0);

/// Renders the five question fields for the profile and wraps them in a
/// chat request. Controllers get the buyer background, vehicles the seller one.
ChatRequest build_prompt(const agents::AgentProfile& profile, const agents::ValueEstimate& value, Currency offer,
                         std::string_view model = kDefaultModel);

struct FunctionCall {
  std::string name;
  std::string arguments;  // JSON (or relaxed JSON) text
};

struct ChatResponse {
  std::string raw_body;
  std::optional<FunctionCall> function_call;
};

/// Extracts the function call from either a full chat-completions response
/// (choices[0].message) or a bare assistant message. Accepts both
/// "function_call" and the newer "tool_calls" shape. Throws MalformedResponse
/// when the body is not an object at all.
ChatResponse parse_chat_response(std::string raw_body);

/// Throws MalformedResponse: no function call, wrong name, unparseable
/// arguments, missing or mistyped decision/reason, empty reason.
agents::DecisionResponse parse_decision(const ChatResponse& response);

/// Serialises a decision the way a compliant server would return it. Used by
/// the offline fixtures; parse_decision(parse_chat_response(x)) round-trips.
std::string serialize_decision_response(const agents::DecisionResponse& decision);

/// Rewrites JavaScript-style object literals (unquoted keys, single-quoted
/// strings) as strict JSON. Strict JSON passes through unchanged.
std::string normalize_relaxed_json(std::string_view text);

/// normalize_relaxed_json followed by a strict parse. Throws MalformedResponse.
nlohmann::json parse_relaxed_json(std::string_view text);

}  // namespace dtm::llm
