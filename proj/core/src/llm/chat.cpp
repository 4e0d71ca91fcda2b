#include "dtm/llm/chat.hpp"

#include <cctype>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::llm {

std::string_view system_preamble() {
  return "You act on behalf of a participant in a traffic data market inside an intelligent transportation "
         "system. Traffic control rules: a signalized intersection alternates green between the north-south and "
         "east-west approaches within a fixed cycle; an accident removes capacity from the approach it blocks, so "
         "queues there discharge more slowly; giving that approach a few extra seconds of green at the expense of "
         "the crossing phase can shorten the network's average waiting time. Market rules: vehicles sell accident "
         "observations to the signal controller; every proposal costs the seller 1 currency whether or not it is "
         "accepted; the price is paid only if the buyer accepts; one currency unit is worth one second of average "
         "delay saved. Decide using your stated risk preference and data sensitivity, and answer only by calling "
         "the provided function.";
}

nlohmann::ordered_json offer_decision_function() {
  nlohmann::ordered_json decision;
  decision["type"] = "boolean";
  decision["description"] = "Acceptance of the offer, where True indicates acceptance and False indicates rejection.";
  nlohmann::ordered_json reason;
  reason["type"] = "string";
  reason["description"] = "a concise reason why make this decision";

  nlohmann::ordered_json params;
  params["type"] = "object";
  params["properties"]["decision"] = decision;
  params["properties"]["reason"] = reason;
  params["required"] = nlohmann::ordered_json::array({"decision", "reason"});

  nlohmann::ordered_json fn;
  fn["name"] = kDecisionFunction;
  fn["description"] = "Decide whether to accept the offer based on the context and available information.";
  fn["parameters"] = params;
  return fn;
}

nlohmann::ordered_json ChatRequest::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["temperature"] = temperature;
  j["messages"] = messages;
  j["functions"] = functions;
  j["function_call"] = {{"name", kDecisionFunction}};
  return j;
}

ChatRequest build_chat_request(const agents::DecisionRequest& request, std::string_view model, double temperature) {
  ChatRequest r;
  r.model = std::string(model);
  r.temperature = temperature;
  r.messages.push_back({{"role", "system"}, {"content", system_preamble()}});
  r.messages.push_back({{"role", "user"}, {"content", request.to_json().dump()}});
  r.functions.push_back(offer_decision_function());
  return r;
}

ChatRequest build_prompt(const agents::AgentProfile& profile, const agents::ValueEstimate& value, Currency offer,
                         std::string_view model) {
  return build_chat_request(agents::make_decision_request(profile, value, offer), model);
}

std::string normalize_relaxed_json(std::string_view in) {
  std::string out;
  out.reserve(in.size() + 16);
  std::size_t i = 0;
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };

  while (i < in.size()) {
    const char c = in[i];
    if (c == '"') {
      // Strict string: copy through, honouring escapes.
      out.push_back(c);
      ++i;
      while (i < in.size() && in[i] != '"') {
        if (in[i] == '\\' && i + 1 < in.size()) out.push_back(in[i++]);
        out.push_back(in[i++]);
      }
      if (i < in.size()) out.push_back(in[i++]);
    } else if (c == '\'') {
      out.push_back('"');
      ++i;
      while (i < in.size() && in[i] != '\'') {
        if (in[i] == '\\' && i + 1 < in.size()) {
          if (in[i + 1] == '\'') {
            out.push_back('\'');
            i += 2;
            continue;
          }
          out.push_back(in[i++]);
          out.push_back(in[i++]);
          continue;
        }
        if (in[i] == '"') out.push_back('\\');
        out.push_back(in[i++]);
      }
      out.push_back('"');
      if (i < in.size()) ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i;
      while (j < in.size() && is_ident(in[j])) ++j;
      std::string_view word = in.substr(i, j - i);
      std::size_t k = j;
      while (k < in.size() && std::isspace(static_cast<unsigned char>(in[k]))) ++k;
      const bool is_key = k < in.size() && in[k] == ':';
      if (is_key) {
        out.push_back('"');
        out.append(word);
        out.push_back('"');
      } else if (word == "True" || word == "False" || word == "None") {
        out.append(word == "True" ? "true" : word == "False" ? "false" : "null");
      } else {
        out.append(word);
      }
      i = j;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

nlohmann::json parse_relaxed_json(std::string_view text) {
  auto j = nlohmann::json::parse(normalize_relaxed_json(text), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::malformed_response, "unparseable JSON");
  return j;
}

ChatResponse parse_chat_response(std::string raw_body) {
  ChatResponse r;
  const auto body = parse_relaxed_json(raw_body);
  r.raw_body = std::move(raw_body);
  if (!body.is_object()) throw Error(Errc::malformed_response, "response is not an object");

  const nlohmann::json* message = &body;
  if (auto it = body.find("choices"); it != body.end()) {
    if (!it->is_array() || it->empty() || !(*it)[0].is_object() || !(*it)[0].contains("message"))
      throw Error(Errc::malformed_response, "no choices[0].message");
    message = &(*it)[0]["message"];
  }
  if (!message->is_object()) throw Error(Errc::malformed_response, "message is not an object");

  const nlohmann::json* call = nullptr;
  if (auto it = message->find("function_call"); it != message->end() && it->is_object()) {
    call = &*it;
  } else if (auto tc = message->find("tool_calls"); tc != message->end() && tc->is_array() && !tc->empty()) {
    const auto& first = (*tc)[0];
    if (first.is_object() && first.contains("function") && first["function"].is_object()) call = &first["function"];
  }
  if (call) {
    FunctionCall fc;
    if (auto n = call->find("name"); n != call->end() && n->is_string()) fc.name = n->get<std::string>();
    if (auto a = call->find("arguments"); a != call->end()) fc.arguments = a->is_string() ? a->get<std::string>() : a->dump();
    r.function_call = std::move(fc);
  }
  return r;
}

agents::DecisionResponse parse_decision(const ChatResponse& response) {
  if (!response.function_call) throw Error(Errc::malformed_response, "no function_call in response");
  const auto& fc = *response.function_call;
  if (fc.name != kDecisionFunction) throw Error(Errc::malformed_response, fmt::format("unexpected function '{}'", fc.name));
  const auto args = parse_relaxed_json(fc.arguments);
  if (!args.is_object()) throw Error(Errc::malformed_response, "arguments are not an object");
  auto d = args.find("decision");
  auto r = args.find("reason");
  if (d == args.end() || !d->is_boolean()) throw Error(Errc::malformed_response, "missing boolean 'decision'");
  if (r == args.end() || !r->is_string()) throw Error(Errc::malformed_response, "missing string 'reason'");
  agents::DecisionResponse out{d->get<bool>(), r->get<std::string>()};
  if (out.reason.empty()) throw Error(Errc::malformed_response, "empty reason");
  return out;
}

std::string serialize_decision_response(const agents::DecisionResponse& decision) {
  nlohmann::ordered_json msg;
  msg["role"] = "assistant";
  msg["content"] = nullptr;
  msg["function_call"] = {{"name", kDecisionFunction}, {"arguments", decision.to_json().dump()}};
  nlohmann::ordered_json body;
  body["object"] = "chat.completion";
  body["choices"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"index", 0}, {"message", msg}, {"finish_reason", "function_call"}}});
  return body.dump();
}

}  // namespace dtm::llm
