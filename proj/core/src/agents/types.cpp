#include "dtm/agents/types.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dtm::agents {

std::string_view to_string(Role r) { return r == Role::vehicle ? "vehicle" : "controller"; }
std::string_view to_string(Risk r) { return r == Risk::aggressive ? "aggressive" : "conservative"; }
std::string_view to_string(Sensitivity s) { return s == Sensitivity::high ? "high" : "low"; }

std::optional<Role> parse_role(std::string_view s) {
  if (s == "vehicle") return Role::vehicle;
  if (s == "controller") return Role::controller;
  return std::nullopt;
}
std::optional<Risk> parse_risk(std::string_view s) {
  if (s == "aggressive") return Risk::aggressive;
  if (s == "conservative") return Risk::conservative;
  return std::nullopt;
}
std::optional<Sensitivity> parse_sensitivity(std::string_view s) {
  if (s == "high") return Sensitivity::high;
  if (s == "low") return Sensitivity::low;
  return std::nullopt;
}

ValueEstimate make_estimate(double seconds_saved, double conversion_rate, ValueMethod method, double basis_s) {
  const double s = std::max(0.0, seconds_saved);
  return {s, s * conversion_rate, method, basis_s};
}

std::string format_amount(double value) {
  auto s = fmt::format("{:.2f}", value);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string offer_sentence(Currency offer) {
  return fmt::format("The data is offered at {} dollars.", format_amount(offer.to_double()));
}

nlohmann::ordered_json DecisionRequest::to_json() const {
  nlohmann::ordered_json j;
  j["background"] = background;
  j["risk_preference"] = risk_preference;
  j["data_sensitivity"] = data_sensitivity;
  j["expected_data_value"] = expected_data_value;
  j["offer_price"] = offer_sentence(offer_price);
  return j;
}

DecisionRequest make_decision_request(const AgentProfile& profile, const ValueEstimate& value, Currency offer) {
  DecisionRequest r;
  r.background = profile.role == Role::controller
                     ? "I am a traffic light controller in an intelligent transportation system, looking to "
                       "purchase data for controlling support."
                     : "I am a connected vehicle in an intelligent transportation system, looking to sell the "
                       "traffic data I observed.";
  r.risk_preference = fmt::format("My risk preference is {}.", to_string(profile.risk));
  r.data_sensitivity = fmt::format("My data sensitivity is {}.", to_string(profile.sensitivity));
  r.expected_data_value =
      fmt::format("I expect the data to decrease average delay by {} seconds", format_amount(value.seconds_saved));
  r.offer_price = offer;
  return r;
}

}  // namespace dtm::agents
