#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtm/currency.hpp"

namespace dtm::agents {

enum class Role { vehicle, controller };
enum class Risk { aggressive, conservative };
enum class Sensitivity { high, low };

std::string_view to_string(Role r);
std::string_view to_string(Risk r);
std::string_view to_string(Sensitivity s);
std::optional<Role> parse_role(std::string_view s);
std::optional<Risk> parse_risk(std::string_view s);
std::optional<Sensitivity> parse_sensitivity(std::string_view s);

/// Preferences and starting funds of one market participant.
struct AgentProfile {
  std::string id;
  Role role = Role::vehicle;
  Risk risk = Risk::conservative;
  Sensitivity sensitivity = Sensitivity::high;
  Currency endowment;
};

enum class ValueMethod { oracle, llm };

/// Expected reduction of the network's average waiting time and its money value.
struct ValueEstimate {
  double seconds_saved = 0.0;
  double currency_value = 0.0;
  ValueMethod method = ValueMethod::oracle;
  double basis_s = 0.0;
};

inline constexpr double kDefaultConversionRate = 1.0;  // currency per second saved

/// Clamps seconds_saved at 0 and converts at the given rate.
ValueEstimate make_estimate(double seconds_saved, double conversion_rate = kDefaultConversionRate,
                            ValueMethod method = ValueMethod::oracle, double basis_s = 0.0);

/// The five question fields a buyer (or seller) decides on. Texts are rendered
/// once here so every backend sees byte-identical wording.
struct DecisionRequest {
  std::string background;
  std::string risk_preference;
  std::string data_sensitivity;
  std::string expected_data_value;
  Currency offer_price;

  /// {"background", "risk_preference", "data_sensitivity", "expected_data_value", "offer_price"}
  /// in that order; offer_price is rendered as its sentence.
  nlohmann::ordered_json to_json() const;
};

struct DecisionResponse {
  bool decision = false;
  std::string reason;

  nlohmann::ordered_json to_json() const { return {{"decision", decision}, {"reason", reason}}; }
  bool operator==(const DecisionResponse&) const = default;
};

/// Aggregates of other agents' behaviour visible on the market.
struct MarketObservation {
  static constexpr std::size_t kDefaultWindow = 5;

  std::size_t open_proposals = 0;
  std::vector<Currency> recent_trade_prices;      // oldest first, at most k
  std::vector<Currency> recent_rejection_prices;  // oldest first, at most k
};

/// "10", "12.5", "3.46": at most two decimals, trailing zeros dropped.
std::string format_amount(double value);

std::string offer_sentence(Currency offer);

DecisionRequest make_decision_request(const AgentProfile& profile, const ValueEstimate& value, Currency offer);

}  // namespace dtm::agents
