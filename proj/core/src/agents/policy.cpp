#include "dtm/agents/policy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dtm::agents {

double effective_value(Sensitivity sensitivity, double currency_value) {
  if (sensitivity == Sensitivity::high) return currency_value;
  return std::round(currency_value / 5.0) * 5.0;
}

Currency acceptance_threshold(const AgentProfile& profile, const ValueEstimate& value, const PricingParams& params) {
  const double m = profile.risk == Risk::aggressive ? params.aggressive_multiplier : 1.0;
  return Currency::from_double(m * effective_value(profile.sensitivity, value.currency_value));
}

DecisionResponse rule_decide(const AgentProfile& profile, const DecisionRequest& request, const ValueEstimate& value,
                             const MarketObservation& /*obs*/, const PricingParams& params) {
  const Currency threshold = acceptance_threshold(profile, value, params);
  const auto prefs = fmt::format("{} risk preference and {} data sensitivity", to_string(profile.risk),
                                 to_string(profile.sensitivity));
  if (request.offer_price <= threshold) {
    return {true, fmt::format("The offer of {} is within what the data is worth to me ({}), given my {}.",
                              request.offer_price.str(), threshold.str(), prefs)};
  }
  return {false, fmt::format("The offered data is expected to provide a profit less than the offer price "
                             "({} > {}), given my {}.",
                             request.offer_price.str(), threshold.str(), prefs)};
}

Currency seller_initial_ask(const AgentProfile& profile, const ValueEstimate& value, const MarketObservation& /*obs*/,
                            const PricingParams& params) {
  const double markup =
      profile.risk == Risk::aggressive ? params.ask_markup_aggressive : params.ask_markup_conservative;
  const Currency ask = Currency::from_double(markup * effective_value(profile.sensitivity, value.currency_value));
  return std::max(ask, seller_reservation(params));
}

MarketObservation observe_market(const market::TradeLedger& ledger, double now_s, std::size_t window) {
  MarketObservation obs;
  obs.open_proposals = ledger.open_proposals().size();
  for (const auto& t : ledger.public_history(now_s)) obs.recent_trade_prices.push_back(t.price);
  for (const auto& p : ledger.proposals()) {
    if (p.status == market::ProposalStatus::rejected && p.created_s <= now_s)
      obs.recent_rejection_prices.push_back(p.ask_price);
  }
  auto keep_last = [window](std::vector<Currency>& v) {
    if (v.size() > window) v.erase(v.begin(), v.end() - static_cast<std::ptrdiff_t>(window));
  };
  keep_last(obs.recent_trade_prices);
  keep_last(obs.recent_rejection_prices);
  return obs;
}

}  // namespace dtm::agents
