#pragma once

#include "dtm/agents/types.hpp"
#include "dtm/market/ledger.hpp"

namespace dtm::agents {

/// Calibration of the deterministic rule policy.
struct PricingParams {
  double conversion_rate = kDefaultConversionRate;
  double aggressive_multiplier = 1.3;
  double ask_markup_aggressive = 1.5;
  double ask_markup_conservative = 1.1;
  Currency proposal_fee = market::kDefaultProposalFee;
};

/// High sensitivity keeps the value exact; low sensitivity rounds it to the
/// nearest multiple of 5.
double effective_value(Sensitivity sensitivity, double currency_value);

/// m * Ve in cents, m = 1.0 (conservative) or the aggressive multiplier.
/// This is also the buyer's reservation price in negotiation.
Currency acceptance_threshold(const AgentProfile& profile, const ValueEstimate& value, const PricingParams& params);

/// Accept iff offer <= acceptance_threshold. Market observation is carried but unweighted.
DecisionResponse rule_decide(const AgentProfile& profile, const DecisionRequest& request, const ValueEstimate& value,
                             const MarketObservation& obs, const PricingParams& params = {});

/// Markup * Ve, floored at fee + 0.01 so a sale never loses against the fee.
Currency seller_initial_ask(const AgentProfile& profile, const ValueEstimate& value, const MarketObservation& obs,
                            const PricingParams& params = {});

/// Seller reservation price: fee + 0.01.
inline Currency seller_reservation(const PricingParams& params) { return params.proposal_fee + Currency::from_cents(1); }

MarketObservation observe_market(const market::TradeLedger& ledger, double now_s,
                                 std::size_t window = MarketObservation::kDefaultWindow);

}  // namespace dtm::agents
