#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtm/agents/policy.hpp"

namespace dtm::negotiation {

inline constexpr Currency kDefaultConcessionStep = Currency::from_cents(100);
inline constexpr int kDefaultMaxRounds = 5;
inline constexpr double kDefaultBlendWeight = 0.5;

struct Round {
  int number = 0;  // 1-based
  Currency ask;
  Currency bid;
  bool buyer_accepts = false;   // bid >= ask: the buyer would take the current ask
  bool seller_accepts = false;  // same crossing seen from the seller

  bool operator==(const Round&) const = default;
};

enum class Outcome { agreed, failed };

const char* to_string(Outcome o);

/// Alternating offers with a fixed concession step.
/// asks never rise, bids never fall, rounds.size() <= max_rounds.
struct NegotiationTranscript {
  std::string buyer;
  std::string seller;
  Currency seller_reservation;
  Currency buyer_reservation;
  Currency opening_ask;
  Currency opening_bid;
  std::vector<Round> rounds;
  int max_rounds = kDefaultMaxRounds;
  Outcome outcome = Outcome::failed;
  std::optional<Currency> agreed_price;

  bool agreed() const { return outcome == Outcome::agreed; }
};

struct Participant {
  agents::AgentProfile profile;
  agents::ValueEstimate value;
};

/// Round r: a_r = max(res_s, a_{r-1} - step), b_r = min(res_b, b_{r-1} + step)
/// with a_0 = max(opening_ask, res_s), b_0 = res_b / 2 (cents, floored), res_s = fee + 0.01
/// and res_b the buyer's acceptance threshold. Stops at the first b_r >= a_r,
/// agreeing on the midpoint (cents, half up). Throws InvalidArgument on
/// max_rounds < 1 or step <= 0.
NegotiationTranscript run_negotiation(const Participant& buyer, const Participant& seller, Currency opening_ask,
                                      int max_rounds = kDefaultMaxRounds, Currency step = kDefaultConcessionStep,
                                      const agents::PricingParams& params = {});

/// Same protocol from explicit reservations. run_negotiation derives them and
/// delegates here.
NegotiationTranscript negotiate(Currency seller_reservation, Currency buyer_reservation, Currency opening_ask,
                                int max_rounds, Currency step);

/// P = w * V + (1 - w) * agreed_price, to the cent. Throws NoAgreement on a
/// failed transcript, InvalidArgument when w is outside [0, 1].
Currency final_price(double w, const agents::ValueEstimate& value, const NegotiationTranscript& transcript);

struct UtilityReport {
  double buyer_utility = 0.0;
  double seller_utility = 0.0;
};

/// Buyer: V_b - P on a trade, else 0. Seller: P on a trade, else -fee.
UtilityReport utilities(const NegotiationTranscript& transcript, const agents::ValueEstimate& buyer_value,
                        std::optional<Currency> price, Currency fee);

/// Checks the agreed price p against every unilateral deviation on the
/// grid_step lattice of the demand game both sides play at the end: seller
/// names x >= res_s, buyer names y <= res_b, trade at the midpoint iff y >= x,
/// u_s = price - res_s, u_b = res_b - price, 0 without a trade. True iff (p, p)
/// admits no profitable deviation and p lies between the final ask and bid.
/// Throws NoAgreement.
bool equilibrium_check(const NegotiationTranscript& transcript, Currency grid_step = Currency::from_cents(1));

/// Midpoint of two prices in cents, halves rounded up.
Currency midpoint(Currency a, Currency b);

}  // namespace dtm::negotiation
