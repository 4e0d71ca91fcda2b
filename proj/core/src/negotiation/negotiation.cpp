#include "dtm/negotiation/negotiation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::negotiation {

const char* to_string(Outcome o) { return o == Outcome::agreed ? "agreed" : "failed"; }

Currency midpoint(Currency a, Currency b) {
  const std::int64_t sum = a.cents() + b.cents();
  // floor((sum + 1) / 2) for either sign
  const std::int64_t half = sum >= 0 ? (sum + 1) / 2 : -((-sum) / 2);
  return Currency::from_cents(half);
}

NegotiationTranscript negotiate(Currency seller_reservation, Currency buyer_reservation, Currency opening_ask,
                                int max_rounds, Currency step) {
  if (max_rounds < 1) throw Error(Errc::invalid_argument, fmt::format("max_rounds {} < 1", max_rounds));
  if (step <= Currency{}) throw Error(Errc::invalid_argument, fmt::format("concession step {} <= 0", step.str()));

  NegotiationTranscript t;
  t.seller_reservation = seller_reservation;
  t.buyer_reservation = buyer_reservation;
  t.max_rounds = max_rounds;
  t.opening_ask = std::max(opening_ask, seller_reservation);
  t.opening_bid = Currency::from_cents(buyer_reservation.cents() / 2);

  Currency ask = t.opening_ask;
  Currency bid = t.opening_bid;
  for (int r = 1; r <= max_rounds; ++r) {
    ask = std::max(seller_reservation, ask - step);
    bid = std::min(buyer_reservation, bid + step);
    const bool crossed = bid >= ask;
    t.rounds.push_back({r, ask, bid, crossed, crossed});
    if (crossed) {
      t.outcome = Outcome::agreed;
      t.agreed_price = midpoint(ask, bid);
      break;
    }
  }
  return t;
}

NegotiationTranscript run_negotiation(const Participant& buyer, const Participant& seller, Currency opening_ask,
                                      int max_rounds, Currency step, const agents::PricingParams& params) {
  auto t = negotiate(agents::seller_reservation(params), agents::acceptance_threshold(buyer.profile, buyer.value, params),
                     opening_ask, max_rounds, step);
  t.buyer = buyer.profile.id;
  t.seller = seller.profile.id;
  return t;
}

Currency final_price(double w, const agents::ValueEstimate& value, const NegotiationTranscript& transcript) {
  if (!transcript.agreed() || !transcript.agreed_price) throw Error(Errc::no_agreement, "negotiation failed");
  if (!(w >= 0.0 && w <= 1.0)) throw Error(Errc::invalid_argument, fmt::format("blend weight {} outside [0, 1]", w));
  const double cents = w * value.currency_value * 100.0 + (1.0 - w) * static_cast<double>(transcript.agreed_price->cents());
  return Currency::from_cents(std::llround(cents));
}

UtilityReport utilities(const NegotiationTranscript& /*transcript*/, const agents::ValueEstimate& buyer_value,
                        std::optional<Currency> price, Currency fee) {
  if (!price) return {0.0, -fee.to_double()};
  return {buyer_value.currency_value - price->to_double(), price->to_double()};
}

bool equilibrium_check(const NegotiationTranscript& t, Currency grid_step) {
  if (!t.agreed() || !t.agreed_price || t.rounds.empty()) throw Error(Errc::no_agreement, "negotiation failed");
  if (grid_step <= Currency{}) throw Error(Errc::invalid_argument, "grid step must be positive");

  const std::int64_t p = t.agreed_price->cents();
  const std::int64_t rs = t.seller_reservation.cents();
  const std::int64_t rb = t.buyer_reservation.cents();
  const std::int64_t g = grid_step.cents();
  const auto& last = t.rounds.back();
  if (p < last.ask.cents() || p > last.bid.cents()) return false;

  auto trade_price = [](std::int64_t x, std::int64_t y) { return midpoint(Currency::from_cents(x), Currency::from_cents(y)).cents(); };
  auto u_s = [&](std::int64_t x, std::int64_t y) { return y >= x ? trade_price(x, y) - rs : 0; };
  auto u_b = [&](std::int64_t x, std::int64_t y) { return y >= x ? rb - trade_price(x, y) : 0; };

  const std::int64_t stay_s = u_s(p, p);
  const std::int64_t stay_b = u_b(p, p);
  const std::int64_t hi = std::max(rb, p) + g;
  const std::int64_t lo = std::max<std::int64_t>(0, std::min(rs, p) - g);
  for (std::int64_t x = rs; x <= hi; x += g)
    if (u_s(x, p) > stay_s) return false;
  for (std::int64_t y = rb; y >= lo; y -= g)
    if (u_b(p, y) > stay_b) return false;
  // Walking away is always available to both.
  return stay_s >= 0 && stay_b >= 0;
}

}  // namespace dtm::negotiation
