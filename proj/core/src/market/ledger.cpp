#include "dtm/market/ledger.hpp"

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::market {

const char* to_string(ProposalStatus s) {
  switch (s) {
    case ProposalStatus::open: return "open";
    case ProposalStatus::accepted: return "accepted";
    case ProposalStatus::rejected: return "rejected";
    case ProposalStatus::expired: return "expired";
  }
  return "?";
}

TradeLedger::TradeLedger(Currency proposal_fee) : fee_(proposal_fee) {
  if (fee_ < Currency{}) throw Error(Errc::invalid_argument, "negative proposal fee");
}

void TradeLedger::register_agent(const AgentId& id, Currency endowment) {
  if (accounts_.contains(id)) throw Error(Errc::duplicate_agent, id);
  if (endowment < Currency{}) throw Error(Errc::invalid_argument, fmt::format("{} endowment {}", id, endowment.str()));
  accounts_.emplace(id, endowment);
  endowed_ += endowment;
}

Currency TradeLedger::balance(const AgentId& id) const {
  auto it = accounts_.find(id);
  if (it == accounts_.end()) throw Error(Errc::unknown_agent, id);
  return it->second;
}

Currency TradeLedger::circulating() const {
  Currency sum = fee_pool_;
  for (const auto& [_, bal] : accounts_) sum += bal;
  return sum;
}

ProposalId TradeLedger::submit_proposal(const AgentId& seller, const DataProduct& product, Currency ask_price,
                                        double now_s) {
  auto it = accounts_.find(seller);
  if (it == accounts_.end()) throw Error(Errc::unknown_agent, seller);
  if (ask_price < Currency{}) throw Error(Errc::invalid_argument, fmt::format("ask {}", ask_price.str()));
  if (it->second < fee_)
    throw Error(Errc::insufficient_funds, fmt::format("{} holds {} < fee {}", seller, it->second.str(), fee_.str()));

  ProposalId id{proposals_.size() + 1};
  proposals_.push_back({id, seller, digest_of(product), ask_price, now_s, ProposalStatus::open});
  withheld_products_.push_back(product);
  it->second -= fee_;
  fee_pool_ += fee_;
  return id;
}

const Proposal& TradeLedger::proposal(ProposalId id) const {
  if (id.value == 0 || id.value > proposals_.size()) throw Error(Errc::unknown_proposal, fmt::format("{}", id.value));
  return proposals_[id.value - 1];
}

Proposal& TradeLedger::open_proposal(ProposalId id) {
  const auto& p = proposal(id);
  if (p.status != ProposalStatus::open)
    throw Error(Errc::proposal_closed, fmt::format("{} is {}", id.value, to_string(p.status)));
  return proposals_[id.value - 1];
}

TradeRecord TradeLedger::settle(ProposalId id, const AgentId& buyer, Currency price, double now_s) {
  Proposal& p = open_proposal(id);
  auto bit = accounts_.find(buyer);
  if (bit == accounts_.end()) throw Error(Errc::unknown_agent, buyer);
  auto sit = accounts_.find(p.seller);
  if (sit == accounts_.end()) throw Error(Errc::unknown_agent, p.seller);
  if (price < Currency{}) throw Error(Errc::invalid_argument, fmt::format("price {}", price.str()));
  if (bit->second < price)
    throw Error(Errc::insufficient_funds, fmt::format("{} holds {} < price {}", buyer, bit->second.str(), price.str()));
  if (!trades_.empty() && now_s < trades_.back().settled_s)
    throw Error(Errc::out_of_order, fmt::format("settlement at {} after {}", now_s, trades_.back().settled_s));

  TradeRecord rec{id, buyer, p.seller, price, now_s, withheld_products_[id.value - 1]};
  trades_.push_back(rec);
  bit->second -= price;
  sit->second += price;
  p.status = ProposalStatus::accepted;
  return rec;
}

void TradeLedger::reject(ProposalId id, const AgentId& buyer, double /*now_s*/) {
  Proposal& p = open_proposal(id);
  if (!accounts_.contains(buyer)) throw Error(Errc::unknown_agent, buyer);
  p.status = ProposalStatus::rejected;
}

std::size_t TradeLedger::expire_open(double /*now_s*/) {
  std::size_t n = 0;
  for (auto& p : proposals_) {
    if (p.status == ProposalStatus::open) {
      p.status = ProposalStatus::expired;
      ++n;
    }
  }
  return n;
}

std::vector<ProposalId> TradeLedger::open_proposals() const {
  std::vector<ProposalId> out;
  for (const auto& p : proposals_)
    if (p.status == ProposalStatus::open) out.push_back(p.id);
  return out;
}

std::vector<TradeRecord> TradeLedger::public_history(double up_to_s) const {
  std::vector<TradeRecord> out;
  for (const auto& t : trades_) {
    if (t.settled_s > up_to_s) break;
    out.push_back(t);
  }
  return out;
}

}  // namespace dtm::market
