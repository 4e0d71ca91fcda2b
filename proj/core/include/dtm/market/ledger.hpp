#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtm/currency.hpp"
#include "dtm/data_product.hpp"
#include "dtm/ids.hpp"

namespace dtm::market {

using AgentId = std::string;

enum class ProposalStatus { open, accepted, rejected, expired };

const char* to_string(ProposalStatus s);

struct Proposal {
  ProposalId id;
  AgentId seller;
  ProductDigest digest;
  Currency ask_price;
  double created_s = 0.0;
  ProposalStatus status = ProposalStatus::open;
};

struct TradeRecord {
  ProposalId proposal;
  AgentId buyer;
  AgentId seller;
  Currency price;
  double settled_s = 0.0;
  DataProduct delivered;
};

inline constexpr Currency kDefaultProposalFee = Currency::from_cents(100);

/// Accounts, proposal book and the public trade history. Every mutating call
/// either succeeds completely or throws and leaves the ledger untouched.
class TradeLedger {
 public:
  explicit TradeLedger(Currency proposal_fee = kDefaultProposalFee);

  Currency proposal_fee() const { return fee_; }

  /// Throws DuplicateAgent, InvalidArgument (negative endowment).
  void register_agent(const AgentId& id, Currency endowment);

  /// Moves the proposal fee from the seller to the fee pool and opens a proposal.
  /// The full product is held back until settlement.
  /// Throws UnknownAgent, InsufficientFunds, InvalidArgument (negative ask).
  ProposalId submit_proposal(const AgentId& seller, const DataProduct& product, Currency ask_price, double now_s);

  /// Transfers price from buyer to seller and delivers the product.
  /// Throws UnknownProposal, ProposalClosed, UnknownAgent, InsufficientFunds,
  /// OutOfOrder (now_s earlier than the last settlement).
  TradeRecord settle(ProposalId id, const AgentId& buyer, Currency price, double now_s);

  /// Closes the proposal without transfer; the fee stays in the pool.
  /// Throws UnknownProposal, ProposalClosed, UnknownAgent.
  void reject(ProposalId id, const AgentId& buyer, double now_s);

  /// Marks every still-open proposal expired. Returns how many.
  std::size_t expire_open(double now_s);

  /// Settled trades with settled_s <= up_to_s, oldest first.
  std::vector<TradeRecord> public_history(double up_to_s) const;

  Currency balance(const AgentId& id) const;
  bool has_agent(const AgentId& id) const { return accounts_.contains(id); }
  Currency fee_pool() const { return fee_pool_; }
  Currency total_endowment() const { return endowed_; }
  /// Sum of balances plus the fee pool; equals total_endowment() at all times.
  Currency circulating() const;
  bool conserves() const { return circulating() == endowed_; }

  const std::map<AgentId, Currency>& accounts() const { return accounts_; }
  const std::vector<Proposal>& proposals() const { return proposals_; }
  const std::vector<TradeRecord>& trades() const { return trades_; }
  std::vector<ProposalId> open_proposals() const;
  const Proposal& proposal(ProposalId id) const;

 private:
  Proposal& open_proposal(ProposalId id);

  Currency fee_;
  Currency fee_pool_;
  Currency endowed_;
  std::map<AgentId, Currency> accounts_;
  std::vector<Proposal> proposals_;             // index = id - 1
  std::vector<DataProduct> withheld_products_;  // parallel to proposals_
  std::vector<TradeRecord> trades_;
};

}  // namespace dtm::market
