#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dtm/agents/valuation.hpp"
#include "dtm/harness/config.hpp"
#include "dtm/metrics/metrics.hpp"

namespace dtm::harness {

struct TradeRow {
  long t_s = 0;
  std::string seller;
  std::string buyer;
  Currency price;
  bool accepted = true;
  bool operator==(const TradeRow&) const = default;
};

struct NegotiationRow {
  std::uint64_t trade_id = 0;  // proposal id
  int round = 0;
  Currency ask;
  Currency bid;
  std::string outcome;  // agreed | failed
  bool operator==(const NegotiationRow&) const = default;
};

struct RunOutput {
  metrics::MetricReport report;
  std::vector<TradeRow> trades;
  std::vector<NegotiationRow> negotiations;
  std::string event_digest;  // SHA-256 hex over the traffic and market event log
  std::string config_echo;
  std::uint64_t seed = 0;
  metrics::RunSummary summary;
  std::vector<std::string> backend_failures;
};

/// Runs one scenario through the full pipeline: traffic ticks, vehicle
/// observations every observe_period_s, proposals, controller decisions,
/// negotiation on rejection, settlement and the one-off signal adjustment per
/// accident. `backend` overrides the configured one (tests inject fakes).
/// Throws ConfigError for an invalid config, dtm::Error for runtime failures.
RunOutput run_once(const ScenarioConfig& config, agents::DecisionBackend* backend = nullptr);

/// Same loop with scripted controller decisions instead of a backend: at a
/// scripted tick the lowest-id proposal gets the scripted answer and every
/// other proposal is rejected; unscripted proposals are rejected. No
/// negotiation. Throws ReplayError when a scripted tick sees no proposal.
RunOutput run_replay(const ReplayFixture& fixture);

/// Twin-run oracle for the configured accident observed at trade_time_s.
agents::OracleResult oracle_for_config(const ScenarioConfig& config, long trade_time_s);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

}  // namespace dtm::harness
