#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtm/agents/backend.hpp"
#include "dtm/traffic/simulator.hpp"

namespace dtm::harness {

struct NetworkConfig {
  int rows = 3;
  int cols = 3;
  double link_length_m = 500.0;
  int lanes = 3;
  double free_speed_mps = traffic::kDefaultFreeSpeedMps;
  double saturation_vps_per_lane = 0.5;
  bool operator==(const NetworkConfig&) const = default;
};

struct DemandConfig {
  double flow_vph = 220.0;
  std::optional<std::uint64_t> seed;  // falls back to run.seed
  bool operator==(const DemandConfig&) const = default;
};

struct AccidentConfig {
  std::optional<std::uint32_t> link;  // none = southbound approach of the centre intersection
  double start_s = 200.0;
  double end_s = 700.0;
  double severity = 0.5;
  double position_m = 400.0;
  bool operator==(const AccidentConfig&) const = default;
};

struct SignalConfig {
  int cycle_s = 60;
  int green_ns_s = 30;
  int green_ew_s = 30;
  int offset_s = 0;
  int adjustment_delta_s = 3;
  bool operator==(const SignalConfig&) const = default;
};

struct AgentConfig {
  agents::Risk risk = agents::Risk::conservative;
  agents::Sensitivity sensitivity = agents::Sensitivity::high;
  Currency endowment;
  bool operator==(const AgentConfig&) const = default;
};

struct AgentsConfig {
  AgentConfig controller{agents::Risk::conservative, agents::Sensitivity::high, Currency::from_cents(10000)};
  AgentConfig vehicle{agents::Risk::conservative, agents::Sensitivity::high, Currency::from_cents(3000)};
  bool operator==(const AgentsConfig&) const = default;
};

struct MarketConfig {
  Currency proposal_fee = Currency::from_cents(100);
  int observe_period_s = 5;
  double observation_radius_m = traffic::kObservationRadiusM;
  bool operator==(const MarketConfig&) const = default;
};

struct PricingConfig {
  double w = 0.5;
  double conversion_rate = 1.0;
  double aggressive_multiplier = 1.3;
  double ask_markup_aggressive = 1.5;
  double ask_markup_conservative = 1.1;
  Currency concession_step = Currency::from_cents(100);
  int max_rounds = 5;
  bool operator==(const PricingConfig&) const = default;
};

enum class BackendMode { rule, llm };

struct BackendConfig {
  BackendMode mode = BackendMode::rule;
  std::string base_url;  // empty = DTM_LLM_BASE_URL or the public default
  std::string model{llm::kDefaultModel};
  double timeout_s = 30.0;
  int retries = 2;
  agents::OnError on_error = agents::OnError::reject;
  bool operator==(const BackendConfig&) const = default;
};

struct RunConfig {
  long horizon_s = 1000;
  std::uint64_t seed = 1;
  bool operator==(const RunConfig&) const = default;
};

/// Every knob of one scenario. Default-constructed = the reference scenario.
struct ScenarioConfig {
  NetworkConfig network;
  DemandConfig demand;
  AccidentConfig accident;
  SignalConfig signal;
  AgentsConfig agents;
  MarketConfig market;
  PricingConfig pricing;
  BackendConfig backend;
  RunConfig run;

  bool operator==(const ScenarioConfig&) const = default;

  std::uint64_t demand_seed() const { return demand.seed.value_or(run.seed); }
  agents::PricingParams pricing_params() const;
  agents::AgentProfile controller_profile() const;
  agents::AgentProfile vehicle_profile(std::string id) const;

  traffic::RoadNetwork build_network() const;
  /// Resolves accident.link (auto = centre southbound approach).
  LinkId accident_link(const traffic::RoadNetwork& net) const;
  traffic::Scenario build_scenario() const;
  traffic::SignalPlan build_plan(const traffic::RoadNetwork& net) const;
  llm::EndpointConfig endpoint() const;
};

/// Range checks. Throws ConfigError(config_range_error) naming the key.
void validate(const ScenarioConfig& config);

/// Flat key=value text, one per line, '#' starts a comment. Unknown keys,
/// duplicates, lines without '=' and unparseable values throw
/// ConfigError(config_parse_error) with the 1-based line; out-of-range values
/// throw ConfigError(config_range_error) with the key.
ScenarioConfig parse_config(std::string_view text);

/// Throws ConfigError(config_parse_error, line 0) when the file is unreadable.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Every key with its current value in canonical order; parse_config of the
/// result reproduces the config.
std::string echo_config(const ScenarioConfig& config);

/// Keys accepted by parse_config, canonical order.
std::vector<std::string_view> config_keys();

/// Scripted controller decision for the replay fixture.
struct ReplayDecision {
  long t_s = 0;
  bool accept = false;
  Currency price;
  bool operator==(const ReplayDecision&) const = default;
};

struct ReplayFixture {
  ScenarioConfig config;
  std::vector<ReplayDecision> decisions;  // ascending t_s
};

/// Config keys plus any number of `replay.decision=t,accept|reject,price` lines.
ReplayFixture parse_replay_fixture(std::string_view text);
ReplayFixture load_replay_fixture(const std::filesystem::path& path);

}  // namespace dtm::harness
