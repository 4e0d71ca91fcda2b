#include "dtm/harness/run.hpp"

#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "dtm/error.hpp"
#include "dtm/negotiation/negotiation.hpp"

namespace dtm::harness {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

namespace {

constexpr std::string_view kController = "controller";

struct Pending {
  ProposalId id;
  agents::AgentProfile seller;
  agents::ValueEstimate seller_value;
  Currency ask;
};

// One scenario's mutable world: traffic, ledger, oracle and the output being built.
class Engine {
 public:
  explicit Engine(const ScenarioConfig& cfg)
      : cfg_(cfg),
        scenario_(std::make_shared<const traffic::Scenario>(cfg.build_scenario())),
        base_plan_(cfg.build_plan(scenario_->network)),
        sim_(scenario_, base_plan_, cfg.run.horizon_s, cfg.demand_seed(), true),
        oracle_(scenario_, base_plan_, cfg.run.horizon_s, cfg.demand_seed(), cfg.signal.adjustment_delta_s,
                cfg.pricing.conversion_rate),
        ledger_(cfg.market.proposal_fee),
        params_(cfg.pricing_params()),
        controller_(cfg.controller_profile()) {
    ledger_.register_agent(controller_.id, controller_.endowment);
    out_.config_echo = echo_config(cfg);
    out_.seed = cfg.run.seed;
  }

  template <class Resolve>
  RunOutput run(Resolve&& resolve) {
    const long horizon = cfg_.run.horizon_s;
    while (sim_.state().clock_s < horizon) {
      sim_.step();
      const long now = sim_.state().clock_s;
      if (now >= horizon || now % cfg_.market.observe_period_s != 0) continue;
      auto pending = collect_proposals(now);
      resolve(*this, now, pending);
    }
    return finish();
  }

  const ScenarioConfig& config() const { return cfg_; }
  const agents::AgentProfile& controller() const { return controller_; }
  const agents::PricingParams& params() const { return params_; }
  RunOutput& output() { return out_; }

  /// The controller's value for data about `link`: the oracle against the
  /// static plan until it has acted on that accident, nothing afterwards.
  agents::ValueEstimate buyer_value(LinkId link, long now) {
    if (acted_.contains(link.value)) return agents::make_estimate(0.0, cfg_.pricing.conversion_rate);
    return oracle_.evaluate(DataProduct{link, 0.0, static_cast<double>(now), 0.0, 0.0}, now).value;
  }

  LinkId link_of(ProposalId id) const { return ledger_.proposal(id).digest.link_id; }

  agents::MarketObservation observe(long now) const { return agents::observe_market(ledger_, static_cast<double>(now)); }

  /// Settles when the controller can pay; otherwise the proposal is rejected.
  bool settle(const Pending& p, Currency price, long now) {
    if (ledger_.balance(controller_.id) < price) {
      reject(p, now);
      return false;
    }
    const auto trade = ledger_.settle(p.id, controller_.id, price, static_cast<double>(now));
    market_log_ += fmt::format("{} settle {} {} {}\n", now, p.id.value, p.seller.id, price.str());
    out_.trades.push_back({now, p.seller.id, controller_.id, price, true});
    out_.summary.prices.push_back(price);
    if (acted_.insert(trade.delivered.link_id.value).second) {
      sim_.set_plan(traffic::apply_data_driven_adjustment(scenario_->network, sim_.plan(), trade.delivered,
                                                          cfg_.signal.adjustment_delta_s));
      market_log_ += fmt::format("{} adjust {}\n", now, trade.delivered.link_id.value);
    }
    return true;
  }

  void reject(const Pending& p, long now) {
    ledger_.reject(p.id, controller_.id, static_cast<double>(now));
    market_log_ += fmt::format("{} reject {}\n", now, p.id.value);
  }

  void record(const Pending& p, const negotiation::NegotiationTranscript& t) {
    for (const auto& r : t.rounds)
      out_.negotiations.push_back({p.id.value, r.number, r.ask, r.bid, negotiation::to_string(t.outcome)});
  }

 private:
  std::vector<Pending> collect_proposals(long now) {
    std::vector<Pending> pending;
    const auto& state = sim_.state();
    for (std::size_t i = 0; i < state.vehicles.size(); ++i) {
      const VehicleId vid{static_cast<std::uint32_t>(i)};
      auto product = traffic::observe_accident(state, scenario_->network, vid, scenario_->accidents,
                                               cfg_.market.observation_radius_m);
      if (!product) continue;
      auto seller = cfg_.vehicle_profile(fmt::format("v{}", i));
      if (!ledger_.has_agent(seller.id)) ledger_.register_agent(seller.id, seller.endowment);
      if (ledger_.balance(seller.id) < ledger_.proposal_fee()) continue;

      const auto value = oracle_.evaluate(*product, now).value;
      const Currency ask = agents::seller_initial_ask(seller, value, observe(now), params_);
      const auto id = ledger_.submit_proposal(seller.id, *product, ask, static_cast<double>(now));
      market_log_ += fmt::format("{} propose {} {} {}\n", now, id.value, seller.id, ask.str());
      pending.push_back({id, std::move(seller), value, ask});
    }
    return pending;
  }

  RunOutput finish() {
    ledger_.expire_open(static_cast<double>(cfg_.run.horizon_s));
    if (!ledger_.conserves())
      throw std::logic_error(fmt::format("ledger out of balance: {} circulating vs {} endowed",
                                         ledger_.circulating().str(), ledger_.total_endowment().str()));

    const auto result = sim_.result();
    const double phi_treated = metrics::average_waiting_time(result);
    const double phi_baseline = oracle_.phi_baseline();
    Currency spend;
    for (const auto& t : out_.trades) spend += t.price;
    out_.report = metrics::make_report(phi_baseline, phi_treated, spend, out_.trades.size());

    out_.summary.risk = controller_.risk;
    out_.summary.sensitivity = controller_.sensitivity;
    out_.summary.flow_vph = cfg_.demand.flow_vph;
    out_.summary.proposals = ledger_.proposals().size();
    out_.summary.accepted = out_.trades.size();
    out_.summary.improvement_pct = out_.report.improvement_pct;

    std::string log;
    for (const auto& e : result.events) {
      log += fmt::format("{} {} {} {}\n", e.t_s, traffic::to_string(e.kind),
                         e.vehicle ? static_cast<long>(e.vehicle->value) : -1L,
                         e.link ? static_cast<long>(e.link->value) : -1L);
    }
    log += market_log_;
    out_.event_digest = sha256_hex(log);
    return std::move(out_);
  }

  ScenarioConfig cfg_;
  std::shared_ptr<const traffic::Scenario> scenario_;
  traffic::SignalPlan base_plan_;
  traffic::Simulator sim_;
  agents::OracleEvaluator oracle_;
  market::TradeLedger ledger_;
  agents::PricingParams params_;
  agents::AgentProfile controller_;
  std::set<std::uint32_t> acted_;
  std::string market_log_;
  RunOutput out_;
};

std::unique_ptr<agents::DecisionBackend> make_backend(const ScenarioConfig& cfg) {
  if (cfg.backend.mode == BackendMode::llm)
    return std::make_unique<agents::LlmBackend>(cfg.endpoint(), cfg.backend.model, cfg.backend.on_error);
  return std::make_unique<agents::RuleBackend>(cfg.pricing_params());
}

}  // namespace

RunOutput run_once(const ScenarioConfig& config, agents::DecisionBackend* backend) {
  validate(config);
  std::unique_ptr<agents::DecisionBackend> owned;
  if (!backend) {
    owned = make_backend(config);
    backend = owned.get();
  }

  Engine engine(config);
  auto out = engine.run([backend](Engine& e, long now, std::vector<Pending>& pending) {
    const auto& cfg = e.config();
    for (const auto& p : pending) {
      const auto v_b = e.buyer_value(e.link_of(p.id), now);
      const auto request = agents::make_decision_request(e.controller(), v_b, p.ask);
      const auto response = agents::decide(*backend, e.controller(), request, v_b, e.observe(now));

      negotiation::NegotiationTranscript t;
      if (response.decision) {
        t.buyer = e.controller().id;
        t.seller = p.seller.id;
        t.opening_ask = t.opening_bid = p.ask;
        t.max_rounds = cfg.pricing.max_rounds;
        t.rounds.push_back({1, p.ask, p.ask, true, true});
        t.outcome = negotiation::Outcome::agreed;
        t.agreed_price = p.ask;
      } else {
        t = negotiation::run_negotiation({e.controller(), v_b}, {p.seller, p.seller_value}, p.ask,
                                         cfg.pricing.max_rounds, cfg.pricing.concession_step, e.params());
      }
      e.record(p, t);
      if (t.agreed()) e.settle(p, negotiation::final_price(cfg.pricing.w, v_b, t), now);
      else e.reject(p, now);
    }
  });
  if (auto* llm = dynamic_cast<agents::LlmBackend*>(backend)) out.backend_failures = llm->failures();
  return out;
}

RunOutput run_replay(const ReplayFixture& fixture) {
  validate(fixture.config);
  std::size_t next = 0;
  Engine engine(fixture.config);
  auto out = engine.run([&](Engine& e, long now, std::vector<Pending>& pending) {
    if (next < fixture.decisions.size() && fixture.decisions[next].t_s < now)
      throw Error(Errc::replay_error,
                  fmt::format("scripted decision at t={} is not an observation tick", fixture.decisions[next].t_s));
    const ReplayDecision* script = nullptr;
    if (next < fixture.decisions.size() && fixture.decisions[next].t_s == now) script = &fixture.decisions[next++];
    if (script && pending.empty())
      throw Error(Errc::replay_error, fmt::format("scripted decision at t={} but no proposal is open", now));

    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& p = pending[i];
      if (i == 0 && script && script->accept) {
        e.record(p, [&] {
          negotiation::NegotiationTranscript t;
          t.rounds.push_back({1, script->price, script->price, true, true});
          t.outcome = negotiation::Outcome::agreed;
          t.agreed_price = script->price;
          return t;
        }());
        if (!e.settle(p, script->price, now))
          throw Error(Errc::replay_error, fmt::format("controller cannot pay {} at t={}", script->price.str(), now));
      } else {
        e.reject(p, now);
      }
    }
  });
  if (next < fixture.decisions.size())
    throw Error(Errc::replay_error,
                fmt::format("scripted decision at t={} never reached", fixture.decisions[next].t_s));
  return out;
}

agents::OracleResult oracle_for_config(const ScenarioConfig& config, long trade_time_s) {
  validate(config);
  const auto scenario = config.build_scenario();
  const auto& acc = scenario.accidents.front();
  const DataProduct product{acc.link, acc.position_m, static_cast<double>(trade_time_s), acc.severity,
                            config.demand.flow_vph};
  return agents::oracle_value(scenario, config.build_plan(scenario.network), product, trade_time_s,
                              config.run.horizon_s, config.signal.adjustment_delta_s, config.demand_seed(),
                              config.pricing.conversion_rate);
}

}  // namespace dtm::harness
