#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtm/agents/backend.hpp"
#include "dtm/agents/valuation.hpp"
#include "dtm/error.hpp"
#include "mock_llm_server.hpp"

using namespace dtm;
using namespace dtm::agents;

namespace {

AgentProfile controller(Risk r, Sensitivity s) { return {"controller", Role::controller, r, s, Currency::from_cents(10000)}; }

bool accepts(Risk r, Sensitivity s, double value, std::int64_t offer_cents) {
  const auto p = controller(r, s);
  const auto v = make_estimate(value);
  const auto req = make_decision_request(p, v, Currency::from_cents(offer_cents));
  return rule_decide(p, req, v, {}).decision;
}

// Written out independently of effective_value/acceptance_threshold.
bool threshold_oracle(Risk r, Sensitivity s, double value, std::int64_t offer_cents) {
  const double ve = s == Sensitivity::low ? 5.0 * std::round(value / 5.0) : value;
  const double m = r == Risk::aggressive ? 1.3 : 1.0;
  return static_cast<double>(offer_cents) <= std::round(m * ve * 100.0);
}

traffic::Scenario miniature(double severity) {
  traffic::Scenario sc;
  sc.network = traffic::build_grid(1, 1, 500, 2);
  sc.flow_vph = 1200;
  for (const auto& l : sc.network.links())
    if (l.heading == traffic::Heading::south && l.is_entry) sc.accidents.push_back({l.id, 0, 600, severity, 400});
  return sc;
}

}  // namespace

TEST(RuleDecide, ReferenceCaseRejects) {
  const auto p = controller(Risk::conservative, Sensitivity::low);
  const auto v = make_estimate(10);
  const auto r = rule_decide(p, make_decision_request(p, v, Currency::from_cents(1200)), v, {});
  EXPECT_FALSE(r.decision);
  EXPECT_NE(r.reason.find("profit less than the offer price"), std::string::npos);
}

TEST(RuleDecide, PreferenceGridAtTwelve) {
  // Thresholds: conservative 10, aggressive 13; low sensitivity keeps 10.
  EXPECT_FALSE(accepts(Risk::conservative, Sensitivity::high, 10, 1200));
  EXPECT_FALSE(accepts(Risk::conservative, Sensitivity::low, 10, 1200));
  EXPECT_TRUE(accepts(Risk::aggressive, Sensitivity::high, 10, 1200));
  EXPECT_TRUE(accepts(Risk::aggressive, Sensitivity::low, 10, 1200));
}

TEST(RuleDecide, ZeroOfferAlwaysAccepted) {
  for (auto r : {Risk::aggressive, Risk::conservative})
    for (auto s : {Sensitivity::high, Sensitivity::low})
      for (double v : {0.0, 0.4, 7.0, 100.0}) EXPECT_TRUE(accepts(r, s, v, 0));
}

TEST(RuleDecide, ReasonIsNeverEmpty) {
  for (std::int64_t offer : {0, 500, 5000}) {
    const auto p = controller(Risk::conservative, Sensitivity::high);
    const auto v = make_estimate(10);
    EXPECT_FALSE(rule_decide(p, make_decision_request(p, v, Currency::from_cents(offer)), v, {}).reason.empty());
  }
}

TEST(RuleDecide, MatchesIndependentThreshold) {
  for (auto r : {Risk::aggressive, Risk::conservative})
    for (auto s : {Sensitivity::high, Sensitivity::low})
      for (int v2 = 0; v2 <= 40; ++v2)
        for (std::int64_t offer = 0; offer <= 3000; offer += 25)
          ASSERT_EQ(accepts(r, s, v2 / 2.0, offer), threshold_oracle(r, s, v2 / 2.0, offer))
              << to_string(r) << "/" << to_string(s) << " V=" << v2 / 2.0 << " offer=" << offer;
}

TEST(RuleDecideProperties, MonotoneInPrice) {
  std::mt19937 rng(17);
  for (int i = 0; i < 500; ++i) {
    const auto r = rng() % 2 ? Risk::aggressive : Risk::conservative;
    const auto s = rng() % 2 ? Sensitivity::high : Sensitivity::low;
    const double v = static_cast<double>(rng() % 4000) / 100.0;
    bool seen_reject = false;
    for (std::int64_t offer = 0; offer <= 6000; offer += 10) {
      const bool a = accepts(r, s, v, offer);
      if (seen_reject) ASSERT_FALSE(a) << "accepted at " << offer << " after a cheaper rejection";
      seen_reject = seen_reject || !a;
    }
  }
}

TEST(RuleDecideProperties, AggressiveDominatesConservative) {
  for (auto s : {Sensitivity::high, Sensitivity::low})
    for (int v2 = 0; v2 <= 60; ++v2)
      for (std::int64_t offer = 0; offer <= 4000; offer += 50)
        if (accepts(Risk::conservative, s, v2 / 2.0, offer)) ASSERT_TRUE(accepts(Risk::aggressive, s, v2 / 2.0, offer));
}

TEST(RuleDecideProperties, LowSensitivityIsConstantOnRoundingBins) {
  for (auto r : {Risk::aggressive, Risk::conservative})
    for (std::int64_t offer = 0; offer <= 2000; offer += 10) {
      EXPECT_EQ(accepts(r, Sensitivity::low, 8, offer), accepts(r, Sensitivity::low, 9, offer));
      EXPECT_EQ(accepts(r, Sensitivity::low, 8, offer), accepts(r, Sensitivity::low, 10, offer));
      EXPECT_EQ(accepts(r, Sensitivity::low, 12.4, offer), accepts(r, Sensitivity::low, 7.6, offer));
    }
}

TEST(SellerAsk, Markups) {
  const MarketObservation obs;
  const auto v = make_estimate(10);
  EXPECT_EQ(seller_initial_ask(controller(Risk::conservative, Sensitivity::high), v, obs), Currency::from_cents(1100));
  EXPECT_EQ(seller_initial_ask(controller(Risk::aggressive, Sensitivity::high), v, obs), Currency::from_cents(1500));
  EXPECT_EQ(seller_initial_ask(controller(Risk::aggressive, Sensitivity::high), make_estimate(0), obs),
            Currency::from_cents(101));
  // low sensitivity: 8 -> 10 before the markup
  EXPECT_EQ(seller_initial_ask(controller(Risk::conservative, Sensitivity::low), make_estimate(8), obs),
            Currency::from_cents(1100));
}

TEST(Estimate, ClampsAndConverts) {
  EXPECT_DOUBLE_EQ(make_estimate(-3).seconds_saved, 0.0);
  EXPECT_DOUBLE_EQ(make_estimate(4, 2.5).currency_value, 10.0);
}

TEST(DecisionRequest, FieldOrderAndText) {
  const auto p = controller(Risk::conservative, Sensitivity::low);
  const auto j = make_decision_request(p, make_estimate(10), Currency::from_cents(1200)).to_json();
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"background", "risk_preference", "data_sensitivity",
                                            "expected_data_value", "offer_price"}));
  EXPECT_EQ(j["offer_price"], "The data is offered at 12 dollars.");
  EXPECT_EQ(j["risk_preference"], "My risk preference is conservative.");
  EXPECT_EQ(j["expected_data_value"], "I expect the data to decrease average delay by 10 seconds");
  EXPECT_EQ(format_amount(12.5), "12.5");
  EXPECT_EQ(format_amount(3.456), "3.46");
  EXPECT_EQ(format_amount(0), "0");
}

TEST(ObserveMarket, WindowsAreTimeOrdered) {
  market::TradeLedger l;
  l.register_agent("s", Currency::from_cents(100000));
  l.register_agent("b", Currency::from_cents(100000));
  for (int i = 0; i < 8; ++i) {
    const auto id = l.submit_proposal("s", {LinkId{1}, 0, static_cast<double>(i)}, Currency::from_cents(100 * i), i);
    if (i % 2) l.settle(id, "b", Currency::from_cents(100 * i), i);
    else l.reject(id, "b", i);
  }
  l.submit_proposal("s", {LinkId{1}, 0, 9.0}, Currency::from_cents(1), 9);
  const auto obs = observe_market(l, 100, 3);
  EXPECT_EQ(obs.open_proposals, 1u);
  EXPECT_EQ(obs.recent_trade_prices,
            (std::vector<Currency>{Currency::from_cents(300), Currency::from_cents(500), Currency::from_cents(700)}));
  EXPECT_EQ(obs.recent_rejection_prices,
            (std::vector<Currency>{Currency::from_cents(200), Currency::from_cents(400), Currency::from_cents(600)}));
}

TEST(Oracle, ZeroDeltaIsWorthless) {
  const auto sc = miniature(0.9);
  const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
  const DataProduct p{sc.accidents[0].link, 400, 100, 0.9, 900};
  const auto r = oracle_value(sc, plan, p, 100, 600, 0, 1);
  EXPECT_DOUBLE_EQ(r.phi_baseline, r.phi_adjusted);
  EXPECT_DOUBLE_EQ(r.value.seconds_saved, 0.0);
}

TEST(Oracle, NoVehicleReachesTheApproachBeforeHorizon) {
  // Free-flow time is 36 s, so nobody queues within a 30 s horizon.
  const auto sc = miniature(0.9);
  const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
  const auto r = oracle_value(sc, plan, {sc.accidents[0].link}, 0, 30, 3, 1);
  EXPECT_DOUBLE_EQ(r.value.seconds_saved, 0.0);
}

TEST(Oracle, LongerGreenDrainsAStandingQueue) {
  // Two lanes at half severity leave one effective lane: 15 discharges per
  // 30 s green (16 per 33 s) against 20 arrivals per cycle from the north, so
  // the southbound queue grows for the whole window. The cross street serves
  // 27 per 27 s green against 20 and stays undersaturated.
  const auto sc = miniature(0.5);
  const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
  const DataProduct p{sc.accidents[0].link, 400, 60, 0.5, 1200};
  const auto r = oracle_value(sc, plan, p, 60, 600, 3, 1);
  EXPECT_GT(r.value.seconds_saved, 0.0);

  // Same twin run done by hand with the simulator.
  auto shared = std::make_shared<const traffic::Scenario>(sc);
  traffic::Simulator base(shared, plan, 600, 1, false);
  base.run_until(600);
  traffic::Simulator treated(shared, plan, 600, 1, false);
  treated.run_until(60);
  treated.set_plan(traffic::apply_data_driven_adjustment(sc.network, plan, p, 3));
  treated.run_until(600);
  const auto mean = [](const traffic::SimResult& res) {
    double s = 0;
    for (double w : res.waits) s += w;
    return s / static_cast<double>(res.n);
  };
  EXPECT_NEAR(r.phi_baseline, mean(base.result()), 1e-9);
  EXPECT_NEAR(r.phi_adjusted, mean(treated.result()), 1e-9);
}

TEST(Oracle, EvaluatorMatchesDirectTwinRun) {
  const auto sc = miniature(0.9);
  const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
  OracleEvaluator ev(std::make_shared<const traffic::Scenario>(sc), plan, 600, 4, 3);
  for (long t : {0L, 55L, 120L, 300L, 595L}) {
    const DataProduct p{sc.accidents[0].link, 400, static_cast<double>(t)};
    const auto direct = oracle_value(sc, plan, p, t, 600, 3, 4);
    const auto fast = ev.evaluate(p, t);
    EXPECT_DOUBLE_EQ(direct.phi_baseline, fast.phi_baseline);
    EXPECT_DOUBLE_EQ(direct.phi_adjusted, fast.phi_adjusted);
    EXPECT_DOUBLE_EQ(direct.value.seconds_saved, fast.value.seconds_saved);
  }
}

TEST(Oracle, TradeTimeMustPrecedeHorizon) {
  const auto sc = miniature(0.5);
  const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
  try {
    oracle_value(sc, plan, {sc.accidents[0].link}, 600, 600, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_scenario);
  }
}

TEST(OracleProperties, DeterministicAndNonnegative) {
  std::mt19937 rng(23);
  for (int i = 0; i < 10; ++i) {
    auto sc = miniature(0.1 * static_cast<double>(rng() % 11));
    sc.flow_vph = 100 + rng() % 1000;
    const auto plan = traffic::SignalPlan::uniform(sc.network, 60, 30, 30);
    const long t = static_cast<long>(rng() % 400);
    const auto a = oracle_value(sc, plan, {sc.accidents[0].link}, t, 500, 3, i);
    const auto b = oracle_value(sc, plan, {sc.accidents[0].link}, t, 500, 3, i);
    EXPECT_GE(a.value.seconds_saved, 0.0);
    EXPECT_EQ(a.phi_adjusted, b.phi_adjusted);
    EXPECT_EQ(a.value.seconds_saved, b.value.seconds_saved);
  }
}

TEST(Backend, RuleDispatchIsRuleDecide) {
  RuleBackend backend;
  const auto p = controller(Risk::aggressive, Sensitivity::low);
  for (double v : {0.0, 9.0, 31.0}) {
    const auto est = make_estimate(v);
    const auto req = make_decision_request(p, est, Currency::from_cents(1200));
    EXPECT_EQ(decide(backend, p, req, est, {}), rule_decide(p, req, est, {}));
  }
}

TEST(Backend, LlmAgainstReferenceReply) {
  mock::MockLlmServer server;
  llm::EndpointConfig ep;
  ep.base_url = server.base_url();
  ep.api_key = "test-key";
  LlmBackend backend(ep);
  const auto p = controller(Risk::conservative, Sensitivity::low);
  const auto v = make_estimate(10);
  const auto r = decide(backend, p, make_decision_request(p, v, Currency::from_cents(1200)), v, {});
  EXPECT_FALSE(r.decision);
  EXPECT_NE(r.reason.find("profit less than the offer price"), std::string::npos);
  EXPECT_EQ(server.hits(), 1);
  EXPECT_TRUE(backend.failures().empty());
}

TEST(Backend, LlmServerDownFallsBackToReject) {
  std::string url;
  {
    mock::MockLlmServer gone;
    url = gone.base_url();
  }
  llm::EndpointConfig ep;
  ep.base_url = url;
  ep.api_key = "secret-key-123";
  ep.retries = 0;
  ep.timeout = std::chrono::milliseconds(500);
  LlmBackend backend(ep);
  const auto p = controller(Risk::conservative, Sensitivity::low);
  const auto v = make_estimate(10);
  const auto req = make_decision_request(p, v, Currency::from_cents(0));
  try {
    backend.try_decide(req);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::backend_unavailable);
  }
  const auto r = decide(backend, p, req, v, {});
  EXPECT_FALSE(r.decision);
  EXPECT_EQ(r.reason, kBackendUnavailableReason);
  ASSERT_FALSE(backend.failures().empty());
  for (const auto& f : backend.failures()) EXPECT_EQ(f.find("secret-key-123"), std::string::npos);
}

TEST(Backend, RetryThenRejectMakesTwoAttempts) {
  mock::MockLlmServer server("{}", 500);
  llm::EndpointConfig ep;
  ep.base_url = server.base_url();
  ep.api_key = "k";
  ep.retries = 0;
  LlmBackend backend(ep, std::string(llm::kDefaultModel), OnError::retry_reject);
  const auto p = controller(Risk::conservative, Sensitivity::low);
  const auto v = make_estimate(10);
  const auto r = decide(backend, p, make_decision_request(p, v, Currency::from_cents(1200)), v, {});
  EXPECT_EQ(r.reason, kBackendUnavailableReason);
  EXPECT_EQ(server.hits(), 2);
  EXPECT_EQ(backend.failures().size(), 2u);
}

TEST(Backend, OnErrorNames) {
  EXPECT_EQ(parse_on_error("reject"), OnError::reject);
  EXPECT_EQ(parse_on_error("retry_reject"), OnError::retry_reject);
  EXPECT_FALSE(parse_on_error("retry"));
  EXPECT_EQ(to_string(OnError::retry_reject), "retry_reject");
}
