#include "dtm/agents/valuation.hpp"

#include <numeric>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::agents {
namespace {

double mean_wait(const traffic::TrafficState& s) {
  if (s.vehicles.empty()) return 0.0;
  double total = 0.0;
  for (const auto& v : s.vehicles) total += v.accumulated_wait_s;
  return total / static_cast<double>(s.vehicles.size());
}

void check_times(long trade_time_s, long horizon_s) {
  if (trade_time_s < 0 || trade_time_s >= horizon_s)
    throw Error(Errc::invalid_scenario, fmt::format("trade time {} outside [0, {})", trade_time_s, horizon_s));
}

}  // namespace

OracleResult oracle_value(const traffic::Scenario& scenario, const traffic::SignalPlan& plan,
                          const DataProduct& product, long trade_time_s, long horizon_s, int delta_s,
                          std::uint64_t seed, double conversion_rate) {
  check_times(trade_time_s, horizon_s);
  const auto adjusted = traffic::apply_data_driven_adjustment(scenario.network, plan, product, delta_s);
  auto shared = std::make_shared<const traffic::Scenario>(scenario);

  traffic::Simulator baseline(shared, plan, horizon_s, seed, false);
  traffic::Simulator treated(shared, plan, horizon_s, seed, false);
  baseline.run_until(horizon_s);
  treated.run_until(trade_time_s);
  treated.set_plan(adjusted);
  treated.run_until(horizon_s);

  OracleResult r;
  r.phi_baseline = mean_wait(baseline.state());
  r.phi_adjusted = mean_wait(treated.state());
  r.value = make_estimate(r.phi_baseline - r.phi_adjusted, conversion_rate, ValueMethod::oracle,
                          static_cast<double>(trade_time_s));
  return r;
}

OracleEvaluator::OracleEvaluator(std::shared_ptr<const traffic::Scenario> scenario, traffic::SignalPlan plan,
                                 long horizon_s, std::uint64_t seed, int delta_s, double conversion_rate)
    : scenario_(std::move(scenario)),
      plan_(std::move(plan)),
      horizon_s_(horizon_s),
      seed_(seed),
      delta_s_(delta_s),
      conversion_rate_(conversion_rate),
      checkpoint_(scenario_, plan_, horizon_s_, seed_, false) {}

double OracleEvaluator::phi_baseline() {
  if (!phi_baseline_) {
    traffic::Simulator rest = checkpoint_;
    rest.run_until(horizon_s_);
    phi_baseline_ = mean_wait(rest.state());
  }
  return *phi_baseline_;
}

OracleResult OracleEvaluator::evaluate(const DataProduct& product, long trade_time_s) {
  check_times(trade_time_s, horizon_s_);
  const auto key = std::make_pair(product.link_id.value, trade_time_s);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const auto adjusted = traffic::apply_data_driven_adjustment(scenario_->network, plan_, product, delta_s_);
  traffic::Simulator fork = [&] {
    if (checkpoint_.state().clock_s <= trade_time_s) {
      checkpoint_.run_until(trade_time_s);
      return checkpoint_;
    }
    traffic::Simulator fresh(scenario_, plan_, horizon_s_, seed_, false);
    fresh.run_until(trade_time_s);
    return fresh;
  }();
  fork.set_plan(adjusted);
  fork.run_until(horizon_s_);

  OracleResult r;
  r.phi_baseline = phi_baseline();
  r.phi_adjusted = mean_wait(fork.state());
  r.value = make_estimate(r.phi_baseline - r.phi_adjusted, conversion_rate_, ValueMethod::oracle,
                          static_cast<double>(trade_time_s));
  memo_.emplace(key, r);
  return r;
}

}  // namespace dtm::agents
