#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "dtm/agents/types.hpp"
#include "dtm/traffic/simulator.hpp"

namespace dtm::agents {

/// Both arms of a twin-run evaluation plus the resulting estimate.
struct OracleResult {
  double phi_baseline = 0.0;
  double phi_adjusted = 0.0;
  ValueEstimate value;
};

/// Evidence-based value of a data product: simulate the scenario twice from
/// the empty state, once on `plan` throughout and once switching to the
/// data-driven adjustment at trade_time_s, and take
/// seconds_saved = max(0, phi_baseline - phi_adjusted).
/// Throws InvalidScenario (including trade_time_s >= horizon_s), UnknownLink,
/// InvalidAdjustment.
OracleResult oracle_value(const traffic::Scenario& scenario, const traffic::SignalPlan& plan,
                          const DataProduct& product, long trade_time_s, long horizon_s, int delta_s,
                          std::uint64_t seed, double conversion_rate = kDefaultConversionRate);

/// Incremental twin-run evaluator for one scenario. It keeps a baseline
/// simulation checkpoint and forks it at each requested trade time, which
/// yields the same numbers as oracle_value (the prefix up to the trade time is
/// identical in both arms) without re-simulating the prefix. Results are
/// memoised per (link, trade time).
class OracleEvaluator {
 public:
  OracleEvaluator(std::shared_ptr<const traffic::Scenario> scenario, traffic::SignalPlan plan, long horizon_s,
                  std::uint64_t seed, int delta_s, double conversion_rate = kDefaultConversionRate);

  OracleResult evaluate(const DataProduct& product, long trade_time_s);
  double phi_baseline();

 private:
  std::shared_ptr<const traffic::Scenario> scenario_;
  traffic::SignalPlan plan_;
  long horizon_s_;
  std::uint64_t seed_;
  int delta_s_;
  double conversion_rate_;
  traffic::Simulator checkpoint_;
  std::optional<double> phi_baseline_;
  std::map<std::pair<std::uint32_t, long>, OracleResult> memo_;
};

}  // namespace dtm::agents
