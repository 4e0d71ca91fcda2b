#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dtm/agents/types.hpp"
#include "dtm/traffic/simulator.hpp"

namespace dtm::metrics {

/// Phi = sum(phi_i) / n over every spawned vehicle. Throws EmptyPopulation.
double average_waiting_time(const traffic::SimResult& result);
double average_waiting_time(std::span<const double> waits);

/// delta_phi = phi_treated - phi_baseline (negative when waiting drops);
/// improvement_pct = 100 * (phi_baseline - phi_treated) / phi_baseline
/// (positive when waiting drops, 0 when phi_baseline is 0).
struct MetricReport {
  double phi_baseline = 0.0;
  double phi_treated = 0.0;
  double delta_phi = 0.0;
  double improvement_pct = 0.0;
  Currency total_spend;
  std::size_t trades = 0;
};

MetricReport make_report(double phi_baseline, double phi_treated, Currency total_spend = {}, std::size_t trades = 0);

/// Throws EmptyPopulation when either side has no vehicles, InvalidArgument
/// when the populations differ in size (not the same scenario).
MetricReport delta_phi(const traffic::SimResult& baseline, const traffic::SimResult& treated);

/// What one run contributes to the sweep tables.
struct RunSummary {
  agents::Risk risk = agents::Risk::conservative;
  agents::Sensitivity sensitivity = agents::Sensitivity::high;
  double flow_vph = 0.0;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::vector<Currency> prices;  // settled trades, in settlement order
  double improvement_pct = 0.0;
};

struct AcceptanceRow {
  agents::Risk risk = agents::Risk::conservative;
  agents::Sensitivity sensitivity = agents::Sensitivity::high;
  double flow_vph = 0.0;
  double accept_probability = 0.0;
  std::optional<double> mean_price;  // none without trades
  double mean_improvement_pct = 0.0;
};

/// One row per (risk, sensitivity, flow) in first-appearance order; cells
/// without proposals are omitted.
std::vector<AcceptanceRow> acceptance_table(std::span<const RunSummary> runs);

struct PriceValueRow {
  Currency achieved_price;
  double improvement_pct = 0.0;
  agents::Risk risk = agents::Risk::conservative;
  agents::Sensitivity sensitivity = agents::Sensitivity::high;
};

/// One row per settled trade, runs in order.
std::vector<PriceValueRow> price_value_table(std::span<const RunSummary> runs);

/// Population standard deviation; 0 for fewer than two values.
double stddev(std::span<const double> values);

struct ConvergenceCheck {
  std::size_t trades = 0;
  std::size_t quartile = 0;  // trades per tail
  double sd_top = 0.0;       // achieved_price sd among the highest-improvement quarter
  double sd_bottom = 0.0;    // and among the lowest
  bool evaluable = false;    // at least two trades per tail
  bool holds = false;        // evaluable && sd_top <= sd_bottom
};

/// Rows are ranked by improvement_pct (stable); each tail holds floor(n / 4).
ConvergenceCheck price_convergence(std::span<const PriceValueRow> rows);

}  // namespace dtm::metrics
