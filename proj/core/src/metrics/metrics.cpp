#include "dtm/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::metrics {

double average_waiting_time(std::span<const double> waits) {
  if (waits.empty()) throw Error(Errc::empty_population, "no vehicles spawned");
  return std::accumulate(waits.begin(), waits.end(), 0.0) / static_cast<double>(waits.size());
}

double average_waiting_time(const traffic::SimResult& result) {
  if (result.n == 0) throw Error(Errc::empty_population, "no vehicles spawned");
  return average_waiting_time(std::span<const double>(result.waits));
}

MetricReport make_report(double phi_baseline, double phi_treated, Currency total_spend, std::size_t trades) {
  MetricReport r;
  r.phi_baseline = phi_baseline;
  r.phi_treated = phi_treated;
  r.delta_phi = phi_treated - phi_baseline;
  r.improvement_pct = phi_baseline > 0.0 ? 100.0 * (phi_baseline - phi_treated) / phi_baseline : 0.0;
  r.total_spend = total_spend;
  r.trades = trades;
  return r;
}

MetricReport delta_phi(const traffic::SimResult& baseline, const traffic::SimResult& treated) {
  const double before = average_waiting_time(baseline);
  const double after = average_waiting_time(treated);
  if (baseline.n != treated.n)
    throw Error(Errc::invalid_argument,
                fmt::format("populations differ ({} vs {} vehicles)", baseline.n, treated.n));
  return make_report(before, after);
}

std::vector<AcceptanceRow> acceptance_table(std::span<const RunSummary> runs) {
  struct Cell {
    AcceptanceRow row;
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    std::size_t runs = 0;
    double improvement_sum = 0.0;
    std::int64_t price_cents = 0;
    std::size_t priced = 0;
  };
  std::vector<Cell> cells;
  for (const auto& run : runs) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return std::tie(c.row.risk, c.row.sensitivity, c.row.flow_vph) ==
             std::tie(run.risk, run.sensitivity, run.flow_vph);
    });
    if (it == cells.end()) {
      Cell c;
      c.row.risk = run.risk;
      c.row.sensitivity = run.sensitivity;
      c.row.flow_vph = run.flow_vph;
      cells.push_back(c);
      it = cells.end() - 1;
    }
    it->proposals += run.proposals;
    it->accepted += run.accepted;
    it->runs += 1;
    it->improvement_sum += run.improvement_pct;
    for (const auto& p : run.prices) it->price_cents += p.cents();
    it->priced += run.prices.size();
  }

  std::vector<AcceptanceRow> rows;
  for (auto& c : cells) {
    if (c.proposals == 0) continue;
    c.row.accept_probability = static_cast<double>(c.accepted) / static_cast<double>(c.proposals);
    if (c.priced > 0) c.row.mean_price = static_cast<double>(c.price_cents) / 100.0 / static_cast<double>(c.priced);
    c.row.mean_improvement_pct = c.improvement_sum / static_cast<double>(c.runs);
    rows.push_back(c.row);
  }
  return rows;
}

std::vector<PriceValueRow> price_value_table(std::span<const RunSummary> runs) {
  std::vector<PriceValueRow> rows;
  for (const auto& run : runs)
    for (const auto& p : run.prices) rows.push_back({p, run.improvement_pct, run.risk, run.sensitivity});
  return rows;
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

ConvergenceCheck price_convergence(std::span<const PriceValueRow> rows) {
  ConvergenceCheck c;
  c.trades = rows.size();
  c.quartile = rows.size() / 4;
  c.evaluable = c.quartile >= 2;
  if (!c.evaluable) return c;

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rows[a].improvement_pct < rows[b].improvement_pct; });

  std::vector<double> bottom;
  std::vector<double> top;
  for (std::size_t i = 0; i < c.quartile; ++i) {
    bottom.push_back(rows[order[i]].achieved_price.to_double());
    top.push_back(rows[order[order.size() - 1 - i]].achieved_price.to_double());
  }
  c.sd_bottom = stddev(bottom);
  c.sd_top = stddev(top);
  c.holds = c.sd_top <= c.sd_bottom + 1e-9;
  return c;
}

}  // namespace dtm::metrics
