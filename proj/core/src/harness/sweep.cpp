#include "dtm/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "dtm/error.hpp"

namespace dtm::harness {

std::vector<metrics::RunSummary> SweepOutput::summaries() const {
  std::vector<metrics::RunSummary> out;
  for (const auto& c : cells)
    if (c.output) out.push_back(c.output->summary);
  return out;
}

SweepOutput run_sweep(const SweepSpec& spec) {
  if (spec.flows.empty() || spec.risks.empty() || spec.sensitivities.empty())
    throw Error(Errc::invalid_argument, "sweep needs at least one cell");

  SweepOutput out;
  for (double flow : spec.flows)
    for (auto risk : spec.risks)
      for (auto sens : spec.sensitivities) out.cells.push_back({flow, risk, sens, std::nullopt, std::nullopt});

  auto run_cell = [&spec](SweepCell& cell) {
    try {
      ScenarioConfig cfg = spec.base;
      cfg.demand.flow_vph = cell.flow_vph;
      cfg.agents.controller.risk = cell.risk;
      cfg.agents.controller.sensitivity = cell.sensitivity;
      cell.output = run_once(cfg);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(out.cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.cells.size(); i = next++) run_cell(out.cells[i]);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  return out;
}

}  // namespace dtm::harness
