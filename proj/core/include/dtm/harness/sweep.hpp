#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtm/harness/run.hpp"

namespace dtm::harness {

/// Cross product flows x risks x sensitivities over a base config. Only the
/// controller's preferences vary between cells.
struct SweepSpec {
  ScenarioConfig base;
  std::vector<double> flows{100, 200, 300, 400, 500};
  std::vector<agents::Risk> risks{agents::Risk::aggressive, agents::Risk::conservative};
  std::vector<agents::Sensitivity> sensitivities{agents::Sensitivity::high, agents::Sensitivity::low};
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct SweepCell {
  double flow_vph = 0.0;
  agents::Risk risk = agents::Risk::conservative;
  agents::Sensitivity sensitivity = agents::Sensitivity::high;
  std::optional<RunOutput> output;
  std::optional<std::string> error;
};

struct SweepOutput {
  std::vector<SweepCell> cells;  // flow-major, then risk, then sensitivity

  std::vector<metrics::RunSummary> summaries() const;  // successful cells only
};

/// Runs every cell on its own engine, possibly concurrently; cell order in the
/// output is fixed. A failing cell records its error and the rest still run.
SweepOutput run_sweep(const SweepSpec& spec);

}  // namespace dtm::harness
