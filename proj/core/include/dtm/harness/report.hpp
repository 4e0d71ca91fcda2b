#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtm/harness/sweep.hpp"

namespace dtm::harness {

inline constexpr std::string_view kTradesHeader = "t_s,seller,buyer,price,accepted";
inline constexpr std::string_view kMetricsHeader = "phi_baseline,phi_treated,delta_phi,improvement_pct,total_spend,trades";
inline constexpr std::string_view kHeatmapHeader =
    "risk,sensitivity,flow_vph,accept_probability,mean_price,mean_improvement_pct";
inline constexpr std::string_view kNegotiationsHeader = "trade_id,round,ask,bid,outcome";
inline constexpr std::string_view kPriceValueHeader = "achieved_price,improvement_pct,risk,sensitivity";

/// Seconds and percentages: three decimals.
std::string format_seconds(double s);

void write_trades_csv(std::ostream& os, const std::vector<TradeRow>& trades);
void write_metrics_csv(std::ostream& os, const metrics::MetricReport& report);
void write_negotiations_csv(std::ostream& os, const std::vector<NegotiationRow>& rows);
/// Error cells print accept_probability "error" with the metric columns empty.
void write_heatmap_csv(std::ostream& os, const SweepOutput& sweep);
void write_price_value_csv(std::ostream& os, const std::vector<metrics::PriceValueRow>& rows);

/// trades.csv, metrics.csv, negotiations.csv, config.cfg and run.txt (seed,
/// event digest, proposal count) under dir, which is created if missing.
/// Throws IoError.
void write_run_output(const RunOutput& out, const std::filesystem::path& dir);

/// Reads back what write_run_output wrote. Throws IoError.
RunOutput read_run_output(const std::filesystem::path& dir);

/// heatmap.csv and price_value.csv under dir. Throws IoError.
void write_sweep_output(const SweepOutput& sweep, const std::filesystem::path& dir);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Plain comma-separated text without quoting. Throws IoError.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace dtm::harness
