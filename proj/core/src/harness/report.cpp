#include "dtm/harness/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dtm/error.hpp"

namespace dtm::harness {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::io_error, fmt::format("cannot write '{}'", path.string()));
  return os;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto p = line.find(sep);
    out.emplace_back(line.substr(0, p));
    if (p == std::string_view::npos) break;
    line = line.substr(p + 1);
  }
  return out;
}

double to_double(const std::string& s, const std::filesystem::path& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(Errc::io_error, fmt::format("'{}' in {} is not a number", s, where.string()));
  return v;
}

long to_long(const std::string& s, const std::filesystem::path& where) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(Errc::io_error, fmt::format("'{}' in {} is not an integer", s, where.string()));
  return v;
}

Currency to_money(const std::string& s, const std::filesystem::path& where) {
  auto c = Currency::parse(s);
  if (!c) throw Error(Errc::io_error, fmt::format("'{}' in {} is not an amount", s, where.string()));
  return *c;
}

const std::vector<std::string>& expect_columns(const CsvTable& t, std::string_view header,
                                               const std::filesystem::path& where) {
  if (fmt::format("{}", fmt::join(t.header, ",")) != header)
    throw Error(Errc::io_error, fmt::format("{} has an unexpected header", where.string()));
  return t.header;
}

}  // namespace

std::string format_seconds(double s) {
  auto out = fmt::format("{:.3f}", s);
  if (out == "-0.000") out = "0.000";
  return out;
}

void write_trades_csv(std::ostream& os, const std::vector<TradeRow>& trades) {
  os << kTradesHeader << '\n';
  for (const auto& t : trades)
    os << fmt::format("{},{},{},{},{}\n", t.t_s, t.seller, t.buyer, t.price.str(), t.accepted ? 1 : 0);
}

void write_metrics_csv(std::ostream& os, const metrics::MetricReport& r) {
  os << kMetricsHeader << '\n';
  os << fmt::format("{},{},{},{},{},{}\n", format_seconds(r.phi_baseline), format_seconds(r.phi_treated),
                    format_seconds(r.delta_phi), format_seconds(r.improvement_pct), r.total_spend.str(), r.trades);
}

void write_negotiations_csv(std::ostream& os, const std::vector<NegotiationRow>& rows) {
  os << kNegotiationsHeader << '\n';
  for (const auto& r : rows)
    os << fmt::format("{},{},{},{},{}\n", r.trade_id, r.round, r.ask.str(), r.bid.str(), r.outcome);
}

void write_heatmap_csv(std::ostream& os, const SweepOutput& sweep) {
  os << kHeatmapHeader << '\n';
  for (const auto& cell : sweep.cells) {
    const auto risk = agents::to_string(cell.risk);
    const auto sens = agents::to_string(cell.sensitivity);
    const auto flow = fmt::format("{}", cell.flow_vph);
    if (!cell.output) {
      os << fmt::format("{},{},{},error,,\n", risk, sens, flow);
      continue;
    }
    const metrics::RunSummary summary = cell.output->summary;
    for (const auto& row : metrics::acceptance_table(std::span<const metrics::RunSummary>(&summary, 1))) {
      os << fmt::format("{},{},{},{},{},{}\n", risk, sens, flow, fmt::format("{:.3f}", row.accept_probability),
                        row.mean_price ? fmt::format("{:.2f}", *row.mean_price) : std::string(),
                        format_seconds(row.mean_improvement_pct));
    }
  }
}

void write_price_value_csv(std::ostream& os, const std::vector<metrics::PriceValueRow>& rows) {
  os << kPriceValueHeader << '\n';
  for (const auto& r : rows)
    os << fmt::format("{},{},{},{}\n", r.achieved_price.str(), format_seconds(r.improvement_pct),
                      agents::to_string(r.risk), agents::to_string(r.sensitivity));
}

void write_run_output(const RunOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  {
    auto os = open_out(dir / "trades.csv");
    write_trades_csv(os, out.trades);
  }
  {
    auto os = open_out(dir / "metrics.csv");
    write_metrics_csv(os, out.report);
  }
  {
    auto os = open_out(dir / "negotiations.csv");
    write_negotiations_csv(os, out.negotiations);
  }
  {
    auto os = open_out(dir / "config.cfg");
    os << out.config_echo;
  }
  {
    auto os = open_out(dir / "run.txt");
    os << fmt::format("seed={}\nevent_digest={}\nproposals={}\n", out.seed, out.event_digest, out.summary.proposals);
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  const auto text = read_text(path);
  CsvTable t;
  bool first = true;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    if (first) {
      t.header = split(line, ',');
      first = false;
    } else {
      t.rows.push_back(split(line, ','));
      if (t.rows.back().size() != t.header.size())
        throw Error(Errc::io_error, fmt::format("{}: row width differs from header", path.string()));
    }
  }
  if (first) throw Error(Errc::io_error, fmt::format("{} has no header", path.string()));
  return t;
}

RunOutput read_run_output(const std::filesystem::path& dir) {
  RunOutput out;

  const auto trades_path = dir / "trades.csv";
  const auto trades = read_csv(trades_path);
  expect_columns(trades, kTradesHeader, trades_path);
  for (const auto& r : trades.rows) {
    out.trades.push_back({to_long(r[0], trades_path), r[1], r[2], to_money(r[3], trades_path), r[4] == "1"});
    out.summary.prices.push_back(out.trades.back().price);
  }

  const auto metrics_path = dir / "metrics.csv";
  const auto m = read_csv(metrics_path);
  expect_columns(m, kMetricsHeader, metrics_path);
  if (m.rows.size() != 1) throw Error(Errc::io_error, "metrics.csv must hold exactly one row");
  const auto& mr = m.rows.front();
  out.report.phi_baseline = to_double(mr[0], metrics_path);
  out.report.phi_treated = to_double(mr[1], metrics_path);
  out.report.delta_phi = to_double(mr[2], metrics_path);
  out.report.improvement_pct = to_double(mr[3], metrics_path);
  out.report.total_spend = to_money(mr[4], metrics_path);
  out.report.trades = static_cast<std::size_t>(to_long(mr[5], metrics_path));

  const auto neg_path = dir / "negotiations.csv";
  const auto n = read_csv(neg_path);
  expect_columns(n, kNegotiationsHeader, neg_path);
  for (const auto& r : n.rows)
    out.negotiations.push_back({static_cast<std::uint64_t>(to_long(r[0], neg_path)), static_cast<int>(to_long(r[1], neg_path)),
                                to_money(r[2], neg_path), to_money(r[3], neg_path), r[4]});

  out.config_echo = read_text(dir / "config.cfg");
  const auto info_path = dir / "run.txt";
  for (const auto& line : split(read_text(info_path), '\n')) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "seed") out.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "event_digest") out.event_digest = value;
    else if (key == "proposals") out.summary.proposals = static_cast<std::size_t>(to_long(value, info_path));
  }
  out.summary.accepted = out.trades.size();
  out.summary.improvement_pct = out.report.improvement_pct;
  return out;
}

void write_sweep_output(const SweepOutput& sweep, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  {
    auto os = open_out(dir / "heatmap.csv");
    write_heatmap_csv(os, sweep);
  }
  {
    auto os = open_out(dir / "price_value.csv");
    const auto summaries = sweep.summaries();
    write_price_value_csv(os, metrics::price_value_table(summaries));
  }
}

}  // namespace dtm::harness
