// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria (0 when all pass).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <sys/wait.h>
#include <unistd.h>

#include "dtm/agents/valuation.hpp"
#include "dtm/error.hpp"
#include "dtm/harness/report.hpp"
#include "dtm/llm/chat.hpp"
#include "dtm/negotiation/negotiation.hpp"
#include "mock_llm_server.hpp"

using namespace dtm;
namespace fs = std::filesystem;

namespace {

constexpr double kConsistencyTol = 0.01;  // percentage points
constexpr double kReplayBudgetS = 5.0;
constexpr double kBandLow = 5.0;
constexpr double kBandHigh = 35.0;
constexpr double kEfficacyBudgetS = 10.0;
constexpr int kLedgerSeeds = 100;
constexpr int kLedgerOps = 1000;
constexpr double kNegotiationBudgetS = 30.0;
constexpr int kOracleScenarios = 50;

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / fmt::format("dtm_accept_{}_{}", name, ::getpid());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Verdict replay_fixture() {
  const auto t0 = Clock::now();
  const auto dir = scratch("replay");
  const auto out = harness::run_replay(harness::load_replay_fixture(DTM_FIXTURE_DIR "/replay_three_trades.cfg"));
  harness::write_run_output(out, dir);
  const double elapsed = seconds_since(t0);

  const auto trades = harness::read_csv(dir / "trades.csv");
  const auto m = harness::read_csv(dir / "metrics.csv").rows.at(0);
  fs::remove_all(dir);

  std::vector<std::string> times;
  std::int64_t spend = 0;
  for (const auto& r : trades.rows) {
    times.push_back(r[0]);
    spend += Currency::parse(r[3])->cents();
  }
  const bool times_ok = times == std::vector<std::string>{"230", "235", "240"};
  const double phi_b = std::stod(m[0]), phi_a = std::stod(m[1]), delta = std::stod(m[2]), imp = std::stod(m[3]);
  const double imp_expected = 100.0 * (phi_b - phi_a) / phi_b;
  const bool imp_ok = std::abs(imp - imp_expected) <= kConsistencyTol;
  const bool delta_ok = std::abs(delta + imp * phi_b / 100.0) <= kConsistencyTol;
  const bool spend_ok = spend == 3600 && m[4] == "36.00";
  return {times_ok && spend_ok && imp_ok && delta_ok && elapsed < kReplayBudgetS,
          fmt::format("trades at [{}], spend {}, improvement {} vs {:.4f}, delta_phi {}, {:.2f}s",
                      fmt::join(times, ","), Currency::from_cents(spend).str(), m[3], imp_expected, m[2], elapsed)};
}

Verdict efficacy_band() {
  const auto t0 = Clock::now();
  harness::ScenarioConfig cfg;  // 220 veh/h, severity 0.5, delta 3, rule backend
  const auto treated = harness::run_once(cfg);
  const double t_treated = seconds_since(t0);
  cfg.signal.adjustment_delta_s = 0;
  const auto t1 = Clock::now();
  const auto identity = harness::run_once(cfg);
  const double t_identity = seconds_since(t1);
  const double imp = treated.report.improvement_pct;
  const bool band = imp >= kBandLow && imp <= kBandHigh && imp > 0.0;
  const bool zero = identity.report.improvement_pct == 0.0;
  return {band && zero && t_treated < kEfficacyBudgetS && t_identity < kEfficacyBudgetS,
          fmt::format("improvement {:.3f}% (band [{}, {}]) with {} trades of {} proposals; delta 0 gives {:.3f}%; "
                      "{:.2f}s/{:.2f}s",
                      imp, kBandLow, kBandHigh, treated.trades.size(), treated.summary.proposals,
                      identity.report.improvement_pct, t_treated, t_identity)};
}

Verdict decision_pin() {
  const agents::AgentProfile p{"controller", agents::Role::controller, agents::Risk::conservative,
                               agents::Sensitivity::low, Currency::from_cents(10000)};
  const auto v = agents::make_estimate(10);
  const auto offer = Currency::from_cents(1200);
  const auto rule = agents::rule_decide(p, agents::make_decision_request(p, v, offer), v, {});
  const auto body = llm::build_prompt(p, v, offer).body();
  const bool s1 = body.find("decrease average delay by 10 seconds") != std::string::npos;
  const bool s2 = body.find("offered at 12 dollars") != std::string::npos;
  const auto parsed = llm::parse_decision(llm::parse_chat_response(mock::kReferenceResponseBody));
  return {!rule.decision && s1 && s2 && !parsed.decision,
          fmt::format("rule decision={}, prompt substrings {}/{}, parsed decision={}", rule.decision, s1, s2,
                      parsed.decision)};
}

Verdict ledger_conservation() {
  std::size_t operations = 0, failures = 0;
  bool ok = true;
  for (int seed = 1; seed <= kLedgerSeeds && ok; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    market::TradeLedger l(Currency::from_cents(static_cast<std::int64_t>(rng() % 200)));
    std::vector<std::string> ids;
    std::int64_t endowed = 0;
    double now = 0;
    for (int op = 0; op < kLedgerOps; ++op, ++operations) {
      try {
        switch (rng() % 5) {
          case 0: {
            const auto id = fmt::format("a{}", rng() % 16);
            const auto e = static_cast<std::int64_t>(rng() % 10000);
            l.register_agent(id, Currency::from_cents(e));
            endowed += e;
            ids.push_back(id);
            break;
          }
          case 1:
            if (!ids.empty())
              l.submit_proposal(ids[rng() % ids.size()], {LinkId{static_cast<std::uint32_t>(rng() % 9)}, 0, now},
                                Currency::from_cents(static_cast<std::int64_t>(rng() % 3000)), now);
            break;
          case 2:
            if (!ids.empty() && !l.proposals().empty()) {
              now += static_cast<double>(rng() % 3);
              l.settle(ProposalId{1 + rng() % (l.proposals().size() + 1)}, ids[rng() % ids.size()],
                       Currency::from_cents(static_cast<std::int64_t>(rng() % 5000)), now);
            }
            break;
          case 3:
            if (!ids.empty() && !l.proposals().empty())
              l.reject(ProposalId{1 + rng() % l.proposals().size()}, ids[rng() % ids.size()], now);
            break;
          default:
            now += 1;
            if (rng() % 100 == 0) l.expire_open(now);
        }
      } catch (const Error&) {
        ++failures;
      }
      std::int64_t sum = l.fee_pool().cents();
      for (const auto& [id, b] : l.accounts()) {
        sum += b.cents();
        if (b.cents() < 0) ok = false;
      }
      if (sum != endowed) ok = false;
      if (!ok) break;
    }
  }
  return {ok, fmt::format("{} operations over {} seeds ({} rejected by the ledger)", operations, kLedgerSeeds, failures)};
}

Verdict preference_dominance() {
  std::size_t points = 0;
  bool superset = true, monotone = true;
  for (auto s : {agents::Sensitivity::high, agents::Sensitivity::low}) {
    for (int v2 = 0; v2 <= 40; ++v2) {
      const auto v = agents::make_estimate(v2 / 2.0);
      std::array<bool, 2> rejected_before{false, false};
      for (int o2 = 0; o2 <= 60; ++o2) {
        const auto offer = Currency::from_cents(50 * o2);
        std::array<bool, 2> acc{};
        for (int r = 0; r < 2; ++r) {
          const agents::AgentProfile p{"c", agents::Role::controller,
                                       r ? agents::Risk::aggressive : agents::Risk::conservative, s, {}};
          acc[r] = agents::rule_decide(p, agents::make_decision_request(p, v, offer), v, {}).decision;
          if (acc[r] && rejected_before[r]) monotone = false;
          rejected_before[r] = rejected_before[r] || !acc[r];
        }
        if (acc[0] && !acc[1]) superset = false;
        ++points;
      }
    }
  }
  return {superset && monotone,
          fmt::format("{} (offer, value, sensitivity) points; aggressive superset={}, monotone in price={}", points,
                      superset, monotone)};
}

Verdict negotiation_soundness() {
  const auto t0 = Clock::now();
  constexpr std::int64_t kOpening = 120, kStep = 10;
  constexpr int kRounds = negotiation::kDefaultMaxRounds;
  std::size_t cases = 0, agreed = 0, mismatches = 0, non_monotone = 0, not_equilibrium = 0;
  for (std::int64_t rs = 0; rs < 100; ++rs) {
    for (std::int64_t rb = 0; rb < 100; ++rb, ++cases) {
      const auto t = negotiation::negotiate(Currency::from_cents(rs), Currency::from_cents(rb),
                                            Currency::from_cents(kOpening), kRounds, Currency::from_cents(kStep));
      // reachable: some round r <= R where the clamped schedules cross
      bool reachable = false;
      const std::int64_t a0 = std::max(kOpening, rs), b0 = rb / 2;
      for (int r = 1; r <= kRounds; ++r)
        reachable = reachable || std::min(rb, b0 + r * kStep) >= std::max(rs, a0 - r * kStep);
      if (t.agreed() != (rs <= rb && reachable)) ++mismatches;
      Currency ask = t.opening_ask, bid = t.opening_bid;
      for (const auto& round : t.rounds) {
        if (round.ask > ask || round.bid < bid) ++non_monotone;
        ask = round.ask;
        bid = round.bid;
      }
      if (t.rounds.size() > static_cast<std::size_t>(kRounds)) ++non_monotone;
      if (t.agreed()) {
        ++agreed;
        if (!negotiation::equilibrium_check(t)) ++not_equilibrium;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && non_monotone == 0 && not_equilibrium == 0 && elapsed < kNegotiationBudgetS,
          fmt::format("{} reservation pairs, {} agreed; {} agreement mismatches, {} concession violations, {} "
                      "non-equilibrium agreements; {:.2f}s",
                      cases, agreed, mismatches, non_monotone, not_equilibrium, elapsed)};
}

int run_cli(const std::string& args) {
  const auto cmd = fmt::format("{} {} >/dev/null 2>&1", DTM_CLI_PATH, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a)) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b)) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& rel : fa) {
    if (fs::is_directory(a / rel)) continue;
    ++files;
    if (slurp(a / rel) != slurp(b / rel)) return false;
  }
  return true;
}

struct SweepRun {
  fs::path dir;
  int status = -1;
};

Verdict determinism(SweepRun& sweep) {
  const auto dir = scratch("determinism");
  {
    std::ofstream(dir / "default.cfg");
  }
  const auto cfg = (dir / "default.cfg").string();
  int rc = 0;
  rc |= run_cli(fmt::format("run {} --out {}", cfg, (dir / "run_a").string()));
  rc |= run_cli(fmt::format("run {} --out {}", cfg, (dir / "run_b").string()));
  rc |= run_cli(fmt::format("sweep {} --flows 100,200,300,400,500 --out {}", cfg, (dir / "sweep_a").string()));
  rc |= run_cli(fmt::format("sweep {} --flows 100,200,300,400,500 --out {}", cfg, (dir / "sweep_b").string()));
  std::size_t files = 0;
  const bool runs_equal = rc == 0 && same_tree(dir / "run_a", dir / "run_b", files);
  const bool sweeps_equal = rc == 0 && same_tree(dir / "sweep_a", dir / "sweep_b", files);
  sweep.dir = dir / "sweep_a";
  sweep.status = rc;
  return {runs_equal && sweeps_equal,
          fmt::format("exit codes ok={}, {} files compared, run trees equal={}, sweep trees equal={}", rc == 0, files,
                      runs_equal, sweeps_equal)};
}

Verdict oracle_identity() {
  std::mt19937_64 rng(2024);
  std::size_t nonzero = 0;
  for (int i = 0; i < kOracleScenarios; ++i) {
    traffic::Scenario sc;
    sc.network = traffic::build_grid(1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3),
                                     200.0 + static_cast<double>(rng() % 600), 1 + static_cast<int>(rng() % 3));
    sc.flow_vph = 50.0 + static_cast<double>(rng() % 1200);
    const auto& links = sc.network.links();
    std::vector<LinkId> approaches;
    for (const auto& l : links)
      if (!l.is_exit) approaches.push_back(l.id);
    const auto link = approaches[rng() % approaches.size()];
    const double start = static_cast<double>(rng() % 300);
    sc.accidents.push_back({link, start, start + 50.0 + static_cast<double>(rng() % 400),
                            static_cast<double>(rng() % 101) / 100.0, 10});
    const int cycle = 20 + static_cast<int>(rng() % 80);
    const int ns = 5 + static_cast<int>(rng() % (cycle - 10));
    const auto plan = traffic::SignalPlan::uniform(sc.network, cycle, ns, cycle - ns);
    const long horizon = 300 + static_cast<long>(rng() % 700);
    const long t = static_cast<long>(rng() % static_cast<std::uint64_t>(horizon));
    const auto r = agents::oracle_value(sc, plan, {link}, t, horizon, 0, rng());
    if (r.value.seconds_saved != 0.0 || r.phi_baseline != r.phi_adjusted) ++nonzero;
  }
  const harness::ScenarioConfig cfg;
  const auto positive = harness::oracle_for_config(cfg, 230);
  const bool pos = positive.value.seconds_saved > 0.0;
  return {nonzero == 0 && pos,
          fmt::format("delta 0: {} of {} scenarios nonzero; default scenario delta 3 at t=230: phi {:.3f} -> {:.3f}, "
                      "seconds_saved={:.3f}",
                      nonzero, kOracleScenarios, positive.phi_baseline, positive.phi_adjusted,
                      positive.value.seconds_saved)};
}

Verdict price_convergence(const SweepRun& sweep) {
  if (sweep.status != 0) return {false, "sweep did not complete"};
  const auto table = harness::read_csv(sweep.dir / "price_value.csv");
  std::vector<metrics::PriceValueRow> rows;
  for (const auto& r : table.rows)
    rows.push_back({*Currency::parse(r[0]), std::stod(r[1]), *agents::parse_risk(r[2]), *agents::parse_sensitivity(r[3])});
  const auto c = metrics::price_convergence(rows);
  if (!c.evaluable)
    return {false, fmt::format("not evaluable: {} settled trades in the sweep, at least 8 needed for two per quartile",
                               c.trades)};
  return {c.holds, fmt::format("{} trades, {} per quartile: sd(top) {:.4f} vs sd(bottom) {:.4f}", c.trades,
                               c.quartile, c.sd_top, c.sd_bottom)};
}

}  // namespace

int main() {
  SweepRun sweep;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"replay fixture", replay_fixture},
      {"efficacy band", efficacy_band},
      {"decision pin", decision_pin},
      {"ledger conservation", ledger_conservation},
      {"preference dominance", preference_dominance},
      {"negotiation soundness", negotiation_soundness},
      {"determinism", [&] { return determinism(sweep); }},
      {"oracle identity", oracle_identity},
      {"price convergence", [&] { return price_convergence(sweep); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += v.pass ? 0 : 1;
    fmt::print("[{}] {} {}: {}\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  if (!sweep.dir.empty()) fs::remove_all(sweep.dir.parent_path());
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed;
}
