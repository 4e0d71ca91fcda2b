#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtm/error.hpp"
#include "dtm/metrics/metrics.hpp"

using namespace dtm;
using namespace dtm::metrics;

namespace {

traffic::SimResult result_of(std::vector<double> waits) {
  traffic::SimResult r;
  r.n = waits.size();
  r.waits = std::move(waits);
  return r;
}

RunSummary summary(agents::Risk r, agents::Sensitivity s, double flow, std::size_t proposals,
                   std::vector<std::int64_t> prices, double improvement) {
  RunSummary out{r, s, flow, proposals, prices.size(), {}, improvement};
  for (auto p : prices) out.prices.push_back(Currency::from_cents(p));
  return out;
}

}  // namespace

TEST(AverageWaitingTime, Examples) {
  EXPECT_DOUBLE_EQ(average_waiting_time(result_of({10, 20, 30})), 20.0);
  EXPECT_DOUBLE_EQ(average_waiting_time(result_of({0, 0, 0, 0})), 0.0);
  try {
    average_waiting_time(result_of({}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_population);
  }
}

TEST(DeltaPhi, IdentityIsZero) {
  const auto r = result_of({3, 4, 5});
  const auto m = delta_phi(r, r);
  EXPECT_DOUBLE_EQ(m.delta_phi, 0.0);
  EXPECT_DOUBLE_EQ(m.improvement_pct, 0.0);
}

TEST(DeltaPhi, ReportedReductions) {
  auto m = make_report(100.0, 77.18);
  EXPECT_NEAR(m.improvement_pct, 22.82, 1e-9);
  EXPECT_NEAR(m.delta_phi, -22.82, 1e-9);
  m = make_report(100.0, 71.0);
  EXPECT_NEAR(m.improvement_pct, 29.0, 1e-9);
}

TEST(DeltaPhi, PopulationMismatch) {
  try {
    delta_phi(result_of({1, 2}), result_of({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
  try {
    delta_phi(result_of({}), result_of({}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_population);
  }
}

TEST(MetricProperties, AntisymmetryAndConsistency) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> a, b;
    const auto n = 1 + rng() % 30;
    for (std::size_t k = 0; k < n; ++k) {
      a.push_back(static_cast<double>(rng() % 1000) / 10.0);
      b.push_back(static_cast<double>(rng() % 1000) / 10.0);
    }
    const auto ab = delta_phi(result_of(a), result_of(b));
    const auto ba = delta_phi(result_of(b), result_of(a));
    EXPECT_DOUBLE_EQ(ab.delta_phi, -ba.delta_phi);
    EXPECT_LE(ab.improvement_pct, 100.0);
    EXPECT_EQ(ab.improvement_pct == 0.0, ab.phi_baseline == ab.phi_treated || ab.phi_baseline == 0.0);
    if (ab.phi_baseline > 0) EXPECT_NEAR(ab.delta_phi, -ab.improvement_pct * ab.phi_baseline / 100.0, 1e-9);
  }
}

TEST(AcceptanceTable, AllAcceptedIsOne) {
  const std::vector<RunSummary> runs{summary(agents::Risk::aggressive, agents::Sensitivity::high, 220, 3, {1200, 1200, 1200}, 1)};
  const auto t = acceptance_table(runs);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_DOUBLE_EQ(t[0].accept_probability, 1.0);
  EXPECT_DOUBLE_EQ(*t[0].mean_price, 12.0);
}

TEST(AcceptanceTable, EmptyCellsOmittedAndCellsPooled) {
  const std::vector<RunSummary> runs{
      summary(agents::Risk::aggressive, agents::Sensitivity::high, 100, 0, {}, 0),
      summary(agents::Risk::conservative, agents::Sensitivity::low, 100, 4, {1000}, 2),
      summary(agents::Risk::conservative, agents::Sensitivity::low, 100, 4, {}, 4),
  };
  const auto t = acceptance_table(runs);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].risk, agents::Risk::conservative);
  EXPECT_DOUBLE_EQ(t[0].accept_probability, 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(t[0].mean_improvement_pct, 3.0);
}

TEST(AcceptanceTable, ProbabilitiesInUnitInterval) {
  std::mt19937 rng(19);
  std::vector<RunSummary> runs;
  for (int i = 0; i < 100; ++i) {
    const auto proposals = rng() % 20;
    std::vector<std::int64_t> prices(proposals ? rng() % (proposals + 1) : 0, 500);
    runs.push_back(summary(rng() % 2 ? agents::Risk::aggressive : agents::Risk::conservative,
                           rng() % 2 ? agents::Sensitivity::high : agents::Sensitivity::low, 100.0 * (1 + rng() % 5),
                           proposals, prices, 0));
  }
  for (const auto& row : acceptance_table(runs)) {
    EXPECT_GE(row.accept_probability, 0.0);
    EXPECT_LE(row.accept_probability, 1.0);
  }
}

TEST(PriceValueTable, RowsPerTrade) {
  EXPECT_TRUE(price_value_table({}).empty());
  const std::vector<RunSummary> runs{
      summary(agents::Risk::aggressive, agents::Sensitivity::high, 220, 3, {1200, 1200, 1200}, 5),
      summary(agents::Risk::conservative, agents::Sensitivity::low, 220, 1, {700}, 1),
  };
  const auto rows = price_value_table(runs);
  ASSERT_EQ(rows.size(), 4u);
  std::int64_t spend = 0;
  for (std::size_t i = 0; i < 3; ++i) spend += rows[i].achieved_price.cents();
  EXPECT_EQ(spend, 3600);
  EXPECT_EQ(rows[3].risk, agents::Risk::conservative);
  EXPECT_EQ(rows[3].sensitivity, agents::Sensitivity::low);
}

TEST(Stddev, Population) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stddev(v), 2.0);
  EXPECT_DOUBLE_EQ(stddev(std::vector<double>{3}), 0.0);
}

TEST(PriceConvergence, TailsByImprovement) {
  std::vector<PriceValueRow> rows;
  // bottom quarter prices spread, top quarter equal
  for (int i = 0; i < 8; ++i) rows.push_back({Currency::from_cents(i < 2 ? 100 + 900 * i : 500), static_cast<double>(i)});
  const auto c = price_convergence(rows);
  EXPECT_EQ(c.quartile, 2u);
  EXPECT_TRUE(c.evaluable);
  EXPECT_DOUBLE_EQ(c.sd_top, 0.0);
  EXPECT_DOUBLE_EQ(c.sd_bottom, 4.5);
  EXPECT_TRUE(c.holds);

  rows.resize(7);
  EXPECT_FALSE(price_convergence(rows).evaluable);
  EXPECT_FALSE(price_convergence(rows).holds);
}
