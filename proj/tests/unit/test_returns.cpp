#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "herdscan/returns.hpp"

using namespace herdscan;

namespace {

AlignedPanel panel_of(const std::vector<std::vector<double>>& prices) {
  std::vector<AssetMeta> metas;
  std::vector<double> values;
  for (std::size_t a = 0; a < prices.size(); ++a) {
    metas.push_back({std::string(1, static_cast<char>('A' + a)), Vehicle::Stock, Sector::Energy});
    values.insert(values.end(), prices[a].begin(), prices[a].end());
  }
  std::vector<Timestamp> grid;
  for (std::size_t t = 0; t < prices[0].size(); ++t) grid.emplace_back(static_cast<std::int64_t>(t));
  return AlignedPanel(metas, grid, values, {});
}

ReturnPanel returns_of(const std::vector<std::vector<double>>& r) {
  std::vector<AssetMeta> metas;
  std::vector<double> values;
  for (std::size_t a = 0; a < r.size(); ++a) {
    metas.push_back({std::string(1, static_cast<char>('A' + a)), Vehicle::Stock, Sector::Energy});
    values.insert(values.end(), r[a].begin(), r[a].end());
  }
  std::vector<Timestamp> grid;
  for (std::size_t t = 0; t < r[0].size(); ++t) grid.emplace_back(static_cast<std::int64_t>(t));
  return ReturnPanel(metas, grid, values);
}

}  // namespace

TEST(LogReturns, ConstantPriceGivesZeros) {
  const auto rp = log_returns(panel_of({{100, 100, 100, 100, 100}, {1, 1, 1, 1, 1}}));
  ASSERT_EQ(rp.time_count(), 4u);
  for (double r : rp.row(0)) EXPECT_EQ(r, 0.0);
}

TEST(LogReturns, AnalyticValues) {
  const auto rp = log_returns(panel_of({{100, 200}, {100, 110}}));
  EXPECT_NEAR(rp.at(0, 0), 0.693147180559945, 1e-12);
  const auto rp3 = log_returns(panel_of({{100, 110, 99}, {1, 1, 1}}));
  EXPECT_NEAR(rp3.at(0, 0), 0.0953101798043249, 1e-12);
  EXPECT_NEAR(rp3.at(0, 1), -0.105360515657826, 1e-12);
  EXPECT_EQ(rp3.grid()[0], Timestamp(1));
}

TEST(Csad, HandComputedExamples) {
  const auto two = csad(returns_of({{0.01}, {-0.01}}));
  EXPECT_EQ(two.market_return[0], 0.0);
  EXPECT_NEAR(two.csad[0], 0.01, 1e-15);

  const auto three = csad(returns_of({{0.02}, {0.00}, {-0.01}}));
  const double rm = (0.02 + 0.0 - 0.01) / 3.0;
  const double expected = (std::abs(0.02 - rm) + std::abs(0.0 - rm) + std::abs(-0.01 - rm)) / 3.0;
  EXPECT_NEAR(three.market_return[0], 0.0033333333333333, 1e-15);
  EXPECT_NEAR(three.csad[0], expected, 1e-15);
  EXPECT_NEAR(three.csad[0], 0.0111111111111111, 1e-15);
}

TEST(Csad, IdenticalAssetsHaveZeroDispersion) {
  const std::vector<double> r{0.013, -0.007, 0.1, 1e-5};
  const auto cs = csad(returns_of({r, r, r, r, r}));
  for (double c : cs.csad) EXPECT_EQ(c, 0.0);
}

TEST(Csad, TriangleBound) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 0.02);
  std::vector<std::vector<double>> r(9, std::vector<double>(200));
  for (auto& row : r)
    for (auto& x : row) x = d(rng);
  const auto cs = csad(returns_of(r));
  for (std::size_t t = 0; t < cs.size(); ++t) {
    double m = 0.0;
    for (const auto& row : r) m = std::max(m, std::abs(row[t]));
    EXPECT_LE(cs.csad[t], m + std::abs(cs.market_return[t]) + 1e-15);
  }
}

TEST(Csad, PriceScaleInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  std::vector<std::vector<double>> prices(6, std::vector<double>(300));
  for (auto& row : prices) {
    double p = 50.0;
    for (auto& x : row) x = (p *= u(rng));
  }
  auto scaled = prices;
  for (auto& row : scaled)
    for (auto& x : row) x *= 37.25;
  const auto a = log_returns(panel_of(prices));
  const auto b = log_returns(panel_of(scaled));
  for (std::size_t i = 0; i < a.asset_count(); ++i)
    for (std::size_t t = 0; t < a.time_count(); ++t) EXPECT_NEAR(a.at(i, t), b.at(i, t), 1e-14);
  const auto ca = csad(a), cb = csad(b);
  for (std::size_t t = 0; t < ca.size(); ++t) {
    EXPECT_NEAR(ca.csad[t], cb.csad[t], 1e-14);
    EXPECT_NEAR(ca.market_return[t], cb.market_return[t], 1e-14);
  }
}

TEST(UpDownMasks, SignRules) {
  CsadSeries cs;
  cs.market_return = {0.01, -0.02, 0.0};
  cs.csad = {0, 0, 0};
  const auto m = up_down_masks(cs);
  EXPECT_EQ(m.up, (std::vector<bool>{true, false, false}));
  EXPECT_EQ(m.down, (std::vector<bool>{false, true, false}));

  cs.market_return = {0.1, -0.1, 0.1, -0.1};
  const auto alt = up_down_masks(cs);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_NE(alt.up[t], alt.down[t]);
    EXPECT_FALSE(alt.up[t] && alt.down[t]);
  }
}
