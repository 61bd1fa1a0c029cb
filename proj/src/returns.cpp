#include "herdscan/returns.hpp"

#include <cmath>

#include "herdscan/error.hpp"
#include "herdscan/kernels.hpp"

namespace herdscan {

ReturnPanel::ReturnPanel(std::vector<AssetMeta> assets, std::vector<Timestamp> grid,
                         std::vector<double> returns)
    : assets_(std::move(assets)), grid_(std::move(grid)), returns_(std::move(returns)) {
  if (returns_.size() != assets_.size() * grid_.size())
    throw Error(Errc::EmptyInput, "return matrix does not match assets x grid");
}

ReturnPanel ReturnPanel::select(std::span<const std::size_t> asset_indices) const {
  std::vector<AssetMeta> assets;
  std::vector<double> values;
  values.reserve(asset_indices.size() * grid_.size());
  for (auto a : asset_indices) {
    assets.push_back(assets_.at(a));
    const auto r = row(a);
    values.insert(values.end(), r.begin(), r.end());
  }
  return ReturnPanel(std::move(assets), grid_, std::move(values));
}

ReturnPanel log_returns(const AlignedPanel& panel) {
  const std::size_t T = panel.time_count();
  if (T < 2) throw Error(Errc::TooFewObservations, "log returns need at least 2 timestamps");
  std::vector<double> out(panel.asset_count() * (T - 1));
  for (std::size_t a = 0; a < panel.asset_count(); ++a) {
    const auto p = panel.row(a);
    double* r = out.data() + a * (T - 1);
    for (std::size_t t = 0; t + 1 < T; ++t) r[t] = std::log(p[t + 1] / p[t]);
  }
  return ReturnPanel(panel.assets(), {panel.grid().begin() + 1, panel.grid().end()}, std::move(out));
}

CsadSeries csad(const ReturnPanel& rp) {
  const std::size_t N = rp.asset_count();
  const std::size_t T = rp.time_count();
  if (N < 2) throw Error(Errc::TooFewObservations, "CSAD needs at least 2 assets");

  // Mean taken as an offset from the first asset so identical returns give an
  // exactly zero dispersion.
  const auto base = rp.row(0);
  std::vector<double> acc(T, 0.0);
  for (std::size_t a = 1; a < N; ++a) kernels::accumulate_diff(acc, rp.row(a), base);

  CsadSeries cs;
  cs.grid = rp.grid();
  cs.market_return.resize(T);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (std::size_t t = 0; t < T; ++t) cs.market_return[t] = base[t] + acc[t] * inv_n;

  cs.csad.assign(T, 0.0);
  for (std::size_t a = 0; a < N; ++a) kernels::accumulate_abs_diff(cs.csad, rp.row(a), cs.market_return);
  for (double& v : cs.csad) v *= inv_n;
  return cs;
}

MarketMasks up_down_masks(const CsadSeries& cs) {
  MarketMasks m;
  m.up.reserve(cs.market_return.size());
  m.down.reserve(cs.market_return.size());
  for (double r : cs.market_return) {
    m.up.push_back(r > 0.0);
    m.down.push_back(r < 0.0);
  }
  return m;
}

}  // namespace herdscan
