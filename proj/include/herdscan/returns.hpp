#pragma once

#include <span>
#include <vector>

#include "herdscan/ingest.hpp"

namespace herdscan {

/// Log returns, one row per asset; grid[t] is the end of the interval.
class ReturnPanel {
 public:
  ReturnPanel() = default;
  ReturnPanel(std::vector<AssetMeta> assets, std::vector<Timestamp> grid, std::vector<double> returns);

  std::size_t asset_count() const { return assets_.size(); }
  std::size_t time_count() const { return grid_.size(); }
  const std::vector<AssetMeta>& assets() const { return assets_; }
  const std::vector<Timestamp>& grid() const { return grid_; }

  std::span<const double> row(std::size_t asset) const {
    return {returns_.data() + asset * grid_.size(), grid_.size()};
  }
  double at(std::size_t asset, std::size_t t) const { return returns_[asset * grid_.size() + t]; }

  ReturnPanel select(std::span<const std::size_t> asset_indices) const;

 private:
  std::vector<AssetMeta> assets_;
  std::vector<Timestamp> grid_;
  std::vector<double> returns_;
};

struct CsadSeries {
  std::vector<Timestamp> grid;
  std::vector<double> market_return;  // equal-weight mean return r_m,t
  std::vector<double> csad;           // mean |r_i,t - r_m,t|

  std::size_t size() const { return csad.size(); }
};

struct MarketMasks {
  std::vector<bool> up;    // r_m,t > 0
  std::vector<bool> down;  // r_m,t < 0
};

ReturnPanel log_returns(const AlignedPanel& panel);
CsadSeries csad(const ReturnPanel& rp);
MarketMasks up_down_masks(const CsadSeries& cs);

}  // namespace herdscan
