#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "herdscan/time.hpp"

namespace herdscan {

enum class Vehicle { Stock, UsEtf, Crypto };

enum class Sector {
  Crypto,
  UsEtf,
  CommunicationServices,
  Utilities,
  RealEstate,
  Materials,
  InformationTechnology,
  Industrials,
  Healthcare,
  Financials,
  Energy,
  ConsumerStaples,
  ConsumerDiscretionary,
};

inline constexpr int kSectorCount = 13;

std::string_view to_string(Vehicle v);
std::string_view to_string(Sector s);
std::optional<Vehicle> parse_vehicle(std::string_view text);
std::optional<Sector> parse_sector(std::string_view text);

struct AssetMeta {
  std::string ticker;
  Vehicle vehicle = Vehicle::Stock;
  Sector sector = Sector::InformationTechnology;

  bool operator==(const AssetMeta&) const = default;
};

/// Throws Errc::Config when the vehicle/sector pairing is inconsistent.
void validate(const AssetMeta& meta);

struct Observation {
  Timestamp time;
  double close = 0.0;

  bool operator==(const Observation&) const = default;
};

struct RawSeries {
  std::string ticker;
  std::vector<Observation> observations;  // strictly increasing time, close > 0
};

struct MissingThresholds {
  double stock = 0.01;
  double crypto = 0.10;
  double us_etf = 0.12;

  double for_vehicle(Vehicle v) const;
};

struct MissingDecision {
  bool accepted = false;
  double missing_fraction = 0.0;
};

enum class FillMethod { Forward, Backward };

std::string_view to_string(FillMethod m);

struct FillRecord {
  std::string ticker;
  Timestamp time;
  FillMethod method = FillMethod::Forward;

  bool operator==(const FillRecord&) const = default;
};

/// Asset x timestamp price matrix on a shared grid. Assets are kept in
/// ascending ticker order; prices are row-major (one row per asset).
class AlignedPanel {
 public:
  AlignedPanel() = default;
  AlignedPanel(std::vector<AssetMeta> assets, std::vector<Timestamp> grid, std::vector<double> prices,
               std::vector<FillRecord> fill_log);

  std::size_t asset_count() const { return assets_.size(); }
  std::size_t time_count() const { return grid_.size(); }
  const std::vector<AssetMeta>& assets() const { return assets_; }
  const std::vector<Timestamp>& grid() const { return grid_; }
  const std::vector<FillRecord>& fill_log() const { return fill_log_; }
  const std::vector<double>& prices() const { return prices_; }

  std::span<const double> row(std::size_t asset) const {
    return {prices_.data() + asset * grid_.size(), grid_.size()};
  }
  double price(std::size_t asset, std::size_t t) const { return prices_[asset * grid_.size() + t]; }

  /// Observed (non-filled) cells of every asset, for re-alignment.
  std::vector<RawSeries> observed_series() const;

  /// Keeps only the listed asset rows (in their panel order).
  AlignedPanel select(std::span<const std::size_t> asset_indices) const;
  AlignedPanel select_vehicle(Vehicle v) const;

  bool operator==(const AlignedPanel&) const = default;

 private:
  std::vector<AssetMeta> assets_;
  std::vector<Timestamp> grid_;
  std::vector<double> prices_;
  std::vector<FillRecord> fill_log_;
};

struct SubPeriod {
  std::string name;
  Date start;
  Date end;  // inclusive

  bool operator==(const SubPeriod&) const = default;
};

// ---- operations ----------------------------------------------------------

/// Reads one asset's bar file. Rows are "timestamp,open,high,low,close,volume"
/// or "timestamp,close"; a header line is optional.
RawSeries load_bars(const std::filesystem::path& path, std::string_view ticker,
                    const ZoneConverter& zones = ZoneConverter{});

/// Same parser over an in-memory buffer; `source` names it in error messages.
RawSeries parse_bars(std::string_view text, std::string_view ticker, std::string_view source,
                     const ZoneConverter& zones = ZoneConverter{});

MissingDecision filter_by_missing(const RawSeries& series, std::span<const Timestamp> grid,
                                  Vehicle vehicle, const MissingThresholds& thresholds = {});

/// In-window timestamps present in at least half of the series, ascending.
std::vector<Timestamp> consensus_grid(std::span<const RawSeries> series, const TradingWindow& window);

AlignedPanel align(std::span<const RawSeries> accepted, std::span<const AssetMeta> metas,
                   const TradingWindow& window = {});

/// Restricts the panel to calendar dates [sub.start, sub.end].
AlignedPanel slice(const AlignedPanel& panel, const SubPeriod& sub);

// ---- config files --------------------------------------------------------

/// "TICKER vehicle sector" per line; '#' starts a comment.
std::map<std::string, AssetMeta> parse_sector_map(std::string_view text);
std::map<std::string, AssetMeta> load_sector_map(const std::filesystem::path& path);

/// "name,start_date,end_date" per line with ISO dates.
std::vector<SubPeriod> parse_subperiods(std::string_view text);
std::vector<SubPeriod> load_subperiods(const std::filesystem::path& path);

/// Bundled example configuration (asset classification and the five
/// 2019-2023 event windows).
std::string_view default_sector_map_text();
std::string_view default_subperiods_text();

std::string read_file(const std::filesystem::path& path);

}  // namespace herdscan
