#include "herdscan/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "herdscan/error.hpp"

namespace herdscan {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string line_ref(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

}  // namespace

// ---- enums ---------------------------------------------------------------

std::string_view to_string(Vehicle v) {
  switch (v) {
    case Vehicle::Stock: return "Stock";
    case Vehicle::UsEtf: return "UsEtf";
    case Vehicle::Crypto: return "Crypto";
  }
  return "?";
}

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::Crypto: return "Crypto";
    case Sector::UsEtf: return "UsEtf";
    case Sector::CommunicationServices: return "CommunicationServices";
    case Sector::Utilities: return "Utilities";
    case Sector::RealEstate: return "RealEstate";
    case Sector::Materials: return "Materials";
    case Sector::InformationTechnology: return "InformationTechnology";
    case Sector::Industrials: return "Industrials";
    case Sector::Healthcare: return "Healthcare";
    case Sector::Financials: return "Financials";
    case Sector::Energy: return "Energy";
    case Sector::ConsumerStaples: return "ConsumerStaples";
    case Sector::ConsumerDiscretionary: return "ConsumerDiscretionary";
  }
  return "?";
}

std::optional<Vehicle> parse_vehicle(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "stock") return Vehicle::Stock;
  if (t == "usetf" || t == "etf") return Vehicle::UsEtf;
  if (t == "crypto") return Vehicle::Crypto;
  return std::nullopt;
}

std::optional<Sector> parse_sector(std::string_view text) {
  const auto t = lower(trim(text));
  for (int i = 0; i < kSectorCount; ++i) {
    const auto s = static_cast<Sector>(i);
    if (lower(to_string(s)) == t) return s;
  }
  if (t == "etf") return Sector::UsEtf;
  return std::nullopt;
}

void validate(const AssetMeta& meta) {
  if (meta.ticker.empty()) throw Error(Errc::Config, "empty ticker");
  const bool crypto_ok = (meta.vehicle == Vehicle::Crypto) == (meta.sector == Sector::Crypto);
  const bool etf_ok = (meta.vehicle == Vehicle::UsEtf) == (meta.sector == Sector::UsEtf);
  if (!crypto_ok || !etf_ok)
    throw Error(Errc::Config, meta.ticker + ": vehicle " + std::string(to_string(meta.vehicle)) +
                                  " does not match sector " + std::string(to_string(meta.sector)));
}

double MissingThresholds::for_vehicle(Vehicle v) const {
  switch (v) {
    case Vehicle::Stock: return stock;
    case Vehicle::UsEtf: return us_etf;
    case Vehicle::Crypto: return crypto;
  }
  return stock;
}

std::string_view to_string(FillMethod m) { return m == FillMethod::Forward ? "forward" : "backward"; }

// ---- panel ---------------------------------------------------------------

AlignedPanel::AlignedPanel(std::vector<AssetMeta> assets, std::vector<Timestamp> grid,
                           std::vector<double> prices, std::vector<FillRecord> fill_log)
    : assets_(std::move(assets)),
      grid_(std::move(grid)),
      prices_(std::move(prices)),
      fill_log_(std::move(fill_log)) {
  if (prices_.size() != assets_.size() * grid_.size())
    throw Error(Errc::EmptyGrid, "price matrix does not match assets x grid");
}

std::vector<RawSeries> AlignedPanel::observed_series() const {
  std::set<std::pair<std::string, Timestamp>> filled;
  for (const auto& f : fill_log_) filled.emplace(f.ticker, f.time);
  std::vector<RawSeries> out;
  out.reserve(assets_.size());
  for (std::size_t a = 0; a < assets_.size(); ++a) {
    RawSeries s{assets_[a].ticker, {}};
    for (std::size_t t = 0; t < grid_.size(); ++t) {
      if (filled.count({assets_[a].ticker, grid_[t]}) != 0) continue;
      s.observations.push_back({grid_[t], price(a, t)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

AlignedPanel AlignedPanel::select(std::span<const std::size_t> asset_indices) const {
  std::vector<AssetMeta> assets;
  std::vector<double> prices;
  std::set<std::string> kept;
  prices.reserve(asset_indices.size() * grid_.size());
  for (auto a : asset_indices) {
    assets.push_back(assets_.at(a));
    kept.insert(assets_[a].ticker);
    const auto r = row(a);
    prices.insert(prices.end(), r.begin(), r.end());
  }
  std::vector<FillRecord> log;
  for (const auto& f : fill_log_)
    if (kept.count(f.ticker) != 0) log.push_back(f);
  return AlignedPanel(std::move(assets), grid_, std::move(prices), std::move(log));
}

AlignedPanel AlignedPanel::select_vehicle(Vehicle v) const {
  std::vector<std::size_t> idx;
  for (std::size_t a = 0; a < assets_.size(); ++a)
    if (assets_[a].vehicle == v) idx.push_back(a);
  return select(idx);
}

// ---- loading -------------------------------------------------------------

RawSeries parse_bars(std::string_view text, std::string_view ticker, std::string_view source,
                     const ZoneConverter& zones) {
  RawSeries out{std::string(ticker), {}};
  const auto lines = lines_of(text);
  std::size_t time_col = 0;
  std::optional<std::size_t> close_col;
  bool first = true;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = trim(lines[ln]);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const std::size_t line_no = ln + 1;

    if (first) {
      first = false;
      if (!parse_timestamp(fields[0])) {
        // header row: locate columns by name
        for (std::size_t i = 0; i < fields.size(); ++i) {
          const auto name = lower(fields[i]);
          if (name == "close") close_col = i;
          if (name == "timestamp" || name == "time" || name == "datetime" || name == "date")
            time_col = i;
        }
        if (!close_col)
          throw Error(Errc::MalformedRow, line_ref(source, line_no) + ": header has no close column");
        continue;
      }
    }

    std::size_t ccol = 0;
    if (close_col) {
      ccol = *close_col;
    } else if (fields.size() == 6) {
      ccol = 4;
    } else if (fields.size() == 2) {
      ccol = 1;
    } else {
      throw Error(Errc::MalformedRow, line_ref(source, line_no) + ": expected 2 or 6 columns");
    }
    if (ccol >= fields.size() || time_col >= fields.size())
      throw Error(Errc::MalformedRow, line_ref(source, line_no) + ": missing column");

    const auto ts = parse_timestamp(fields[time_col]);
    if (!ts) throw Error(Errc::MalformedRow, line_ref(source, line_no) + ": bad timestamp");
    const auto close = parse_double(fields[ccol]);
    if (!close || std::isnan(*close))
      throw Error(Errc::MalformedRow, line_ref(source, line_no) + ": bad close value");
    const Timestamp when = zones.to_exchange(*ts);
    if (!(*close > 0.0) || std::isinf(*close))
      throw Error(Errc::NonPositivePrice, std::string(ticker) + " at " + when.to_string());
    out.observations.push_back({when, *close});
  }

  std::stable_sort(out.observations.begin(), out.observations.end(),
                   [](const Observation& a, const Observation& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < out.observations.size(); ++i)
    if (out.observations[i].time == out.observations[i - 1].time)
      throw Error(Errc::DuplicateTimestamp,
                  std::string(ticker) + " at " + out.observations[i].time.to_string());
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RawSeries load_bars(const std::filesystem::path& path, std::string_view ticker,
                    const ZoneConverter& zones) {
  const auto text = read_file(path);
  return parse_bars(text, ticker, path.string(), zones);
}

// ---- filtering and alignment ---------------------------------------------

MissingDecision filter_by_missing(const RawSeries& series, std::span<const Timestamp> grid,
                                  Vehicle vehicle, const MissingThresholds& thresholds) {
  if (grid.empty()) return {false, 1.0};
  std::size_t hits = 0;
  auto it = series.observations.begin();
  for (const auto& ts : grid) {
    while (it != series.observations.end() && it->time < ts) ++it;
    if (it != series.observations.end() && it->time == ts) ++hits;
  }
  const double fraction = static_cast<double>(grid.size() - hits) / static_cast<double>(grid.size());
  return {fraction <= thresholds.for_vehicle(vehicle), fraction};
}

std::vector<Timestamp> consensus_grid(std::span<const RawSeries> series, const TradingWindow& window) {
  std::vector<Timestamp> all;
  for (const auto& s : series)
    for (const auto& o : s.observations)
      if (window.contains(o.time)) all.push_back(o.time);
  std::sort(all.begin(), all.end());
  std::vector<Timestamp> grid;
  const std::size_t n = series.size();
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    if (2 * (j - i) >= n) grid.push_back(all[i]);
    i = j;
  }
  return grid;
}

AlignedPanel align(std::span<const RawSeries> accepted, std::span<const AssetMeta> metas,
                   const TradingWindow& window) {
  if (accepted.size() < 2) throw Error(Errc::EmptyGrid, "need at least 2 assets to align");

  std::unordered_map<std::string, const AssetMeta*> meta_by_ticker;
  for (const auto& m : metas) meta_by_ticker[m.ticker] = &m;

  std::vector<const RawSeries*> order;
  std::set<std::string> seen;
  for (const auto& s : accepted) {
    if (!seen.insert(s.ticker).second) throw Error(Errc::Config, "duplicate ticker " + s.ticker);
    if (meta_by_ticker.count(s.ticker) == 0) throw Error(Errc::Config, "no metadata for " + s.ticker);
    order.push_back(&s);
  }
  std::sort(order.begin(), order.end(),
            [](const RawSeries* a, const RawSeries* b) { return a->ticker < b->ticker; });

  auto grid = consensus_grid(accepted, window);
  if (grid.empty()) throw Error(Errc::EmptyGrid, "no in-window timestamp is shared by half the assets");
  if (grid.size() < 3) throw Error(Errc::EmptyGrid, "grid has fewer than 3 timestamps");

  const std::size_t T = grid.size();
  std::vector<AssetMeta> assets;
  std::vector<double> prices(order.size() * T);
  std::vector<FillRecord> log;

  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto& s = *order[a];
    const AssetMeta& meta = *meta_by_ticker.at(s.ticker);
    validate(meta);
    assets.push_back(meta);

    double* row = prices.data() + a * T;
    std::vector<bool> observed(T, false);
    auto it = s.observations.begin();
    for (std::size_t t = 0; t < T; ++t) {
      while (it != s.observations.end() && it->time < grid[t]) ++it;
      if (it != s.observations.end() && it->time == grid[t]) {
        row[t] = it->close;
        observed[t] = true;
      }
    }
    const auto first = std::find(observed.begin(), observed.end(), true);
    if (first == observed.end()) throw Error(Errc::UnfillableAsset, s.ticker);
    const auto first_idx = static_cast<std::size_t>(first - observed.begin());
    for (std::size_t t = 0; t < first_idx; ++t) {
      row[t] = row[first_idx];
      log.push_back({s.ticker, grid[t], FillMethod::Backward});
    }
    for (std::size_t t = first_idx + 1; t < T; ++t) {
      if (observed[t]) continue;
      row[t] = row[t - 1];
      log.push_back({s.ticker, grid[t], FillMethod::Forward});
    }
  }
  return AlignedPanel(std::move(assets), std::move(grid), std::move(prices), std::move(log));
}

AlignedPanel slice(const AlignedPanel& panel, const SubPeriod& sub) {
  if (std::chrono::sys_days{sub.end} < std::chrono::sys_days{sub.start})
    throw Error(Errc::EmptySlice, sub.name + ": end precedes start");
  const auto lo = std::chrono::sys_days{sub.start};
  const auto hi = std::chrono::sys_days{sub.end};
  const auto& grid = panel.grid();
  std::size_t begin = 0;
  while (begin < grid.size() && grid[begin].date() < lo) ++begin;
  std::size_t end = begin;
  while (end < grid.size() && grid[end].date() <= hi) ++end;
  const std::size_t T = end - begin;
  if (T == 0) throw Error(Errc::EmptySlice, sub.name + ": no timestamps in range");
  if (T < 3) throw Error(Errc::EmptySlice, sub.name + ": fewer than 3 timestamps in range");

  std::vector<Timestamp> sub_grid(grid.begin() + static_cast<std::ptrdiff_t>(begin),
                                  grid.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<double> prices;
  prices.reserve(panel.asset_count() * T);
  for (std::size_t a = 0; a < panel.asset_count(); ++a) {
    const auto r = panel.row(a).subspan(begin, T);
    prices.insert(prices.end(), r.begin(), r.end());
  }
  std::vector<FillRecord> log;
  for (const auto& f : panel.fill_log())
    if (f.time >= sub_grid.front() && f.time <= sub_grid.back()) log.push_back(f);
  return AlignedPanel(panel.assets(), std::move(sub_grid), std::move(prices), std::move(log));
}

// ---- config files --------------------------------------------------------

std::map<std::string, AssetMeta> parse_sector_map(std::string_view text) {
  std::map<std::string, AssetMeta> out;
  const auto lines = lines_of(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    auto line = lines[ln];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss{std::string(line)};
    std::string ticker, vehicle, sector, extra;
    ss >> ticker >> vehicle >> sector;
    if (sector.empty() || (ss >> extra))
      throw Error(Errc::Config, "sector map line " + std::to_string(ln + 1) + ": expected 'TICKER vehicle sector'");
    const auto v = parse_vehicle(vehicle);
    const auto s = parse_sector(sector);
    if (!v) throw Error(Errc::Config, "sector map line " + std::to_string(ln + 1) + ": unknown vehicle " + vehicle);
    if (!s) throw Error(Errc::Config, "sector map line " + std::to_string(ln + 1) + ": unknown sector " + sector);
    AssetMeta meta{ticker, *v, *s};
    validate(meta);
    if (!out.emplace(ticker, meta).second) throw Error(Errc::Config, "duplicate ticker in sector map: " + ticker);
  }
  return out;
}

std::map<std::string, AssetMeta> load_sector_map(const std::filesystem::path& path) {
  try {
    return parse_sector_map(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoFailure) throw Error(Errc::Config, e.what());
    throw;
  }
}

std::vector<SubPeriod> parse_subperiods(std::string_view text) {
  std::vector<SubPeriod> out;
  std::set<std::string> names;
  const auto lines = lines_of(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    auto line = trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    const auto where = "sub-period line " + std::to_string(ln + 1);
    if (fields.size() != 3) throw Error(Errc::Config, where + ": expected name,start,end");
    const auto start = parse_date(fields[1]);
    const auto end = parse_date(fields[2]);
    if (!start || !end) throw Error(Errc::Config, where + ": dates must be YYYY-MM-DD");
    if (std::chrono::sys_days{*end} < std::chrono::sys_days{*start})
      throw Error(Errc::Config, where + ": end precedes start");
    std::string name(fields[0]);
    if (name.empty() || name == "full") throw Error(Errc::Config, where + ": name must be non-empty and not 'full'");
    if (!names.insert(name).second) throw Error(Errc::Config, where + ": duplicate name " + name);
    out.push_back({std::move(name), *start, *end});
  }
  return out;
}

std::vector<SubPeriod> load_subperiods(const std::filesystem::path& path) {
  try {
    return parse_subperiods(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoFailure) throw Error(Errc::Config, e.what());
    throw;
  }
}

}  // namespace herdscan
