#include "herdscan/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>

#include "herdscan/error.hpp"
#include "herdscan/parallel.hpp"

namespace herdscan {

namespace {

std::vector<Vehicle> requested_vehicles(const AlignedPanel& panel, const AnalysisOptions& options) {
  if (!options.vehicles.empty()) return options.vehicles;
  std::set<Vehicle> present;
  for (const auto& a : panel.assets()) present.insert(a.vehicle);
  return {present.begin(), present.end()};
}

}  // namespace

HerdingAssessment assess_herding(const ReturnPanel& rp, const CsadFitOptions& options) {
  HerdingAssessment out;
  out.asset_count = rp.asset_count();
  out.n_obs = rp.time_count();
  CsadSeries cs;
  try {
    cs = csad(rp);
    out.basic = fit_csad_basic(cs, options);
  } catch (const Error& e) {
    out.skipped_reason = std::string(to_string(e.code()));
    return out;
  }
  try {
    out.updown = fit_csad_updown(cs, options);
  } catch (const Error& e) {
    out.updown_skipped_reason = std::string(to_string(e.code()));
  }
  out.verdict = verdict(*out.basic, out.updown);
  return out;
}

std::vector<SubPeriod> with_full_period(const AlignedPanel& panel, std::span<const SubPeriod> subs) {
  std::vector<SubPeriod> out(subs.begin(), subs.end());
  if (panel.time_count() == 0) throw Error(Errc::EmptyGrid, "panel has no timestamps");
  out.push_back({std::string(kFullPeriod), Date{panel.grid().front().date()}, Date{panel.grid().back().date()}});
  return out;
}

std::map<VehicleKey, VehicleCell> run_per_vehicle(const AlignedPanel& panel, std::span<const SubPeriod> subs,
                                                  const AnalysisOptions& options) {
  const auto periods = with_full_period(panel, subs);
  const auto vehicles = requested_vehicles(panel, options);

  std::vector<AlignedPanel> vehicle_panels;
  for (const auto v : vehicles) {
    vehicle_panels.push_back(panel.select_vehicle(v));
    if (!options.vehicles.empty() && vehicle_panels.back().asset_count() < 2)
      throw Error(Errc::VehicleTooSmall, std::string(to_string(v)) + " has " +
                                             std::to_string(vehicle_panels.back().asset_count()) + " assets");
  }

  std::vector<VehicleCell> cells(vehicles.size() * periods.size());
  parallel_for(
      cells.size(),
      [&](std::size_t i) {
        const std::size_t vi = i / periods.size();
        const auto& period = periods[i % periods.size()];
        VehicleCell& cell = cells[i];
        cell.vehicle = vehicles[vi];
        cell.sub_period = period.name;
        const auto& vp = vehicle_panels[vi];
        cell.assessment.asset_count = vp.asset_count();
        if (vp.asset_count() < 2) {
          cell.assessment.skipped_reason = "vehicle_too_small";
          return;
        }
        try {
          const auto sliced = slice(vp, period);
          cell.assessment = assess_herding(log_returns(sliced), options.fit);
        } catch (const Error& e) {
          if (e.code() != Errc::EmptySlice) throw;
          cell.assessment.skipped_reason = std::string(to_string(e.code()));
        }
      },
      options.threads);

  std::map<VehicleKey, VehicleCell> out;
  for (auto& c : cells) {
    VehicleKey key{c.vehicle, c.sub_period};
    out.emplace(std::move(key), std::move(c));
  }
  return out;
}

std::map<Sector, double> sector_distribution(std::span<const AssetMeta> members) {
  if (members.empty()) throw Error(Errc::EmptyCommunity, "community has no members");
  std::map<Sector, std::size_t> counts;
  for (const auto& m : members) ++counts[m.sector];
  std::map<Sector, double> out;
  for (const auto& [s, c] : counts) out[s] = static_cast<double>(c) / static_cast<double>(members.size());
  return out;
}

std::map<std::string, CombinedPeriod> run_combined(const AlignedPanel& panel, std::span<const SubPeriod> subs,
                                                   const AnalysisOptions& options) {
  if (panel.asset_count() < 3) throw Error(Errc::EmptyInput, "community detection needs at least 3 assets");
  const auto periods = with_full_period(panel, subs);
  std::vector<CombinedPeriod> results(periods.size());

  parallel_for(
      periods.size(),
      [&](std::size_t i) {
        CombinedPeriod& out = results[i];
        out.period = periods[i];
        AlignedPanel sliced;
        try {
          sliced = slice(panel, periods[i]);
        } catch (const Error& e) {
          if (e.code() != Errc::EmptySlice) throw;
          out.skipped_reason = std::string(to_string(e.code()));
          return;
        }
        const auto rp = log_returns(sliced);
        out.asset_count = rp.asset_count();
        out.n_obs = rp.time_count();
        out.csad = csad(rp);

        const auto cm = pearson_matrix(rp);
        out.tree = mst(to_distance(cm));
        for (const auto& e : out.tree.edges) out.edge_correlations.push_back(cm(e.source, e.target));

        const auto lv = louvain(graph_from_tree(out.tree, options.louvain_weights));
        out.partition = lv.partition;
        out.levels = lv.levels;

        const auto groups = out.partition.communities();
        for (std::size_t c = 0; c < groups.size(); ++c) {
          CommunityReport report;
          report.sub_period = out.period.name;
          report.community_id = c;
          std::vector<AssetMeta> metas;
          for (auto node : groups[c]) {
            report.members.push_back(rp.assets()[node].ticker);
            metas.push_back(rp.assets()[node]);
          }
          report.sector_distribution = sector_distribution(metas);
          report.assessment.asset_count = groups[c].size();
          report.assessment.n_obs = rp.time_count();
          if (groups[c].size() < options.min_community_size) {
            report.assessment.skipped_reason = "below_min_size";
          } else if (!options.with_herding) {
            report.assessment.skipped_reason = "graph_only";
          } else {
            report.assessment = assess_herding(rp.select(groups[c]), options.fit);
          }
          out.communities.push_back(std::move(report));
        }
      },
      options.threads);

  std::map<std::string, CombinedPeriod> out;
  for (auto& r : results) {
    auto name = r.period.name;
    out.emplace(std::move(name), std::move(r));
  }
  return out;
}

std::map<Vehicle, BetaReport> compute_betas(const AlignedPanel& panel, const AnalysisOptions& options) {
  const auto rp = log_returns(panel);
  std::vector<double> proxy;
  std::string proxy_name;
  if (options.beta_proxy.empty()) {
    proxy = csad(rp).market_return;
    proxy_name = std::string(kEqualWeightProxy);
  } else {
    const auto& assets = rp.assets();
    const auto it = std::find_if(assets.begin(), assets.end(),
                                 [&](const AssetMeta& a) { return a.ticker == options.beta_proxy; });
    if (it == assets.end()) throw Error(Errc::Config, "beta proxy " + options.beta_proxy + " is not in the panel");
    const auto r = rp.row(static_cast<std::size_t>(it - assets.begin()));
    proxy.assign(r.begin(), r.end());
    proxy_name = options.beta_proxy;
  }

  std::map<Vehicle, BetaReport> out;
  for (const auto v : requested_vehicles(panel, options)) {
    BetaReport report;
    report.proxy = proxy_name;
    for (std::size_t a = 0; a < rp.asset_count(); ++a) {
      const auto& meta = rp.assets()[a];
      if (meta.vehicle != v || meta.ticker == options.beta_proxy) continue;
      report.betas[meta.ticker] = capm_beta(rp.row(a), proxy);
    }
    if (report.betas.empty()) continue;
    const auto dist = beta_distance_stats(report.betas);
    report.mae = dist.mae;
    report.rmse = dist.rmse;
    out.emplace(v, std::move(report));
  }
  return out;
}

// ---- whole runs ------------------------------------------------------------

LoadedPanel load_panel(const InputConfig& input, std::optional<Vehicle> only) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(input.data_dir, ec))
    throw Error(Errc::Config, "data directory not found: " + input.data_dir.string());

  const auto sectors = input.sectors.empty() ? parse_sector_map(default_sector_map_text())
                                             : load_sector_map(input.sectors);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input.data_dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<AssetMeta> metas;
  std::vector<fs::path> selected;
  for (const auto& f : files) {
    const auto ticker = f.stem().string();
    const auto it = sectors.find(ticker);
    if (it == sectors.end()) throw Error(Errc::Config, "no sector map entry for " + ticker);
    if (only && it->second.vehicle != *only) continue;
    metas.push_back(it->second);
    selected.push_back(f);
  }
  if (selected.empty()) throw Error(Errc::EmptyInput, "no asset files in " + input.data_dir.string());

  const ZoneConverter zones(input.input_zone);
  std::vector<RawSeries> series(selected.size());
  parallel_for(selected.size(), [&](std::size_t i) { series[i] = load_bars(selected[i], metas[i].ticker, zones); });

  const auto grid = consensus_grid(series, input.window);
  LoadedPanel out;
  std::vector<RawSeries> accepted;
  std::vector<AssetMeta> accepted_meta;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto decision = filter_by_missing(series[i], grid, metas[i].vehicle, input.thresholds);
    if (decision.accepted) {
      accepted.push_back(std::move(series[i]));
      accepted_meta.push_back(metas[i]);
    } else {
      out.rejected.push_back({metas[i].ticker, decision.missing_fraction});
    }
  }
  out.panel = align(accepted, accepted_meta, input.window);
  return out;
}

std::vector<SubPeriod> load_configured_subperiods(const InputConfig& input) {
  return input.subperiods.empty() ? parse_subperiods(default_subperiods_text()) : load_subperiods(input.subperiods);
}

AnalysisRun run_analysis(const InputConfig& input, const AnalysisOptions& options, std::optional<Vehicle> only,
                         bool record_timings) {
  using clock = std::chrono::steady_clock;
  AnalysisRun run;
  run.input = input;
  run.options = options;
  run.record_timings = record_timings;
  if (only) run.options.vehicles = {*only};

  auto stage = [&](const char* name, auto&& fn) {
    const auto t0 = clock::now();
    fn();
    if (record_timings) run.timings[name] = std::chrono::duration<double>(clock::now() - t0).count();
  };

  std::vector<SubPeriod> subs;
  LoadedPanel loaded;
  stage("load_config", [&] { subs = load_configured_subperiods(input); });
  stage("ingest", [&] { loaded = load_panel(input, only); });
  const auto& panel = loaded.panel;
  run.periods = with_full_period(panel, subs);
  run.asset_count = panel.asset_count();
  run.time_count = panel.time_count();
  run.fill_count = panel.fill_log().size();
  run.rejected = loaded.rejected;

  if (options.with_herding) {
    stage("per_vehicle", [&] { run.per_vehicle = run_per_vehicle(panel, subs, run.options); });
    stage("betas", [&] { run.betas = compute_betas(panel, run.options); });
  }
  stage("combined", [&] { run.combined = run_combined(panel, subs, run.options); });
  return run;
}

std::string file_token(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace herdscan
