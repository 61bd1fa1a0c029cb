#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "herdscan/community.hpp"
#include "herdscan/econometrics.hpp"
#include "herdscan/graph.hpp"
#include "herdscan/ingest.hpp"
#include "herdscan/returns.hpp"

namespace herdscan {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kFullPeriod = "full";
inline constexpr std::string_view kEqualWeightProxy = "equal-weight market";

struct AnalysisOptions {
  std::vector<Vehicle> vehicles;  // empty: every vehicle present in the panel
  std::size_t min_community_size = 4;
  EdgeWeighting louvain_weights = EdgeWeighting::Unit;
  CsadFitOptions fit;
  std::string beta_proxy;  // empty: equal-weight mean of the panel
  bool with_herding = true;
  std::size_t threads = 0;  // 0: thread_limit()
};

/// Outcome of the two CSAD regressions on one cross-section.
struct HerdingAssessment {
  std::size_t asset_count = 0;
  std::size_t n_obs = 0;
  std::optional<RegressionFit> basic;
  std::optional<RegressionFit> updown;
  std::optional<HerdingVerdict> verdict;
  std::string skipped_reason;         // set iff verdict is absent
  std::string updown_skipped_reason;  // up/down model failed; verdict uses the basic model only
};

HerdingAssessment assess_herding(const ReturnPanel& rp, const CsadFitOptions& options);

struct VehicleCell {
  Vehicle vehicle = Vehicle::Stock;
  std::string sub_period;
  HerdingAssessment assessment;
};

using VehicleKey = std::pair<Vehicle, std::string>;

struct CommunityReport {
  std::string sub_period;
  std::size_t community_id = 0;
  std::vector<std::string> members;
  HerdingAssessment assessment;
  std::map<Sector, double> sector_distribution;
};

struct CombinedPeriod {
  SubPeriod period;
  std::string skipped_reason;  // e.g. the period has no data
  std::size_t asset_count = 0;
  std::size_t n_obs = 0;
  SpanningTree tree;
  std::vector<double> edge_correlations;  // parallel to tree.edges
  Partition partition;
  std::vector<LouvainLevel> levels;
  std::vector<CommunityReport> communities;
  std::optional<CsadSeries> csad;
};

/// Appends the whole-sample period "full" after the configured ones.
std::vector<SubPeriod> with_full_period(const AlignedPanel& panel, std::span<const SubPeriod> subs);

std::map<VehicleKey, VehicleCell> run_per_vehicle(const AlignedPanel& panel, std::span<const SubPeriod> subs,
                                                  const AnalysisOptions& options = {});

std::map<std::string, CombinedPeriod> run_combined(const AlignedPanel& panel, std::span<const SubPeriod> subs,
                                                   const AnalysisOptions& options = {});

std::map<Sector, double> sector_distribution(std::span<const AssetMeta> members);

std::map<Vehicle, BetaReport> compute_betas(const AlignedPanel& panel, const AnalysisOptions& options = {});

// ---- whole runs ------------------------------------------------------------

struct InputConfig {
  std::filesystem::path data_dir;
  std::filesystem::path sectors;     // empty: bundled example map
  std::filesystem::path subperiods;  // empty: bundled five-period config
  std::string input_zone = "America/New_York";
  MissingThresholds thresholds;
  TradingWindow window;
};

struct RejectedAsset {
  std::string ticker;
  double missing_fraction = 0.0;
};

struct LoadedPanel {
  AlignedPanel panel;
  std::vector<RejectedAsset> rejected;
};

/// Loads every *.csv under data_dir (ticker = file stem), drops assets over
/// their missing-value threshold and aligns the rest.
LoadedPanel load_panel(const InputConfig& input, std::optional<Vehicle> only = std::nullopt);

std::vector<SubPeriod> load_configured_subperiods(const InputConfig& input);

struct AnalysisRun {
  std::string command = "analyze";
  InputConfig input;
  AnalysisOptions options;
  std::vector<SubPeriod> periods;  // including "full"
  std::size_t asset_count = 0;
  std::size_t time_count = 0;
  std::size_t fill_count = 0;
  std::vector<RejectedAsset> rejected;
  std::map<VehicleKey, VehicleCell> per_vehicle;
  std::map<std::string, CombinedPeriod> combined;
  std::map<Vehicle, BetaReport> betas;
  std::map<std::string, double> timings;  // seconds per stage; empty unless recorded
  bool record_timings = false;
  bool dump_csad = false;
};

AnalysisRun run_analysis(const InputConfig& input, const AnalysisOptions& options, std::optional<Vehicle> only,
                         bool record_timings = false);

/// Hex FNV-1a digest of the canonical configuration JSON.
std::string config_digest(const AnalysisRun& run);

/// Writes run.json, verdicts.csv and, per period, communities_/partition_/
/// mst_/plotdata_ CSVs (plus csad_ when requested). Returns the paths written.
std::vector<std::filesystem::path> emit_report(const AnalysisRun& run, const std::filesystem::path& dir);

/// "timestamp,market_return,csad" rows.
std::string csad_csv(const CsadSeries& cs);

/// File-name-safe form of a period name.
std::string file_token(std::string_view name);

}  // namespace herdscan
