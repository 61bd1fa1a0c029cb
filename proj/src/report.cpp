#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "herdscan/error.hpp"
#include "herdscan/format.hpp"
#include "herdscan/pipeline.hpp"

namespace herdscan {

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json fit_json(const RegressionFit& f) {
  json estimated = json::array();
  for (bool b : f.estimated) estimated.push_back(b);
  return {{"model", to_string(f.model)},
          {"estimator", f.estimator == CovarianceEstimator::NeweyWest ? "newey-west" : "classical"},
          {"coefficients", numbers(f.coefficients)},
          {"std_errors", numbers(f.std_errors)},
          {"t_stats", numbers(f.t_stats)},
          {"p_values", numbers(f.p_values)},
          {"estimated", estimated},
          {"n_obs", f.n_obs},
          {"dof", f.dof},
          {"residual_variance", number(f.residual_variance)},
          {"degenerate_exact", f.degenerate_exact}};
}

json verdict_json(const HerdingVerdict& v) {
  return {{"beta2", number(v.beta2)},
          {"beta2_t", number(v.beta2_t)},
          {"beta2_significance", to_string(v.beta2_significance)},
          {"gamma2", number(v.gamma2)},
          {"gamma2_t", number(v.gamma2_t)},
          {"gamma2_significance", to_string(v.gamma2_significance)},
          {"gamma3", number(v.gamma3)},
          {"gamma3_t", number(v.gamma3_t)},
          {"gamma3_significance", to_string(v.gamma3_significance)},
          {"has_updown", v.has_updown},
          {"degenerate_exact", v.degenerate_exact},
          {"herding_overall", v.herding_overall},
          {"herding_up", v.herding_up},
          {"herding_down", v.herding_down},
          {"herding_any", v.herding_any}};
}

json assessment_json(const HerdingAssessment& a) {
  json out = {{"asset_count", a.asset_count}, {"n_obs", a.n_obs}};
  out["basic"] = a.basic ? fit_json(*a.basic) : json(nullptr);
  out["updown"] = a.updown ? fit_json(*a.updown) : json(nullptr);
  out["verdict"] = a.verdict ? verdict_json(*a.verdict) : json(nullptr);
  out["skipped_reason"] = a.skipped_reason.empty() ? json(nullptr) : json(a.skipped_reason);
  out["updown_skipped_reason"] = a.updown_skipped_reason.empty() ? json(nullptr) : json(a.updown_skipped_reason);
  return out;
}

json sectors_json(const std::map<Sector, double>& dist) {
  json out = json::object();
  for (const auto& [s, f] : dist) out[std::string(to_string(s))] = number(f);
  return out;
}

json config_json(const AnalysisRun& run) {
  json vehicles = json::array();
  for (auto v : run.options.vehicles) vehicles.push_back(to_string(v));
  json periods = json::array();
  for (const auto& p : run.periods)
    periods.push_back({{"name", p.name}, {"start", format_date(p.start)}, {"end", format_date(p.end)}});
  return {
      {"command", run.command},
      {"data_dir", run.input.data_dir.generic_string()},
      {"sectors", run.input.sectors.empty() ? json("bundled") : json(run.input.sectors.generic_string())},
      {"subperiods", run.input.subperiods.empty() ? json("bundled") : json(run.input.subperiods.generic_string())},
      {"input_zone", run.input.input_zone},
      {"missing_thresholds",
       {{"stock", run.input.thresholds.stock},
        {"crypto", run.input.thresholds.crypto},
        {"us_etf", run.input.thresholds.us_etf}}},
      {"trading_window", {{"start_minute", run.input.window.start_minute}, {"end_minute", run.input.window.end_minute}}},
      {"vehicles", vehicles},
      {"min_community_size", run.options.min_community_size},
      {"louvain_weights", run.options.louvain_weights == EdgeWeighting::Unit ? "unit" : "similarity"},
      {"estimator", run.options.fit.ols.estimator == CovarianceEstimator::NeweyWest ? "newey-west" : "classical"},
      {"min_observations", run.options.fit.min_observations},
      {"min_regime_observations", run.options.fit.min_regime_observations},
      {"beta_proxy", run.options.beta_proxy.empty() ? json(kEqualWeightProxy) : json(run.options.beta_proxy)},
      {"herding", run.options.with_herding},
      {"periods", periods},
  };
}

std::string bool_cell(bool b) { return b ? "true" : "false"; }

// Verdict columns shared by verdicts.csv and communities_<sub>.csv.
constexpr const char* kVerdictHeader =
    "beta2,beta2_t,beta2_sig,gamma2,gamma2_t,gamma2_sig,gamma3,gamma3_t,gamma3_sig,"
    "herding_overall,herding_up,herding_down,herding_any,degenerate_exact,skipped_reason";

std::string verdict_cells(const HerdingAssessment& a) {
  if (!a.verdict) return ",,,,,,,,,,,,,," + a.skipped_reason;
  const auto& v = *a.verdict;
  std::string out;
  out += format_number(v.beta2) + ',' + format_number(v.beta2_t) + ',' + std::string(stars(v.beta2_significance));
  if (v.has_updown) {
    out += ',' + format_number(v.gamma2) + ',' + format_number(v.gamma2_t) + ',' +
           std::string(stars(v.gamma2_significance));
    out += ',' + format_number(v.gamma3) + ',' + format_number(v.gamma3_t) + ',' +
           std::string(stars(v.gamma3_significance));
  } else {
    out += ",,,,,,";
  }
  out += ',' + bool_cell(v.herding_overall) + ',' + bool_cell(v.herding_up) + ',' + bool_cell(v.herding_down) +
         ',' + bool_cell(v.herding_any) + ',' + bool_cell(v.degenerate_exact) + ',';
  out += a.updown_skipped_reason.empty() ? "" : "updown:" + a.updown_skipped_reason;
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
}

std::string communities_csv(const CombinedPeriod& cp) {
  std::string out = "community_id,size,members,sector_distribution,";
  out += kVerdictHeader;
  out += '\n';
  for (const auto& c : cp.communities) {
    std::vector<std::string> dist;
    for (const auto& [s, f] : c.sector_distribution) dist.push_back(std::string(to_string(s)) + ':' + format_number(f));
    out += std::to_string(c.community_id) + ',' + std::to_string(c.members.size()) + ',' + join(c.members, ' ') +
           ',' + join(dist, ';') + ',' + verdict_cells(c.assessment) + '\n';
  }
  return out;
}

std::string partition_csv(const CombinedPeriod& cp) {
  std::string out = "ticker,community_id\n";
  for (std::size_t i = 0; i < cp.tree.nodes.size(); ++i)
    out += cp.tree.nodes[i] + ',' + std::to_string(cp.partition.assignment[i]) + '\n';
  return out;
}

std::string mst_csv(const CombinedPeriod& cp) {
  std::string out = "source,target,correlation,distance\n";
  for (std::size_t e = 0; e < cp.tree.edges.size(); ++e) {
    const auto& edge = cp.tree.edges[e];
    out += cp.tree.nodes[edge.source] + ',' + cp.tree.nodes[edge.target] + ',' +
           format_number(cp.edge_correlations[e]) + ',' + format_number(edge.weight) + '\n';
  }
  return out;
}

// Bar heights: |t| of each curvature test where it signals herding, else 0.
std::string plotdata_csv(const CombinedPeriod& cp) {
  std::string out = "community_id,size,beta2_abs_t,gamma2_abs_t,gamma3_abs_t";
  for (int s = 0; s < kSectorCount; ++s) out += std::string(",") + std::string(to_string(static_cast<Sector>(s)));
  out += '\n';
  for (const auto& c : cp.communities) {
    double b = 0.0, up = 0.0, down = 0.0;
    if (const auto& v = c.assessment.verdict) {
      if (v->herding_overall) b = std::abs(v->beta2_t);
      if (v->herding_up) up = std::abs(v->gamma2_t);
      if (v->herding_down) down = std::abs(v->gamma3_t);
    }
    out += std::to_string(c.community_id) + ',' + std::to_string(c.members.size()) + ',' + format_number(b) + ',' +
           format_number(up) + ',' + format_number(down);
    for (int s = 0; s < kSectorCount; ++s) {
      const auto it = c.sector_distribution.find(static_cast<Sector>(s));
      out += ',' + format_number(it == c.sector_distribution.end() ? 0.0 : it->second);
    }
    out += '\n';
  }
  return out;
}

json combined_json(const CombinedPeriod& cp) {
  json out = {{"start", format_date(cp.period.start)},
              {"end", format_date(cp.period.end)},
              {"skipped_reason", cp.skipped_reason.empty() ? json(nullptr) : json(cp.skipped_reason)},
              {"asset_count", cp.asset_count},
              {"n_obs", cp.n_obs}};
  if (!cp.skipped_reason.empty()) return out;
  out["mst_edge_count"] = cp.tree.edges.size();
  out["mst_total_weight"] = number(cp.tree.total_weight);
  out["modularity"] = number(cp.partition.modularity);
  out["community_count"] = cp.partition.community_count;
  json levels = json::array();
  for (const auto& l : cp.levels)
    levels.push_back({{"node_count", l.node_count},
                      {"total_weight", number(l.total_weight)},
                      {"modularity_before", number(l.modularity_before)},
                      {"modularity_after", number(l.modularity_after)},
                      {"sweeps", l.sweeps}});
  out["louvain_levels"] = levels;
  json communities = json::array();
  for (const auto& c : cp.communities)
    communities.push_back({{"community_id", c.community_id},
                           {"members", c.members},
                           {"sector_distribution", sectors_json(c.sector_distribution)},
                           {"assessment", assessment_json(c.assessment)}});
  out["communities"] = communities;
  return out;
}

}  // namespace

std::string config_digest(const AnalysisRun& run) {
  const auto text = config_json(run).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string csad_csv(const CsadSeries& cs) {
  std::string out = "timestamp,market_return,csad\n";
  for (std::size_t t = 0; t < cs.size(); ++t)
    out += cs.grid[t].to_string() + ',' + format_number(cs.market_return[t]) + ',' + format_number(cs.csad[t]) + '\n';
  return out;
}

std::vector<std::filesystem::path> emit_report(const AnalysisRun& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    written.push_back(dir / name);
    write_file(written.back(), content);
  };

  json config = config_json(run);
  config["config_digest"] = config_digest(run);
  json rejected = json::array();
  for (const auto& r : run.rejected) rejected.push_back({{"ticker", r.ticker}, {"missing_fraction", number(r.missing_fraction)}});
  config["input_summary"] = {{"asset_count", run.asset_count},
                             {"time_count", run.time_count},
                             {"fill_count", run.fill_count},
                             {"rejected", rejected}};

  json per_vehicle = json::object();
  for (const auto& [key, cell] : run.per_vehicle)
    per_vehicle[std::string(to_string(key.first))][key.second] = assessment_json(cell.assessment);

  json combined = json::object();
  for (const auto& [name, cp] : run.combined) combined[name] = combined_json(cp);

  json betas = json::object();
  for (const auto& [v, report] : run.betas) {
    json b = json::object();
    for (const auto& [ticker, beta] : report.betas) b[ticker] = number(beta);
    betas[std::string(to_string(v))] = {
        {"proxy", report.proxy}, {"betas", b}, {"mae", number(report.mae)}, {"rmse", number(report.rmse)}};
  }

  json timings = {{"recorded", run.record_timings}};
  if (run.record_timings) {
    json seconds = json::object();
    for (const auto& [stage, s] : run.timings) seconds[stage] = number(s);
    timings["seconds"] = seconds;
  }

  const json doc = {{"schema_version", kSchemaVersion}, {"config", config},     {"per_vehicle", per_vehicle},
                    {"combined", combined},             {"betas", betas},       {"timings", timings}};
  emit("run.json", doc.dump(2) + '\n');

  if (run.options.with_herding) {
    std::string verdicts = "vehicle,sub_period,asset_count,n_obs,";
    verdicts += kVerdictHeader;
    verdicts += '\n';
    for (const auto& [key, cell] : run.per_vehicle)
      verdicts += std::string(to_string(key.first)) + ',' + key.second + ',' +
                  std::to_string(cell.assessment.asset_count) + ',' + std::to_string(cell.assessment.n_obs) + ',' +
                  verdict_cells(cell.assessment) + '\n';
    emit("verdicts.csv", verdicts);
  }

  for (const auto& period : run.periods) {
    const auto it = run.combined.find(period.name);
    if (it == run.combined.end() || !it->second.skipped_reason.empty()) continue;
    const auto& cp = it->second;
    const auto token = file_token(period.name);
    emit("partition_" + token + ".csv", partition_csv(cp));
    emit("mst_" + token + ".csv", mst_csv(cp));
    emit("communities_" + token + ".csv", communities_csv(cp));
    if (run.options.with_herding) emit("plotdata_" + token + ".csv", plotdata_csv(cp));
    if (run.dump_csad && cp.csad) emit("csad_" + token + ".csv", csad_csv(*cp.csad));
  }
  return written;
}

}  // namespace herdscan
