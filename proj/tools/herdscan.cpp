#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "herdscan/error.hpp"
#include "herdscan/pipeline.hpp"

namespace fs = std::filesystem;
using namespace herdscan;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CommonArgs {
  std::string data_dir;
  std::string sectors;
  std::string subperiods;
  std::string tz = "America/New_York";
  std::string vehicle = "all";
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool subperiods_required) {
  cmd->add_option("--data-dir", args.data_dir, "Directory with one <TICKER>.csv per asset")->required();
  cmd->add_option("--sectors", args.sectors, "Ticker classification file (default: bundled)");
  auto* sub = cmd->add_option("--subperiods", args.subperiods, "Sub-period file name,start,end");
  if (subperiods_required) sub->required();
  cmd->add_option("--tz", args.tz, "Time zone of timestamps without an offset");
  cmd->add_option("--out", args.out, "Output directory")->required();
}

InputConfig input_from(const CommonArgs& args) {
  InputConfig input;
  input.data_dir = args.data_dir;
  input.sectors = args.sectors;
  input.subperiods = args.subperiods;
  input.input_zone = args.tz;
  return input;
}

std::optional<Vehicle> vehicle_from(const std::string& text) {
  if (text == "all") return std::nullopt;
  const auto v = parse_vehicle(text);
  if (!v) throw Error(Errc::Config, "unknown vehicle " + text);
  return v;
}

void report_written(const std::vector<fs::path>& files, const fs::path& dir) {
  std::cout << "wrote " << files.size() << " files to " << dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Herding detection on intraday multi-asset panels"};
  app.require_subcommand(1);

  CommonArgs analyze_args;
  std::size_t min_size = 4;
  bool hac = false;
  std::string beta_proxy;
  std::string weights = "unit";
  bool dump_csad = false;
  bool timings = false;
  auto* analyze = app.add_subcommand("analyze", "Per-vehicle and per-community herding analysis");
  add_common(analyze, analyze_args, false);
  analyze->add_option("--vehicle", analyze_args.vehicle, "stock|etf|crypto|all")
      ->check(CLI::IsMember({"stock", "etf", "crypto", "all"}));
  analyze->add_option("--min-community-size", min_size, "Smallest community that gets a regression");
  analyze->add_flag("--hac", hac, "Newey-West standard errors");
  analyze->add_option("--beta-proxy", beta_proxy, "Ticker used as market proxy for betas");
  analyze->add_option("--louvain-weights", weights, "unit|similarity")->check(CLI::IsMember({"unit", "similarity"}));
  analyze->add_flag("--dump-csad", dump_csad, "Also write csad_<period>.csv");
  analyze->add_flag("--timings", timings, "Record stage durations in run.json");

  CommonArgs communities_args;
  std::string communities_weights = "unit";
  auto* communities = app.add_subcommand("communities", "MST and Louvain partition per sub-period");
  add_common(communities, communities_args, true);
  communities->add_option("--louvain-weights", communities_weights, "unit|similarity")
      ->check(CLI::IsMember({"unit", "similarity"}));

  CommonArgs csad_args;
  auto* csad_cmd = app.add_subcommand("csad", "Market return and CSAD series");
  add_common(csad_cmd, csad_args, false);
  csad_cmd->add_option("--vehicle", csad_args.vehicle, "stock|etf|crypto|all")
      ->check(CLI::IsMember({"stock", "etf", "crypto", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*analyze) {
      AnalysisOptions options;
      options.min_community_size = min_size;
      options.fit.ols.estimator = hac ? CovarianceEstimator::NeweyWest : CovarianceEstimator::Classical;
      options.beta_proxy = beta_proxy;
      options.louvain_weights = weights == "unit" ? EdgeWeighting::Unit : EdgeWeighting::Similarity;
      auto run = run_analysis(input_from(analyze_args), options, vehicle_from(analyze_args.vehicle), timings);
      run.dump_csad = dump_csad;
      report_written(emit_report(run, analyze_args.out), analyze_args.out);
    } else if (*communities) {
      AnalysisOptions options;
      options.with_herding = false;
      options.louvain_weights = communities_weights == "unit" ? EdgeWeighting::Unit : EdgeWeighting::Similarity;
      auto run = run_analysis(input_from(communities_args), options, std::nullopt);
      run.command = "communities";
      report_written(emit_report(run, communities_args.out), communities_args.out);
    } else if (*csad_cmd) {
      const auto input = input_from(csad_args);
      const auto loaded = load_panel(input, vehicle_from(csad_args.vehicle));
      const fs::path dir = csad_args.out;
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string());
      std::vector<fs::path> written;
      auto write = [&](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        out.close();
        if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
        written.push_back(path);
      };
      write(dir / "csad.csv", csad_csv(csad(log_returns(loaded.panel))));
      if (!csad_args.subperiods.empty()) {
        for (const auto& sub : load_configured_subperiods(input)) {
          try {
            write(dir / ("csad_" + file_token(sub.name) + ".csv"), csad_csv(csad(log_returns(slice(loaded.panel, sub)))));
          } catch (const Error& e) {
            if (e.code() != Errc::EmptySlice) throw;
            std::cerr << "skipping " << sub.name << ": " << e.what() << '\n';
          }
        }
      }
      report_written(written, dir);
    }
  } catch (const Error& e) {
    std::cerr << "herdscan: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "herdscan: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
