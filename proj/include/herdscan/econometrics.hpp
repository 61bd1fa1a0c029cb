#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "herdscan/returns.hpp"

namespace herdscan {

enum class Model { Generic, CsadBasic, CsadUpDown, CapmBeta };

// Star convention of the reported tables: one star is the 1% level.
enum class Significance { At1pct, At5pct, At10pct, NotSignificant };

enum class CovarianceEstimator { Classical, NeweyWest };

std::string_view to_string(Model m);
std::string_view to_string(Significance s);
std::string_view stars(Significance s);
Significance grade(double p_value);

struct RegressionFit {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;   // +-inf for nonzero coefficients of an exact fit
  std::vector<double> p_values;  // two-sided
  std::vector<bool> estimated;   // false for columns dropped because their regime was empty
  std::size_t n_obs = 0;
  std::size_t dof = 0;
  double residual_variance = 0.0;
  Model model = Model::Generic;
  CovarianceEstimator estimator = CovarianceEstimator::Classical;
  bool degenerate_exact = false;  // residual variance below 1e-20; significance by sign only
};

struct OlsOptions {
  CovarianceEstimator estimator = CovarianceEstimator::Classical;
};

/// Newey-West bandwidth floor(4 (n/100)^(2/9)).
std::size_t newey_west_lag(std::size_t n);

/// Least squares via column-pivoted Householder QR on a column-scaled design.
RegressionFit ols(const Eigen::MatrixXd& design, std::span<const double> response,
                  const OlsOptions& options = {}, Model model = Model::Generic);

struct CsadFitOptions {
  std::size_t min_observations = 10;
  std::size_t min_regime_observations = 5;  // 0 lets an empty regime drop its columns
  OlsOptions ols;
};

/// CSAD_t = b0 + b1 |r_m,t| + b2 r_m,t^2
RegressionFit fit_csad_basic(const CsadSeries& cs, const CsadFitOptions& options = {});

/// CSAD_t = g0 + g1 Dup|r_m| + g2 Dup r_m^2 + g3' Ddown|r_m| + g4' Ddown r_m^2
/// (columns in that order).
RegressionFit fit_csad_updown(const CsadSeries& cs, const CsadFitOptions& options = {});

struct HerdingVerdict {
  double beta2 = 0.0;
  double beta2_t = 0.0;
  Significance beta2_significance = Significance::NotSignificant;
  // Curvature of the up regime (column 2 of the up/down model).
  double gamma2 = 0.0;
  double gamma2_t = 0.0;
  Significance gamma2_significance = Significance::NotSignificant;
  // Curvature of the down regime (column 4 of the up/down model).
  double gamma3 = 0.0;
  double gamma3_t = 0.0;
  Significance gamma3_significance = Significance::NotSignificant;
  bool has_updown = false;
  bool degenerate_exact = false;
  bool herding_overall = false;
  bool herding_up = false;
  bool herding_down = false;
  bool herding_any = false;
};

HerdingVerdict verdict(const RegressionFit& basic, const std::optional<RegressionFit>& updown);

/// Slope of `asset` on `proxy` with intercept: cov / var.
double capm_beta(std::span<const double> asset, std::span<const double> proxy);

struct BetaDistance {
  double mae = 0.0;
  double rmse = 0.0;
};

BetaDistance beta_distance_stats(const std::map<std::string, double>& betas);

struct BetaReport {
  std::string proxy;  // ticker or "equal-weight market"
  std::map<std::string, double> betas;
  double mae = 0.0;
  double rmse = 0.0;
};

}  // namespace herdscan
