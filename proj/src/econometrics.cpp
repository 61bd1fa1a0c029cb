#include "herdscan/econometrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "herdscan/error.hpp"
#include "herdscan/kernels.hpp"

namespace herdscan {

namespace {

constexpr double kExactFitVariance = 1e-20;
constexpr double kNegligibleContribution = 1e-8;

double two_sided_p(double t, std::size_t dof) {
  if (!std::isfinite(t)) return 0.0;
  const boost::math::students_t dist(static_cast<double>(dof));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::Generic: return "Generic";
    case Model::CsadBasic: return "CsadBasic";
    case Model::CsadUpDown: return "CsadUpDown";
    case Model::CapmBeta: return "CapmBeta";
  }
  return "?";
}

std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::At1pct: return "1%";
    case Significance::At5pct: return "5%";
    case Significance::At10pct: return "10%";
    case Significance::NotSignificant: return "ns";
  }
  return "?";
}

std::string_view stars(Significance s) {
  switch (s) {
    case Significance::At1pct: return "*";
    case Significance::At5pct: return "**";
    case Significance::At10pct: return "***";
    case Significance::NotSignificant: return "";
  }
  return "";
}

Significance grade(double p_value) {
  if (p_value < 0.01) return Significance::At1pct;
  if (p_value < 0.05) return Significance::At5pct;
  if (p_value < 0.10) return Significance::At10pct;
  return Significance::NotSignificant;
}

std::size_t newey_west_lag(std::size_t n) {
  return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

RegressionFit ols(const Eigen::MatrixXd& design, std::span<const double> response,
                  const OlsOptions& options, Model model) {
  const auto n = static_cast<std::size_t>(design.rows());
  const auto k = static_cast<std::size_t>(design.cols());
  if (response.size() != n) throw Error(Errc::TooFewObservations, "response length differs from design rows");
  if (k == 0 || n <= k)
    throw Error(Errc::TooFewObservations, std::to_string(n) + " observations for " + std::to_string(k) + " regressors");

  Eigen::VectorXd scale(k);
  for (std::size_t j = 0; j < k; ++j) {
    scale[j] = design.col(static_cast<Eigen::Index>(j)).norm();
    if (!(scale[j] > 0.0) || !std::isfinite(scale[j]))
      throw Error(Errc::RankDeficient, "column " + std::to_string(j) + " is zero or non-finite");
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  const Eigen::Map<const Eigen::VectorXd> y(response.data(), static_cast<Eigen::Index>(n));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (static_cast<std::size_t>(qr.rank()) < k) {
    const auto col = qr.colsPermutation().indices()[qr.rank()];
    throw Error(Errc::RankDeficient, "column " + std::to_string(col));
  }

  const Eigen::VectorXd beta = qr.solve(y).cwiseQuotient(scale);
  const Eigen::VectorXd resid = y - design * beta;
  const double rss = resid.squaredNorm();
  const std::size_t dof = n - k;

  RegressionFit fit;
  fit.n_obs = n;
  fit.dof = dof;
  fit.model = model;
  fit.estimator = options.estimator;
  fit.residual_variance = rss / static_cast<double>(dof);
  fit.coefficients.assign(beta.data(), beta.data() + k);
  fit.estimated.assign(k, true);

  // (X'X)^-1 = D^-1 P R^-1 R^-T P' D^-1
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))
                                .template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                                                                 static_cast<Eigen::Index>(k)));
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd bread = perm * (r_inv * r_inv.transpose()) * perm.transpose();
  bread = scale.cwiseInverse().asDiagonal() * bread * scale.cwiseInverse().asDiagonal();

  if (fit.residual_variance < kExactFitVariance) {
    fit.degenerate_exact = true;
    const double y_norm = y.norm();
    for (std::size_t j = 0; j < k; ++j) {
      const bool nonzero = std::fabs(beta[static_cast<Eigen::Index>(j)]) * scale[static_cast<Eigen::Index>(j)] >
                           kNegligibleContribution * y_norm;
      fit.std_errors.push_back(0.0);
      fit.t_stats.push_back(nonzero ? std::copysign(std::numeric_limits<double>::infinity(), beta[static_cast<Eigen::Index>(j)]) : 0.0);
      fit.p_values.push_back(nonzero ? 0.0 : 1.0);
    }
    return fit;
  }

  Eigen::MatrixXd cov;
  if (options.estimator == CovarianceEstimator::Classical) {
    cov = fit.residual_variance * bread;
  } else {
    const std::size_t lag = newey_west_lag(n);
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    const Eigen::MatrixXd xe = design.array().colwise() * resid.array();
    meat += xe.transpose() * xe;
    for (std::size_t l = 1; l <= lag && l < n; ++l) {
      const double w = 1.0 - static_cast<double>(l) / static_cast<double>(lag + 1);
      const auto rows = static_cast<Eigen::Index>(n - l);
      const Eigen::MatrixXd g = xe.bottomRows(rows).transpose() * xe.topRows(rows);
      meat += w * (g + g.transpose());
    }
    cov = bread * meat * bread;
  }

  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double se = std::sqrt(std::max(0.0, cov(jj, jj)));
    const double t = se > 0.0 ? beta[jj] / se : 0.0;
    fit.std_errors.push_back(se);
    fit.t_stats.push_back(t);
    fit.p_values.push_back(se > 0.0 ? two_sided_p(t, dof) : 1.0);
  }
  return fit;
}

namespace {

void check_csad_input(const CsadSeries& cs, const CsadFitOptions& options) {
  if (cs.size() < options.min_observations || cs.size() < 4)
    throw Error(Errc::TooFewObservations, std::to_string(cs.size()) + " usable timestamps, need " +
                                              std::to_string(options.min_observations));
  const auto [lo, hi] = std::minmax_element(cs.market_return.begin(), cs.market_return.end());
  if (*lo == *hi) throw Error(Errc::DegenerateRegressor, "market return is constant");
  if (std::all_of(cs.csad.begin(), cs.csad.end(), [](double v) { return v == 0.0; }))
    throw Error(Errc::DegenerateRegressor, "no cross-sectional dispersion");
}

}  // namespace

RegressionFit fit_csad_basic(const CsadSeries& cs, const CsadFitOptions& options) {
  check_csad_input(cs, options);
  const auto n = static_cast<Eigen::Index>(cs.size());
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double r = cs.market_return[static_cast<std::size_t>(t)];
    x(t, 0) = 1.0;
    x(t, 1) = std::fabs(r);
    x(t, 2) = r * r;
  }
  return ols(x, cs.csad, options.ols, Model::CsadBasic);
}

RegressionFit fit_csad_updown(const CsadSeries& cs, const CsadFitOptions& options) {
  check_csad_input(cs, options);
  const auto masks = up_down_masks(cs);
  const auto n_up = static_cast<std::size_t>(std::count(masks.up.begin(), masks.up.end(), true));
  const auto n_down = static_cast<std::size_t>(std::count(masks.down.begin(), masks.down.end(), true));
  if (n_up < options.min_regime_observations || n_down < options.min_regime_observations ||
      (n_up == 0 && n_down == 0))
    throw Error(Errc::OneSidedSample, std::to_string(n_up) + " up and " + std::to_string(n_down) +
                                          " down observations, need " +
                                          std::to_string(options.min_regime_observations) + " each");

  // Columns of an empty regime are dropped and reported as not estimated.
  std::vector<std::size_t> kept{0};
  if (n_up > 0) kept.insert(kept.end(), {1, 2});
  if (n_down > 0) kept.insert(kept.end(), {3, 4});

  const auto n = static_cast<Eigen::Index>(cs.size());
  Eigen::MatrixXd full(n, 5);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const double r = cs.market_return[i];
    const double up = masks.up[i] ? 1.0 : 0.0;
    const double down = masks.down[i] ? 1.0 : 0.0;
    full(t, 0) = 1.0;
    full(t, 1) = up * std::fabs(r);
    full(t, 2) = up * r * r;
    full(t, 3) = down * std::fabs(r);
    full(t, 4) = down * r * r;
  }
  if (kept.size() == 5) return ols(full, cs.csad, options.ols, Model::CsadUpDown);

  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j)
    x.col(static_cast<Eigen::Index>(j)) = full.col(static_cast<Eigen::Index>(kept[j]));
  const auto part = ols(x, cs.csad, options.ols, Model::CsadUpDown);

  RegressionFit fit = part;
  fit.coefficients.assign(5, 0.0);
  fit.std_errors.assign(5, 0.0);
  fit.t_stats.assign(5, 0.0);
  fit.p_values.assign(5, 1.0);
  fit.estimated.assign(5, false);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    fit.coefficients[kept[j]] = part.coefficients[j];
    fit.std_errors[kept[j]] = part.std_errors[j];
    fit.t_stats[kept[j]] = part.t_stats[j];
    fit.p_values[kept[j]] = part.p_values[j];
    fit.estimated[kept[j]] = true;
  }
  return fit;
}

HerdingVerdict verdict(const RegressionFit& basic, const std::optional<RegressionFit>& updown) {
  if (basic.model != Model::CsadBasic || basic.coefficients.size() != 3)
    throw Error(Errc::ModelMismatch, "first fit must be the basic CSAD model");
  if (updown && (updown->model != Model::CsadUpDown || updown->coefficients.size() != 5))
    throw Error(Errc::ModelMismatch, "second fit must be the up/down CSAD model");

  HerdingVerdict v;
  v.beta2 = basic.coefficients[2];
  v.beta2_t = basic.t_stats[2];
  v.beta2_significance = grade(basic.p_values[2]);
  v.degenerate_exact = basic.degenerate_exact;
  v.herding_overall = v.beta2 < 0.0 && v.beta2_significance != Significance::NotSignificant;

  if (updown) {
    v.has_updown = true;
    v.degenerate_exact = v.degenerate_exact || updown->degenerate_exact;
    v.gamma2 = updown->coefficients[2];
    v.gamma2_t = updown->t_stats[2];
    v.gamma2_significance = grade(updown->p_values[2]);
    v.gamma3 = updown->coefficients[4];
    v.gamma3_t = updown->t_stats[4];
    v.gamma3_significance = grade(updown->p_values[4]);
    v.herding_up = v.gamma2 < 0.0 && v.gamma2_significance != Significance::NotSignificant;
    v.herding_down = v.gamma3 < 0.0 && v.gamma3_significance != Significance::NotSignificant;
  }
  v.herding_any = v.herding_overall || v.herding_up || v.herding_down;
  return v;
}

double capm_beta(std::span<const double> asset, std::span<const double> proxy) {
  if (asset.size() != proxy.size()) throw Error(Errc::TooFewObservations, "asset and proxy lengths differ");
  if (asset.size() < 10) throw Error(Errc::TooFewObservations, "beta needs at least 10 observations");
  if (std::all_of(proxy.begin(), proxy.end(), [&](double v) { return v == proxy.front(); }))
    throw Error(Errc::ZeroVarianceProxy, "proxy returns are constant");

  const double n = static_cast<double>(proxy.size());
  std::vector<double> pc(proxy.begin(), proxy.end());
  std::vector<double> ac(asset.begin(), asset.end());
  kernels::subtract_scalar(pc, kernels::sum(proxy) / n);
  kernels::subtract_scalar(ac, kernels::sum(asset) / n);
  const double var = kernels::dot(pc, pc);
  if (!(var > 0.0)) throw Error(Errc::ZeroVarianceProxy, "proxy variance is zero");
  return kernels::dot(ac, pc) / var;
}

BetaDistance beta_distance_stats(const std::map<std::string, double>& betas) {
  if (betas.empty()) throw Error(Errc::EmptyInput, "no betas");
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (const auto& [ticker, beta] : betas) {
    const double d = beta - 1.0;
    abs_sum += std::fabs(d);
    sq_sum += d * d;
  }
  const double n = static_cast<double>(betas.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

}  // namespace herdscan
