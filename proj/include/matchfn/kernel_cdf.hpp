#pragma once

#include "matchfn/panel.hpp"

#include <span>
#include <vector>

namespace matchfn {

/// How an observation whose E equals the threshold counts toward the CDF.
enum class TieRule {
  Strict,    // 1(E_t < e)
  Midpoint,  // ties count at half weight
};

struct KernelConfig {
  double bandwidth = 0.75;
  TieRule ties = TieRule::Strict;
};

/// Location and scale of log F and log M over the fitting panel.
struct LogStandardization {
  double mean_log_f = 0.0;
  double sd_log_f = 1.0;
  double mean_log_m = 0.0;
  double sd_log_m = 1.0;
};

/// Point in (F, M) space at which the conditional distribution is evaluated.
struct EvalPoint {
  double f = 1.0;
  double m = 1.0;
};

/// Nadaraya-Watson estimate of G(E | F, M) with a bivariate normal kernel on
/// standardized log F and log M.
///
/// Weights are normalized to sum to one so the result is a proper CDF. The
/// estimator owns a copy of the fitted data and is immutable after fit();
/// every query is const and safe to call concurrently.
class ConditionalCdfEstimator {
public:
  /// Throws ValidationError for fewer than two observations, non-positive
  /// bandwidth, or a zero-variance coordinate.
  static ConditionalCdfEstimator fit(const MarketPanel& panel, const KernelConfig& config = {});

  const KernelConfig& config() const noexcept { return config_; }
  const LogStandardization& standardization() const noexcept { return stats_; }
  std::size_t size() const noexcept { return e_.size(); }

  /// exp(-(u^2 + v^2) / (2 h^2)) with (u, v) the standardized log distances
  /// of the observation from the evaluation point. Equals 1 at zero distance.
  double kernel_weight(const MarketObservation& obs, const EvalPoint& at) const;

  /// Weighted share of observations with E below the threshold. Throws
  /// NoLocalSupportError if the total weight underflows to zero.
  double cdf(double e_threshold, const EvalPoint& at) const;

  /// Smallest candidate e with cdf(e) >= p (generalized inverse).
  double quantile(double p, const EvalPoint& at) const;

  /// Sorted quantile candidates: unique panel E values, 64 uniform points
  /// inside each gap, and one point above the largest E.
  std::span<const double> candidates() const noexcept { return candidates_; }

private:
  struct LocalWeights {
    std::vector<double> cumulative;  // cumulative[k] = sum of weights of the k smallest E
    double total = 0.0;
  };

  LocalWeights local_weights(const EvalPoint& at) const;
  double cdf_from(const LocalWeights& w, double e_threshold) const;

  KernelConfig config_;
  LogStandardization stats_;
  // Fitted data sorted by E.
  std::vector<double> e_;
  std::vector<double> z_f_;
  std::vector<double> z_m_;
  std::vector<double> candidates_;
};

}  // namespace matchfn
