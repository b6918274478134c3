#pragma once

#include "matchfn/kernel_cdf.hpp"
#include "matchfn/panel.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace matchfn {

/// Anchor (E0, F0, M0) at which efficiency is normalized to A0.
struct BasePoint {
  double e0 = 1.0;
  double f0 = 1.0;
  double m0 = 1.0;
  Period period;
  std::string region;
};

/// Base point taken from one observation. Throws ValidationError if E = 0.
BasePoint base_point_from(const MarketObservation& obs);

/// The observation at `anchor` (default: earliest period of `region`, or of
/// the panel's first region).
BasePoint default_base_point(const MarketPanel& panel, std::optional<Period> anchor = std::nullopt,
                             std::optional<std::string> region = std::nullopt);

/// Grids over the efficiency scale psi and the female-count scale lambda.
struct ScaleGrid {
  std::vector<double> psi;
  std::vector<double> lambda;

  /// n points spaced evenly in log between lo and hi.
  static std::vector<double> geometric(double lo, double hi, std::size_t n);
  /// Throws unless both axes are positive and strictly increasing with at
  /// least two points.
  void validate() const;
};

/// Geometric grids covering [0.5 min, 2 max] of E/e0 (psi) and F/f0
/// (lambda) over the panel, each shifted by under half a step so that it
/// passes through 1.
ScaleGrid default_scale_grid(const MarketPanel& panel, const BasePoint& base, std::size_t n_psi = 80,
                             std::size_t n_lambda = 40);

/// F(psi A0 | lambda F0) over a ScaleGrid, stored psi-major. Cells without
/// local kernel support hold NaN.
struct EfficiencyDistribution {
  ScaleGrid grid;
  std::vector<double> values;
  bool monotonized = false;

  std::size_t rows() const noexcept { return grid.psi.size(); }
  std::size_t cols() const noexcept { return grid.lambda.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
  bool missing(std::size_t i, std::size_t j) const { return std::isnan(at(i, j)); }
  std::size_t missing_count() const;
};

/// Traces the efficiency distribution through the CRS scaling identity
///   F(psi A0 | lambda F0) = G(psi lambda E0 | lambda F0, psi lambda M0),
/// one conditional CDF evaluation per grid cell (run in parallel).
EfficiencyDistribution trace_distribution(const ConditionalCdfEstimator& estimator, const BasePoint& base,
                                          const ScaleGrid& grid);

/// Isotonic (PAVA) projection of every lambda column onto nondecreasing
/// sequences in psi. Missing cells are skipped.
EfficiencyDistribution monotonize(EfficiencyDistribution dist);

/// One distribution column interpolated to an arbitrary lambda, in log psi.
struct DistributionColumn {
  std::vector<double> log_psi;
  std::vector<double> p;

  /// Column value at psi, piecewise linear in log psi, constant beyond the
  /// grid ends.
  double evaluate(double psi) const;

  struct Inverse {
    double psi = 1.0;
    bool clamped = false;
  };
  /// Largest psi whose CDF does not exceed `rank`, interpolated linearly in
  /// log psi. Ranks outside [p.front(), p.back()] clamp to a grid end.
  Inverse invert(double rank) const;
};

/// Column at lambda, linearly interpolated in log lambda between adjacent
/// grid columns. `clamped` is set when lambda lies outside the grid.
DistributionColumn column_at(const EfficiencyDistribution& dist, double lambda, bool* clamped = nullptr);

struct EfficiencyRow {
  Period period;
  std::string region;
  double rank = 0.0;      // G(E_t | F_t, M_t)
  double a_raw = 1.0;     // A_t / A0
  double a_index = NAN;   // filled by normalize_index
  bool support_edge = false;
};

struct EfficiencySeries {
  std::vector<EfficiencyRow> rows;
  std::vector<std::string> warnings;

  std::size_t clamped_count() const;
};

/// A_t = F^{-1}(G(E_t | F_t, M_t) | F_t) for every observation, in units of
/// A0. Requires a monotonized distribution.
EfficiencySeries recover_efficiency(const ConditionalCdfEstimator& estimator, const EfficiencyDistribution& dist,
                                    const MarketPanel& panel, const BasePoint& base);

/// a_index = 100 * a_raw / a_raw(anchor). With no region given the anchor
/// period must identify a single row.
EfficiencySeries normalize_index(EfficiencySeries series, const Period& anchor,
                                 const std::optional<std::string>& region = std::nullopt);

/// Anchors every region at its own row for `anchor`.
EfficiencySeries normalize_index_per_region(EfficiencySeries series, const Period& anchor);

struct SurfacePoint {
  Period period;
  std::string region;
  double effective_input = 0.0;  // A_t F_t in units of A0
  double males = 0.0;
  double matches = 0.0;          // recovered m(A_t F_t, M_t)
  double observed = 0.0;         // E_t
  double rank = 0.0;             // F(A_t | F_t) fed to the quantile
};

struct MatchingSurface {
  std::vector<SurfacePoint> points;
  /// Pairs (s, t) with AF_s <= AF_t and M_s <= M_t but m_s > m_t.
  std::size_t monotonicity_violations = 0;
};

/// m(A_t F_t, M_t) = G^{-1}(F(A_t | F_t) | F_t, M_t) at every observation.
MatchingSurface recover_surface(const ConditionalCdfEstimator& estimator, const EfficiencyDistribution& dist,
                                const EfficiencySeries& series, const MarketPanel& panel, const BasePoint& base);

}  // namespace matchfn
