#pragma once

#include "matchfn/efficiency.hpp"
#include "matchfn/elasticity.hpp"
#include "matchfn/kernel_cdf.hpp"
#include "matchfn/panel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace matchfn {

struct EstimateOptions {
  KernelConfig kernel;
  /// Normalization period; default is the earliest period of the anchor region.
  std::optional<Period> anchor;
  /// Region whose anchor row is set to 100; default is the first region.
  std::optional<std::string> anchor_region;
  /// Estimate and anchor each region on its own instead of one pooled fit
  /// with a single cross-region anchor.
  bool per_region_anchor = false;
  std::size_t psi_points = 80;
  std::size_t lambda_points = 40;
  /// Explicit grids override the defaults built from the panel.
  std::optional<ScaleGrid> grid;
  LassoOptions lasso;
  SurfaceScale surface_scale = SurfaceScale::Levels;
  ElasticityDenominator denominator = ElasticityDenominator::Fitted;
};

/// Estimator state of one independently estimated block of the panel.
struct EstimationBlock {
  std::vector<std::string> regions;
  BasePoint base;
  EfficiencyDistribution distribution;
};

struct EstimationResult {
  Period anchor;
  std::string anchor_region;
  std::vector<EstimationBlock> blocks;
  EfficiencySeries efficiency;               // aligned with panel rows
  MatchingSurface surface;                   // aligned with panel rows
  std::vector<ElasticityRow> elasticity;     // aligned with panel rows
  std::vector<QuadraticSurface> surfaces;    // one LASSO fit per region
  std::vector<std::string> warnings;

  double clamped_fraction() const;
};

/// fit -> trace -> monotonize -> recover -> normalize -> surface -> LASSO ->
/// elasticities.
EstimationResult estimate(const MarketPanel& panel, const EstimateOptions& options = {});

}  // namespace matchfn
