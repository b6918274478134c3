#include "matchfn/pipeline.hpp"

#include "matchfn/error.hpp"

#include <algorithm>

namespace matchfn {

namespace {

Period earliest_period(const MarketPanel& panel, const std::string& region) {
  for (const auto& o : panel.observations()) {
    if (o.region == region) return o.period;
  }
  throw ValidationError("unknown region '" + region + "'");
}

struct BlockOutput {
  EstimationBlock block;
  EfficiencySeries series;
  MatchingSurface surface;
};

BlockOutput run_block(const MarketPanel& panel, const BasePoint& base, const EstimateOptions& options) {
  const auto estimator = ConditionalCdfEstimator::fit(panel, options.kernel);
  const auto grid = options.grid ? *options.grid : default_scale_grid(panel, base, options.psi_points, options.lambda_points);
  auto dist = monotonize(trace_distribution(estimator, base, grid));
  if (dist.missing_count() == dist.values.size()) {
    throw NoLocalSupportError("no local support anywhere on the scale grid");
  }
  BlockOutput out;
  out.series = recover_efficiency(estimator, dist, panel, base);
  out.surface = recover_surface(estimator, dist, out.series, panel, base);
  if (const auto missing = dist.missing_count()) {
    out.series.warnings.push_back(std::to_string(missing) + " distribution cells without local support");
  }
  out.block.regions = panel.regions();
  out.block.base = base;
  out.block.distribution = std::move(dist);
  return out;
}

}  // namespace

double EstimationResult::clamped_fraction() const {
  if (efficiency.rows.empty()) return 0.0;
  return static_cast<double>(efficiency.clamped_count()) / static_cast<double>(efficiency.rows.size());
}

EstimationResult estimate(const MarketPanel& panel, const EstimateOptions& options) {
  if (panel.empty()) throw ValidationError("cannot estimate on an empty panel");
  const auto regions = panel.regions();
  EstimationResult result;
  result.anchor_region = options.anchor_region.value_or(regions.front());
  if (!panel.has_region(result.anchor_region)) {
    throw ValidationError("unknown anchor region '" + result.anchor_region + "'");
  }
  result.anchor = options.anchor.value_or(earliest_period(panel, result.anchor_region));

  std::vector<BlockOutput> blocks;
  if (options.per_region_anchor && regions.size() > 1) {
    for (const auto& r : regions) {
      const auto slice = slice_region(panel, r);
      blocks.push_back(run_block(slice, default_base_point(slice, result.anchor, r), options));
    }
  } else {
    blocks.push_back(run_block(panel, default_base_point(panel, result.anchor, result.anchor_region), options));
  }

  for (auto& b : blocks) {
    auto& eff = result.efficiency;
    eff.rows.insert(eff.rows.end(), b.series.rows.begin(), b.series.rows.end());
    eff.warnings.insert(eff.warnings.end(), b.series.warnings.begin(), b.series.warnings.end());
    result.surface.points.insert(result.surface.points.end(), b.surface.points.begin(), b.surface.points.end());
    result.surface.monotonicity_violations += b.surface.monotonicity_violations;
    result.blocks.push_back(std::move(b.block));
  }
  // Blocks were built from region slices in panel order, so rows stay aligned.
  result.efficiency = options.per_region_anchor && regions.size() > 1
                          ? normalize_index_per_region(std::move(result.efficiency), result.anchor)
                          : normalize_index(std::move(result.efficiency), result.anchor, result.anchor_region);
  result.warnings = result.efficiency.warnings;

  result.elasticity.reserve(panel.size());
  for (const auto& r : regions) {
    std::vector<ElasticityInput> rows;
    std::vector<double> af, m, e;
    for (std::size_t t = 0; t < panel.size(); ++t) {
      const auto& o = panel[t];
      if (o.region != r) continue;
      const double x = result.efficiency.rows[t].a_raw * static_cast<double>(o.females);
      rows.push_back({o.period, o.region, x, static_cast<double>(o.males), static_cast<double>(o.engagements)});
      af.push_back(x);
      m.push_back(rows.back().m);
      e.push_back(rows.back().e);
    }
    result.surfaces.push_back(QuadraticSurface::fit(af, m, e, options.lasso, options.surface_scale));
    auto series = elasticity_series(result.surfaces.back(), rows, options.denominator);
    for (const auto& row : series) {
      if (!row.value) {
        result.warnings.push_back("elasticity undefined at " + row.period.str() +
                                  (row.region.empty() ? std::string{} : " " + row.region));
      }
    }
    result.elasticity.insert(result.elasticity.end(), series.begin(), series.end());
  }
  return result;
}

}  // namespace matchfn
