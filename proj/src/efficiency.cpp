#include "matchfn/efficiency.hpp"

#include "matchfn/error.hpp"
#include "matchfn/isotonic.hpp"
#include "matchfn/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace matchfn {

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

std::string row_label(const MarketObservation& o) {
  return o.period.str() + (o.region.empty() ? std::string{} : " " + o.region);
}

// Rescales a geometric axis by less than half a step so that its point
// nearest 1 is exactly 1; the base observation then sits on a grid node.
std::vector<double> through_one(std::vector<double> axis) {
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (std::abs(std::log(axis[i])) < std::abs(std::log(axis[nearest]))) nearest = i;
  }
  const double shift = 1.0 / axis[nearest];
  for (auto& v : axis) v *= shift;
  axis[nearest] = 1.0;
  return axis;
}

}  // namespace

BasePoint base_point_from(const MarketObservation& obs) {
  if (obs.engagements <= 0) {
    throw ValidationError("base point at " + row_label(obs) + " has E = 0; choose another anchor");
  }
  return {static_cast<double>(obs.engagements), static_cast<double>(obs.females), static_cast<double>(obs.males),
          obs.period, obs.region};
}

BasePoint default_base_point(const MarketPanel& panel, std::optional<Period> anchor,
                             std::optional<std::string> region) {
  if (panel.empty()) throw ValidationError("cannot choose a base point from an empty panel");
  const std::string reg = region.value_or(panel[0].region);
  if (!panel.has_region(reg)) throw ValidationError("unknown anchor region '" + reg + "'");
  if (!anchor) {
    for (const auto& o : panel.observations()) {
      if (o.region == reg) return base_point_from(o);
    }
  }
  const auto* obs = panel.find(*anchor, reg);
  if (!obs) {
    throw ValidationError("anchor " + anchor->str() + (reg.empty() ? "" : " " + reg) + " not in panel");
  }
  return base_point_from(*obs);
}

std::vector<double> ScaleGrid::geometric(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("geometric grid needs 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void ScaleGrid::validate() const {
  for (const auto* axis : {&psi, &lambda}) {
    if (axis->size() < 2) throw ValidationError("scale grid axes need at least two points");
    if (!(axis->front() > 0.0)) throw ValidationError("scale grid values must be positive");
    for (std::size_t i = 1; i < axis->size(); ++i) {
      if (!((*axis)[i] > (*axis)[i - 1])) throw ValidationError("scale grid must be strictly increasing");
    }
  }
}

ScaleGrid default_scale_grid(const MarketPanel& panel, const BasePoint& base, std::size_t n_psi,
                             std::size_t n_lambda) {
  double e_lo = INFINITY, e_hi = 0.0, f_lo = INFINITY, f_hi = 0.0;
  for (const auto& o : panel.observations()) {
    const double er = static_cast<double>(o.engagements) / base.e0;
    const double fr = static_cast<double>(o.females) / base.f0;
    if (er > 0.0) e_lo = std::min(e_lo, er);
    e_hi = std::max(e_hi, er);
    f_lo = std::min(f_lo, fr);
    f_hi = std::max(f_hi, fr);
  }
  if (!(e_hi > 0.0)) throw ValidationError("panel has no positive engagements");
  return {through_one(ScaleGrid::geometric(0.5 * e_lo, 2.0 * e_hi, n_psi)),
          through_one(ScaleGrid::geometric(0.5 * f_lo, 2.0 * f_hi, n_lambda))};
}

std::size_t EfficiencyDistribution::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }));
}

EfficiencyDistribution trace_distribution(const ConditionalCdfEstimator& estimator, const BasePoint& base,
                                          const ScaleGrid& grid) {
  grid.validate();
  EfficiencyDistribution dist;
  dist.grid = grid;
  dist.values.assign(grid.psi.size() * grid.lambda.size(), NAN);
  const auto cols = grid.lambda.size();
  parallel_for(dist.values.size(), [&](std::size_t cell) {
    const double psi = grid.psi[cell / cols];
    const double lambda = grid.lambda[cell % cols];
    // Efficiency psi A0 at female count lambda F0 gives effective input
    // psi lambda A0 F0; CRS maps it to the scaled base point.
    const double scale = psi * lambda;
    try {
      dist.values[cell] = estimator.cdf(scale * base.e0, {lambda * base.f0, scale * base.m0});
    } catch (const NoLocalSupportError&) {
      dist.values[cell] = NAN;
    }
  });
  return dist;
}

EfficiencyDistribution monotonize(EfficiencyDistribution dist) {
  std::vector<double> column;
  std::vector<std::size_t> index;
  for (std::size_t j = 0; j < dist.cols(); ++j) {
    column.clear();
    index.clear();
    for (std::size_t i = 0; i < dist.rows(); ++i) {
      if (!dist.missing(i, j)) {
        column.push_back(dist.at(i, j));
        index.push_back(i);
      }
    }
    const auto fitted = isotonic_fit(column);
    for (std::size_t k = 0; k < index.size(); ++k) dist.at(index[k], j) = fitted[k];
  }
  dist.monotonized = true;
  return dist;
}

double DistributionColumn::evaluate(double psi) const {
  const double x = std::log(psi);
  if (x <= log_psi.front()) return p.front();
  if (x >= log_psi.back()) return p.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(log_psi.begin(), log_psi.end(), x) - log_psi.begin());
  const auto lo = hi - 1;
  return lerp(p[lo], p[hi], (x - log_psi[lo]) / (log_psi[hi] - log_psi[lo]));
}

DistributionColumn::Inverse DistributionColumn::invert(double rank) const {
  if (rank < p.front()) return {std::exp(log_psi.front()), true};
  if (rank > p.back()) return {std::exp(log_psi.back()), true};
  // Last grid point whose CDF does not exceed the rank.
  const auto next = static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), rank) - p.begin());
  if (next == p.size()) return {std::exp(log_psi.back()), false};
  const auto lo = next - 1;
  const double t = (rank - p[lo]) / (p[next] - p[lo]);
  return {std::exp(lerp(log_psi[lo], log_psi[next], t)), false};
}

DistributionColumn column_at(const EfficiencyDistribution& dist, double lambda, bool* clamped) {
  const auto& lam = dist.grid.lambda;
  std::size_t j0 = 0, j1 = 0;
  double t = 0.0;
  bool outside = false;
  if (lambda <= lam.front()) {
    outside = lambda < lam.front();
  } else if (lambda >= lam.back()) {
    j0 = j1 = lam.size() - 1;
    outside = lambda > lam.back();
  } else {
    j1 = static_cast<std::size_t>(std::upper_bound(lam.begin(), lam.end(), lambda) - lam.begin());
    j0 = j1 - 1;
    t = (std::log(lambda) - std::log(lam[j0])) / (std::log(lam[j1]) - std::log(lam[j0]));
  }
  if (clamped) *clamped = outside;

  DistributionColumn col;
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    const double a = dist.at(i, j0);
    const double b = dist.at(i, j1);
    double v;
    if (std::isnan(a) && std::isnan(b)) continue;
    if (std::isnan(a)) v = b;
    else if (std::isnan(b)) v = a;
    else v = lerp(a, b, t);
    col.log_psi.push_back(std::log(dist.grid.psi[i]));
    col.p.push_back(v);
  }
  if (col.p.size() < 2) throw NoLocalSupportError("distribution column has fewer than two supported cells");
  // Mixing two monotone columns keeps monotonicity, but a missing cell on one
  // side can break it.
  col.p = isotonic_fit(col.p);
  return col;
}

std::size_t EfficiencySeries::clamped_count() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.support_edge; }));
}

EfficiencySeries recover_efficiency(const ConditionalCdfEstimator& estimator, const EfficiencyDistribution& dist,
                                    const MarketPanel& panel, const BasePoint& base) {
  if (!dist.monotonized) throw ValidationError("recover_efficiency requires a monotonized distribution");
  EfficiencySeries series;
  series.rows.resize(panel.size());
  std::vector<char> lambda_clamped(panel.size(), 0);
  parallel_for(panel.size(), [&](std::size_t t) {
    const auto& o = panel[t];
    const double f = static_cast<double>(o.females);
    const double m = static_cast<double>(o.males);
    auto& row = series.rows[t];
    row.period = o.period;
    row.region = o.region;
    row.rank = estimator.cdf(static_cast<double>(o.engagements), {f, m});
    bool outside = false;
    const auto col = column_at(dist, f / base.f0, &outside);
    const auto inv = col.invert(row.rank);
    row.a_raw = inv.psi;
    row.support_edge = inv.clamped || outside;
    lambda_clamped[t] = outside;
  });
  for (std::size_t t = 0; t < panel.size(); ++t) {
    if (!series.rows[t].support_edge) continue;
    std::ostringstream msg;
    msg << "support edge at " << row_label(panel[t]) << ": ";
    if (lambda_clamped[t]) msg << "F/F0 outside lambda grid";
    else msg << "rank " << series.rows[t].rank << " outside traced column range";
    series.warnings.push_back(msg.str());
  }
  return series;
}

EfficiencySeries normalize_index(EfficiencySeries series, const Period& anchor, const std::optional<std::string>& region) {
  const EfficiencyRow* anchor_row = nullptr;
  for (const auto& r : series.rows) {
    if (r.period != anchor || (region && r.region != *region)) continue;
    if (anchor_row) throw ValidationError("anchor " + anchor.str() + " is ambiguous across regions; name a region");
    anchor_row = &r;
  }
  if (!anchor_row) {
    throw ValidationError("anchor " + anchor.str() + (region ? " " + *region : std::string{}) + " missing from series");
  }
  const double base = anchor_row->a_raw;
  for (auto& r : series.rows) r.a_index = 100.0 * (r.a_raw / base);
  return series;
}

EfficiencySeries normalize_index_per_region(EfficiencySeries series, const Period& anchor) {
  std::vector<std::string> regions;
  for (const auto& r : series.rows) {
    if (std::find(regions.begin(), regions.end(), r.region) == regions.end()) regions.push_back(r.region);
  }
  for (const auto& reg : regions) {
    double base = NAN;
    for (const auto& r : series.rows) {
      if (r.region == reg && r.period == anchor) base = r.a_raw;
    }
    if (std::isnan(base)) throw ValidationError("anchor " + anchor.str() + " missing for region '" + reg + "'");
    for (auto& r : series.rows) {
      if (r.region == reg) r.a_index = 100.0 * (r.a_raw / base);
    }
  }
  return series;
}

MatchingSurface recover_surface(const ConditionalCdfEstimator& estimator, const EfficiencyDistribution& dist,
                                const EfficiencySeries& series, const MarketPanel& panel, const BasePoint& base) {
  if (series.rows.size() != panel.size()) throw ValidationError("series and panel differ in length");
  MatchingSurface surface;
  surface.points.resize(panel.size());
  parallel_for(panel.size(), [&](std::size_t t) {
    const auto& o = panel[t];
    const double f = static_cast<double>(o.females);
    const double m = static_cast<double>(o.males);
    const double a = series.rows[t].a_raw;
    const double p = std::clamp(column_at(dist, f / base.f0).evaluate(a), 0.0, 1.0);
    surface.points[t] = {o.period, o.region, a * f, m, estimator.quantile(p, {f, m}),
                         static_cast<double>(o.engagements), p};
  });
  const auto& pts = surface.points;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    for (std::size_t t = 0; t < pts.size(); ++t) {
      if (s != t && pts[s].effective_input <= pts[t].effective_input && pts[s].males <= pts[t].males &&
          pts[s].matches > pts[t].matches) {
        ++surface.monotonicity_violations;
      }
    }
  }
  return surface;
}

}  // namespace matchfn
