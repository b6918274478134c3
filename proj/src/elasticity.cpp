#include "matchfn/elasticity.hpp"

#include "matchfn/error.hpp"

#include <cmath>

namespace matchfn {

std::array<double, 5> quadratic_features(double x, double y) { return {x, y, x * x, x * y, y * y}; }

StandardizedDesign build_design(std::span<const double> af, std::span<const double> m) {
  if (af.size() != m.size()) throw ValidationError("AF and M series differ in length");
  if (af.size() < 6) throw ValidationError("elasticity design needs at least 6 observations");
  std::vector<double> raw;
  raw.reserve(af.size() * 5);
  for (std::size_t i = 0; i < af.size(); ++i) {
    const auto f = quadratic_features(af[i], m[i]);
    raw.insert(raw.end(), f.begin(), f.end());
  }
  return standardize(raw, af.size(), 5);
}

QuadraticSurface QuadraticSurface::fit(std::span<const double> af, std::span<const double> m,
                                       std::span<const double> e, const LassoOptions& options, SurfaceScale scale) {
  if (af.size() != m.size() || af.size() != e.size()) throw ValidationError("AF, M and E differ in length");
  std::vector<double> xs, ys, target;
  for (std::size_t i = 0; i < af.size(); ++i) {
    if (!(af[i] > 0.0) || !(m[i] > 0.0)) throw ValidationError("AF and M must be positive");
    if (scale == SurfaceScale::LogLog) {
      if (!(e[i] > 0.0)) continue;
      xs.push_back(std::log(af[i]));
      ys.push_back(std::log(m[i]));
      target.push_back(std::log(e[i]));
    } else {
      xs.push_back(af[i]);
      ys.push_back(m[i]);
      target.push_back(e[i]);
    }
  }
  const auto design = build_design(xs, ys);

  QuadraticSurface s;
  s.scale_ = scale;
  s.fit_ = lasso_fit(design, target, options);
  double intercept = s.fit_.intercept;
  for (std::size_t k = 0; k < 5; ++k) {
    const double slope = s.fit_.coef[k] / design.sd[k];
    s.raw_[k + 1] = slope;
    intercept -= slope * design.mean[k];
  }
  s.raw_[0] = intercept;
  return s;
}

double QuadraticSurface::predict(double af, double m) const {
  const double x = scale_ == SurfaceScale::LogLog ? std::log(af) : af;
  const double y = scale_ == SurfaceScale::LogLog ? std::log(m) : m;
  const auto f = quadratic_features(x, y);
  double v = raw_[0];
  for (std::size_t k = 0; k < 5; ++k) v += raw_[k + 1] * f[k];
  return scale_ == SurfaceScale::LogLog ? std::exp(v) : v;
}

std::array<double, 2> QuadraticSurface::gradient(double x, double y) const {
  return {raw_[1] + 2.0 * raw_[3] * x + raw_[4] * y, raw_[2] + raw_[4] * x + 2.0 * raw_[5] * y};
}

ElasticityPair elasticity_at(const QuadraticSurface& surface, double af, double m, double denominator) {
  if (surface.scale() == SurfaceScale::LogLog) {
    const auto g = surface.gradient(std::log(af), std::log(m));
    return {g[0], g[1]};
  }
  if (!(denominator > 0.0)) throw ValidationError("elasticity undefined: non-positive denominator");
  const auto g = surface.gradient(af, m);
  return {g[0] * af / denominator, g[1] * m / denominator};
}

std::vector<ElasticityRow> elasticity_series(const QuadraticSurface& surface, std::span<const ElasticityInput> rows,
                                             ElasticityDenominator denominator) {
  std::vector<ElasticityRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    ElasticityRow row{r.period, r.region, surface.predict(r.af, r.m), std::nullopt};
    const double denom = denominator == ElasticityDenominator::Fitted ? row.e_fitted : r.e;
    try {
      const auto pair = elasticity_at(surface, r.af, r.m, denom);
      if (std::isfinite(pair.eps_f) && std::isfinite(pair.eps_m)) row.value = pair;
    } catch (const ValidationError&) {
      // reported as missing
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace matchfn
