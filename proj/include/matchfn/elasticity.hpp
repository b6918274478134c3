#pragma once

#include "matchfn/lasso.hpp"
#include "matchfn/period.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace matchfn {

/// (x, y, x^2, x y, y^2) with x = AF and y = M.
std::array<double, 5> quadratic_features(double x, double y);

/// Standardized second-order design over (AF, M). Requires at least six rows.
StandardizedDesign build_design(std::span<const double> af, std::span<const double> m);

enum class SurfaceScale {
  Levels,  // E on a quadratic in (AF, M)
  LogLog,  // log E on a quadratic in (log AF, log M)
};

enum class ElasticityDenominator {
  Fitted,    // divide by the fitted value
  Observed,  // divide by the observed E
};

/// LASSO-projected quadratic matching surface with raw-scale coefficients.
class QuadraticSurface {
public:
  /// Rows with E = 0 are dropped in LogLog mode.
  static QuadraticSurface fit(std::span<const double> af, std::span<const double> m, std::span<const double> e,
                              const LassoOptions& options = {}, SurfaceScale scale = SurfaceScale::Levels);

  SurfaceScale scale() const noexcept { return scale_; }
  const LassoFit& lasso() const noexcept { return fit_; }
  /// Intercept followed by raw coefficients on (x, y, x^2, xy, y^2).
  const std::array<double, 6>& raw_coefficients() const noexcept { return raw_; }

  /// Fitted E (levels, or exp of the fitted log in LogLog mode).
  double predict(double af, double m) const;
  /// Partial derivatives of the fitted quadratic in its own coordinates.
  std::array<double, 2> gradient(double x, double y) const;

private:
  LassoFit fit_;
  SurfaceScale scale_ = SurfaceScale::Levels;
  std::array<double, 6> raw_{};
};

struct ElasticityPair {
  double eps_f = 0.0;  // d ln m / d ln AF
  double eps_m = 0.0;  // d ln m / d ln M
};

/// Pointwise elasticities. In Levels mode eps = (dE/dx) x / denominator and
/// the denominator must be positive; otherwise throws ValidationError.
ElasticityPair elasticity_at(const QuadraticSurface& surface, double af, double m, double denominator);

struct ElasticityInput {
  Period period;
  std::string region;
  double af = 0.0;
  double m = 0.0;
  double e = 0.0;
};

struct ElasticityRow {
  Period period;
  std::string region;
  double e_fitted = 0.0;
  std::optional<ElasticityPair> value;  // empty where undefined
};

std::vector<ElasticityRow> elasticity_series(const QuadraticSurface& surface, std::span<const ElasticityInput> rows,
                                             ElasticityDenominator denominator = ElasticityDenominator::Fitted);

}  // namespace matchfn
