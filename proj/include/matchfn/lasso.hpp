#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace matchfn {

/// Row-major n x p design whose columns are centered and scaled to unit
/// (population) variance. The statistics allow exact de-standardization.
struct StandardizedDesign {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> z;
  std::vector<double> mean;
  std::vector<double> sd;

  double operator()(std::size_t i, std::size_t j) const { return z[i * cols + j]; }
};

/// Throws ValidationError on a zero-variance column or when rows <= cols.
StandardizedDesign standardize(std::span<const double> raw, std::size_t rows, std::size_t cols);

struct CrossValidation {
  std::size_t folds = 5;
  std::size_t grid_points = 50;
  double min_ratio = 1e-4;  // smallest penalty as a fraction of lambda_max
};

struct LassoOptions {
  std::variant<double, CrossValidation> penalty = CrossValidation{};
  double tolerance = 1e-8;        // KKT residual on the standardized scale
  std::size_t max_sweeps = 10000;
};

struct LassoFit {
  double intercept = 0.0;         // unpenalized; equals mean(y) on centered features
  std::vector<double> coef;       // on standardized features
  double penalty = 0.0;
  std::size_t sweeps = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::vector<double> objective_history;  // after each sweep
  // Filled when the penalty came from cross-validation.
  std::vector<double> cv_penalties;
  std::vector<double> cv_errors;
};

/// Smallest penalty at which every slope is zero: max_j |z_j . (y - ybar)| / n.
double lambda_max(const StandardizedDesign& design, std::span<const double> y);

/// (1/2n) sum of squared residuals + penalty * sum |coef|.
double lasso_objective(const StandardizedDesign& design, std::span<const double> y, const LassoFit& fit);

/// Largest violation of the subgradient optimality conditions.
double kkt_residual(const StandardizedDesign& design, std::span<const double> y, const LassoFit& fit);

/// Cyclic coordinate descent with soft-thresholding, optionally choosing the
/// penalty by k-fold cross-validation over a geometric grid. Throws
/// ConvergenceError if the KKT tolerance is not met within max_sweeps.
LassoFit lasso_fit(const StandardizedDesign& design, std::span<const double> y, const LassoOptions& options = {});

/// Fitted values for standardized rows.
std::vector<double> lasso_predict(const StandardizedDesign& design, const LassoFit& fit);

}  // namespace matchfn
