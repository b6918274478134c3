#include "matchfn/lasso.hpp"

#include "matchfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace matchfn {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

double mean_of(std::span<const double> y) {
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

void check_target(const StandardizedDesign& design, std::span<const double> y) {
  if (y.size() != design.rows) throw ValidationError("target length does not match design rows");
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("lasso target must be finite");
  }
}

/// Coordinate descent on a residual vector. `coef` is the warm start and
/// receives the solution.
struct Solver {
  const StandardizedDesign& x;
  std::vector<double> residual;
  std::vector<double> diag;  // z_j . z_j / n
  double n;

  Solver(const StandardizedDesign& design, std::span<const double> y, std::span<const double> coef)
      : x(design), residual(design.rows), diag(design.cols, 0.0), n(static_cast<double>(design.rows)) {
    const double ybar = mean_of(y);
    for (std::size_t i = 0; i < x.rows; ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) fitted += x(i, j) * coef[j];
      residual[i] = y[i] - ybar - fitted;
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t j = 0; j < x.cols; ++j) diag[j] += x(i, j) * x(i, j);
    }
    for (auto& d : diag) d /= n;
  }

  double gradient(std::size_t j) const {
    double g = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) g += x(i, j) * residual[i];
    return g / n;
  }

  void sweep(std::vector<double>& coef, double penalty) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double old = coef[j];
      const double updated = soft_threshold(gradient(j) + diag[j] * old, penalty) / diag[j];
      const double delta = updated - old;
      if (delta == 0.0) continue;
      coef[j] = updated;
      for (std::size_t i = 0; i < x.rows; ++i) residual[i] -= x(i, j) * delta;
    }
  }

  void reset_residual(std::span<const double> y, const std::vector<double>& coef) {
    const double ybar = mean_of(y);
    for (std::size_t i = 0; i < x.rows; ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) fitted += x(i, j) * coef[j];
      residual[i] = y[i] - ybar - fitted;
    }
  }

  /// objective(candidate) - objective(coef), computed from the step itself so
  /// that small improvements are not lost to cancellation.
  double objective_change(const std::vector<double>& coef, const std::vector<double>& candidate, double penalty) const {
    double cross = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double step = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) step += x(i, j) * (candidate[j] - coef[j]);
      cross += residual[i] * step;
      quad += step * step;
    }
    double l1 = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) l1 += std::abs(candidate[j]) - std::abs(coef[j]);
    return (quad / 2.0 - cross) / n + penalty * l1;
  }

  double objective(const std::vector<double>& coef, double penalty) const {
    double rss = 0.0;
    for (double r : residual) rss += r * r;
    double l1 = 0.0;
    for (double b : coef) l1 += std::abs(b);
    return rss / (2.0 * n) + penalty * l1;
  }

  double kkt(const std::vector<double>& coef, double penalty) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double g = gradient(j);
      const double v = coef[j] != 0.0 ? std::abs(g - penalty * (coef[j] > 0.0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(g) - penalty);
      worst = std::max(worst, v);
    }
    return worst;
  }
};

/// Solves the dense system A x = b (row-major, n x n) by Gaussian
/// elimination with partial pivoting. Returns false if A is singular.
bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t n, std::vector<double>& x) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t r = n; r-- > 0;) {
    double v = b[r];
    for (std::size_t c = r + 1; c < n; ++c) v -= a[r * n + c] * x[c];
    x[r] = v / a[r * n + r];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

/// The objective on standardized features as a quadratic form,
/// b'Gb/2 - c'b + penalty |b|_1 up to a constant.
struct Quadratic {
  std::size_t p;
  std::vector<double> gram, c;

  Quadratic(const StandardizedDesign& x, std::span<const double> y) : p(x.cols), gram(p * p, 0.0), c(p, 0.0) {
    const double n = static_cast<double>(x.rows);
    const double ybar = mean_of(y);
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t a = 0; a < p; ++a) {
        c[a] += x(i, a) * (y[i] - ybar);
        for (std::size_t b = 0; b < p; ++b) gram[a * p + b] += x(i, a) * x(i, b);
      }
    }
    for (auto& v : c) v /= n;
    for (auto& v : gram) v /= n;
  }

  /// z_j' r / n at coefficients b.
  double gradient(const std::vector<double>& b, std::size_t j) const {
    double g = c[j];
    for (std::size_t k = 0; k < p; ++k) g -= gram[j * p + k] * b[k];
    return g;
  }

  double value(const std::vector<double>& b, double penalty) const {
    double v = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      double gb = 0.0;
      for (std::size_t k = 0; k < p; ++k) gb += gram[j * p + k] * b[k];
      v += b[j] * (gb / 2.0 - c[j]) + penalty * std::abs(b[j]);
    }
    return v;
  }
};

/// Exact minimizer of the objective on the segment coef + t d, t in [0, 1].
/// The objective is convex and piecewise quadratic along the segment, with
/// breaks where a coefficient crosses zero.
double line_search(const Quadratic& q, const std::vector<double>& coef, const std::vector<double>& d, double penalty) {
  std::vector<double> breaks{0.0, 1.0};
  for (std::size_t j = 0; j < q.p; ++j) {
    if (d[j] == 0.0 || coef[j] == 0.0) continue;
    const double t = -coef[j] / d[j];
    if (t > 0.0 && t < 1.0) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  double curvature = 0.0, slope0 = 0.0;
  for (std::size_t j = 0; j < q.p; ++j) {
    double gd = 0.0;
    for (std::size_t k = 0; k < q.p; ++k) gd += q.gram[j * q.p + k] * d[k];
    curvature += d[j] * gd;
    slope0 -= q.gradient(coef, j) * d[j];
  }
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    if (hi <= lo) continue;
    const double mid = (lo + hi) / 2.0;
    double slope = slope0;
    for (std::size_t j = 0; j < q.p; ++j) {
      const double v = coef[j] + mid * d[j];
      slope += penalty * (v > 0.0 ? d[j] : v < 0.0 ? -d[j] : std::abs(d[j]));
    }
    // Derivative on this piece is slope + t curvature.
    if (slope + hi * curvature <= 0.0 && k + 2 < breaks.size()) continue;
    if (slope + lo * curvature >= 0.0) return lo;
    return curvature > 0.0 ? std::clamp(-slope / curvature, lo, hi) : hi;
  }
  return 1.0;
}

/// Feature-sign search from `coef`: solve on the current signed support,
/// line-search toward that solution, drop coefficients that reach zero, and
/// add the most violating zero coefficient once the support is optimal. The
/// objective never increases. Returns false if it stalls or a support system
/// is singular; `coef` then holds the best point reached.
bool feature_sign(const Quadratic& q, double penalty, double tolerance, std::vector<double>& coef) {
  std::vector<double> sign(q.p);
  for (std::size_t j = 0; j < q.p; ++j) sign[j] = coef[j] > 0.0 ? 1.0 : coef[j] < 0.0 ? -1.0 : 0.0;
  for (std::size_t step = 0; step < 20 * q.p + 20; ++step) {
    bool support_optimal = true;
    for (std::size_t j = 0; j < q.p; ++j) {
      if (sign[j] != 0.0 && std::abs(q.gradient(coef, j) - penalty * sign[j]) > tolerance) support_optimal = false;
    }
    if (support_optimal) {
      std::size_t enter = q.p;
      double worst = penalty + tolerance;
      for (std::size_t j = 0; j < q.p; ++j) {
        const double g = std::abs(q.gradient(coef, j));
        if (sign[j] == 0.0 && g > worst) {
          worst = g;
          enter = j;
        }
      }
      if (enter == q.p) return true;
      sign[enter] = q.gradient(coef, enter) > 0.0 ? 1.0 : -1.0;
    }

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < q.p; ++j) {
      if (sign[j] != 0.0) active.push_back(j);
    }
    const std::size_t k = active.size();
    std::vector<double> gram(k * k), rhs(k), target;
    for (std::size_t a = 0; a < k; ++a) {
      rhs[a] = q.c[active[a]] - penalty * sign[active[a]];
      for (std::size_t b = 0; b < k; ++b) gram[a * k + b] = q.gram[active[a] * q.p + active[b]];
    }
    if (!solve_dense(std::move(gram), std::move(rhs), k, target)) return false;

    std::vector<double> d(q.p, 0.0);
    for (std::size_t a = 0; a < k; ++a) d[active[a]] = target[a] - coef[active[a]];
    const double t = line_search(q, coef, d, penalty);
    if (t <= 0.0) return false;
    std::vector<double> next(q.p);
    for (std::size_t j = 0; j < q.p; ++j) {
      next[j] = coef[j] + t * d[j];
      // A coefficient whose zero crossing is the chosen point lands on zero.
      if (d[j] != 0.0 && coef[j] != 0.0 && std::abs(-coef[j] / d[j] - t) <= 1e-12 * std::max(1.0, t)) next[j] = 0.0;
    }
    if (q.value(next, penalty) > q.value(coef, penalty)) return false;
    coef = std::move(next);
    for (std::size_t j = 0; j < q.p; ++j) sign[j] = coef[j] > 0.0 ? 1.0 : coef[j] < 0.0 ? -1.0 : 0.0;
  }
  return false;
}

bool same_support(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if ((a[j] > 0.0) != (b[j] > 0.0) || (a[j] < 0.0) != (b[j] < 0.0)) return false;
  }
  return true;
}

LassoFit solve_fixed(const StandardizedDesign& design, std::span<const double> y, double penalty,
                     const LassoOptions& options, std::vector<double> warm) {
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw ValidationError("lasso penalty must be finite and >= 0");
  LassoFit fit;
  fit.penalty = penalty;
  fit.intercept = mean_of(y);
  fit.coef = warm.empty() ? std::vector<double>(design.cols, 0.0) : std::move(warm);
  Solver solver(design, y, fit.coef);
  const Quadratic quadratic(design, y);
  std::vector<double> previous = fit.coef;
  for (std::size_t s = 1; s <= options.max_sweeps; ++s) {
    solver.sweep(fit.coef, penalty);
    double objective = solver.objective(fit.coef, penalty);
    // Once a sweep leaves the signed support unchanged (or every 25 sweeps,
    // in case the support keeps flipping), finish with a feature-sign search.
    // Adopted only if it does not raise the objective, so the recorded
    // objective stays non-increasing.
    std::vector<double> refined = fit.coef;
    if ((same_support(previous, fit.coef) || s % 25 == 0) &&
        (feature_sign(quadratic, penalty, options.tolerance / 2.0, refined), refined != fit.coef) &&
        solver.objective_change(fit.coef, refined, penalty) <= 0.0) {
      fit.coef = refined;
      solver.reset_residual(y, fit.coef);
      objective = solver.objective(fit.coef, penalty);
    }
    previous = fit.coef;
    fit.objective_history.push_back(objective);
    fit.sweeps = s;
    fit.kkt_residual = solver.kkt(fit.coef, penalty);
    if (fit.kkt_residual <= options.tolerance) {
      fit.objective = fit.objective_history.back();
      return fit;
    }
  }
  std::ostringstream msg;
  msg << "coordinate descent did not converge in " << options.max_sweeps << " sweeps (penalty " << penalty
      << ", KKT residual " << fit.kkt_residual << ", objective " << fit.objective_history.back() << ")";
  throw ConvergenceError(msg.str(), fit.objective_history.back());
}

std::vector<double> penalty_grid(double max_penalty, const CrossValidation& cv) {
  if (cv.grid_points < 2) throw ValidationError("cross-validation grid needs at least two points");
  if (!(cv.min_ratio > 0.0 && cv.min_ratio < 1.0)) throw ValidationError("min_ratio must lie in (0, 1)");
  std::vector<double> grid(cv.grid_points);
  const double hi = std::log(max_penalty);
  const double lo = std::log(max_penalty * cv.min_ratio);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = std::exp(hi + (lo - hi) * static_cast<double>(k) / static_cast<double>(grid.size() - 1));
  }
  grid.front() = max_penalty;
  return grid;
}

double choose_penalty(const StandardizedDesign& design, std::span<const double> y, const LassoOptions& options,
                      const CrossValidation& cv, LassoFit& report) {
  if (cv.folds < 2 || cv.folds > design.rows) throw ValidationError("cross-validation folds must be in [2, n]");
  const double top = lambda_max(design, y);
  if (!(top > 0.0)) return 0.0;
  const auto grid = penalty_grid(top, cv);
  std::vector<double> error(grid.size(), 0.0);

  // Recover raw columns so each training split is standardized on its own.
  std::vector<double> raw(design.z.size());
  for (std::size_t i = 0; i < design.rows; ++i) {
    for (std::size_t j = 0; j < design.cols; ++j) {
      raw[i * design.cols + j] = design(i, j) * design.sd[j] + design.mean[j];
    }
  }

  for (std::size_t fold = 0; fold < cv.folds; ++fold) {
    std::vector<double> train_x, train_y;
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < design.rows; ++i) {
      if (i % cv.folds == fold) {
        held.push_back(i);
        continue;
      }
      train_x.insert(train_x.end(), raw.begin() + static_cast<std::ptrdiff_t>(i * design.cols),
                     raw.begin() + static_cast<std::ptrdiff_t>((i + 1) * design.cols));
      train_y.push_back(y[i]);
    }
    const auto train = standardize(train_x, train_y.size(), design.cols);
    std::vector<double> warm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto fit = solve_fixed(train, train_y, grid[k], options, warm);
      warm = fit.coef;
      for (auto i : held) {
        double pred = fit.intercept;
        for (std::size_t j = 0; j < design.cols; ++j) {
          pred += fit.coef[j] * (raw[i * design.cols + j] - train.mean[j]) / train.sd[j];
        }
        error[k] += (y[i] - pred) * (y[i] - pred);
      }
    }
  }
  for (auto& e : error) e /= static_cast<double>(design.rows);
  // Ties go to the larger penalty (earlier in the grid).
  const auto best = static_cast<std::size_t>(std::min_element(error.begin(), error.end()) - error.begin());
  report.cv_penalties = grid;
  report.cv_errors = error;
  return grid[best];
}

}  // namespace

StandardizedDesign standardize(std::span<const double> raw, std::size_t rows, std::size_t cols) {
  if (raw.size() != rows * cols) throw ValidationError("design size mismatch");
  if (rows <= cols) throw ValidationError("design needs more rows than features");
  StandardizedDesign d;
  d.rows = rows;
  d.cols = cols;
  d.z.resize(raw.size());
  d.mean.assign(cols, 0.0);
  d.sd.assign(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) sum += raw[i * cols + j];
    const double mean = sum / static_cast<double>(rows);
    double ss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) ss += (raw[i * cols + j] - mean) * (raw[i * cols + j] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(rows));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw ValidationError("zero-variance feature in column " + std::to_string(j));
    }
    d.mean[j] = mean;
    d.sd[j] = sd;
    for (std::size_t i = 0; i < rows; ++i) d.z[i * cols + j] = (raw[i * cols + j] - mean) / sd;
  }
  return d;
}

double lambda_max(const StandardizedDesign& design, std::span<const double> y) {
  check_target(design, y);
  const double ybar = mean_of(y);
  double top = 0.0;
  for (std::size_t j = 0; j < design.cols; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < design.rows; ++i) dot += design(i, j) * (y[i] - ybar);
    top = std::max(top, std::abs(dot) / static_cast<double>(design.rows));
  }
  return top;
}

double lasso_objective(const StandardizedDesign& design, std::span<const double> y, const LassoFit& fit) {
  return Solver(design, y, fit.coef).objective(fit.coef, fit.penalty);
}

double kkt_residual(const StandardizedDesign& design, std::span<const double> y, const LassoFit& fit) {
  return Solver(design, y, fit.coef).kkt(fit.coef, fit.penalty);
}

LassoFit lasso_fit(const StandardizedDesign& design, std::span<const double> y, const LassoOptions& options) {
  check_target(design, y);
  if (const auto* fixed = std::get_if<double>(&options.penalty)) return solve_fixed(design, y, *fixed, options, {});
  LassoFit report;
  const double chosen = choose_penalty(design, y, options, std::get<CrossValidation>(options.penalty), report);
  auto fit = solve_fixed(design, y, chosen, options, {});
  fit.cv_penalties = std::move(report.cv_penalties);
  fit.cv_errors = std::move(report.cv_errors);
  return fit;
}

std::vector<double> lasso_predict(const StandardizedDesign& design, const LassoFit& fit) {
  std::vector<double> out(design.rows, fit.intercept);
  for (std::size_t i = 0; i < design.rows; ++i) {
    for (std::size_t j = 0; j < design.cols; ++j) out[i] += design(i, j) * fit.coef[j];
  }
  return out;
}

}  // namespace matchfn

