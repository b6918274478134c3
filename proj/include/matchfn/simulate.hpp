#pragma once

#include "matchfn/panel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace matchfn {

/// Constant-returns matching technology m(AF, M).
struct Technology {
  enum class Kind { CobbDouglas, Ces };
  Kind kind = Kind::CobbDouglas;
  double alpha = 0.6;        // share of the effective female input
  double substitution = 0.5; // CES exponent r in (alpha x^r + (1-alpha) y^r)^(1/r), r != 0

  double operator()(double effective_input, double males) const;
  /// Throws ValidationError unless alpha is in (0, 1) and r is finite and nonzero.
  void validate() const;
};

/// Data-generating process for one market.
///
///   log A_t = rho log A_{t-1} + a_drift + sigma_a e_t        (log A_0 = log_a_init)
///   log F_t = log F_{t-1} + f_drift + sigma_f u_t            (F_0 = f_init)
///   log M_t = m_intercept + m_slope log F_t + sigma_m v_t
///   E_t     = min(F_t, M_t, round(m(A_t F_t, M_t) exp(sigma_e w_t)))
///
/// e, u, v and w come from four independent generators, so M is independent
/// of A given F by construction.
struct SimConfig {
  std::size_t periods = 132;
  Period start{2014, 1};
  std::string region;
  Technology technology;

  double rho = 0.0;
  double a_drift = 0.0;
  double sigma_a = 0.0;
  double log_a_init = 0.0;

  double f_init = 4000.0;
  double f_drift = 0.0;
  double sigma_f = 0.0;

  double m_intercept = 0.0;
  double m_slope = 1.0;
  double sigma_m = 0.0;

  double sigma_e = 0.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Named scenario: 132 months from 2014-01, alpha = 0.6, efficiency about
/// tripling, tightness F/M declining, small measurement noise.
SimConfig paper_shape_config(std::uint64_t seed = 7);

struct SimOutput {
  MarketPanel panel;
  std::vector<double> efficiency;   // true A_t, aligned with panel rows
  std::vector<double> a_shocks;     // standard normal draws behind A
  std::vector<double> m_shocks;     // standard normal draws behind M
  double eps_f = 0.0;               // true elasticities (Cobb-Douglas only)
  double eps_m = 0.0;
};

/// Deterministic given the config: identical seeds give identical output.
SimOutput simulate_market(const SimConfig& config);

/// Simulates several regions that share the technology, each with its own
/// seed stream and scale factor on F and M.
struct RegionSpec {
  std::string name;
  double scale = 1.0;
  double log_a_shift = 0.0;
};
SimOutput simulate_regions(const SimConfig& config, const std::vector<RegionSpec>& regions);

/// Closed-form Cobb-Douglas inversion A_t = (E_t / (F_t^alpha M_t^(1-alpha)))^(1/alpha).
/// Rows with E_t = 0 yield std::nullopt.
std::vector<std::optional<double>> closed_form_efficiency(const MarketPanel& panel, double alpha);
/// Same inversion for any Technology (CES included).
std::vector<std::optional<double>> closed_form_efficiency(const MarketPanel& panel, const Technology& tech);

}  // namespace matchfn
