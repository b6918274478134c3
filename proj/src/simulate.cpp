#include "matchfn/simulate.hpp"

#include "matchfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace matchfn {

namespace {

enum Stream : std::uint64_t { kStreamA = 1, kStreamF = 2, kStreamM = 3, kStreamE = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ValidationError(std::string("invalid simulation parameter ") + field + ": " + rule);
}

}  // namespace

double Technology::operator()(double x, double y) const {
  if (kind == Kind::CobbDouglas) return std::pow(x, alpha) * std::pow(y, 1.0 - alpha);
  const double r = substitution;
  return std::pow(alpha * std::pow(x, r) + (1.0 - alpha) * std::pow(y, r), 1.0 / r);
}

void Technology::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "alpha", "must lie in (0, 1)");
  if (kind == Kind::Ces) require(std::isfinite(substitution) && substitution != 0.0, "substitution", "must be nonzero");
}

void SimConfig::validate() const {
  technology.validate();
  require(periods >= 1, "periods", "must be at least 1");
  require(rho >= 0.0 && rho < 1.0, "rho", "must lie in [0, 1)");
  require(sigma_a >= 0.0, "sigma_a", "must be nonnegative");
  require(sigma_f >= 0.0, "sigma_f", "must be nonnegative");
  require(sigma_m >= 0.0, "sigma_m", "must be nonnegative");
  require(sigma_e >= 0.0, "sigma_e", "must be nonnegative");
  require(f_init >= 1.0, "f_init", "must be at least 1");
  for (double v : {a_drift, log_a_init, f_drift, m_intercept, m_slope}) {
    require(std::isfinite(v), "drift/intercept", "must be finite");
  }
}

SimConfig paper_shape_config(std::uint64_t seed) {
  SimConfig c;
  c.periods = 132;
  c.start = {2014, 1};
  c.technology = {Technology::Kind::CobbDouglas, 0.6, 0.5};
  c.seed = seed;

  c.rho = 0.99;
  c.sigma_a = 0.01;
  c.log_a_init = std::log(0.02);
  // Mean path: log A_t = mu + rho^t (log_a_init - mu). Pick mu so that
  // E[log A_T] - E[log A_1] = log 3.
  const double t_span = std::pow(c.rho, 1.0) - std::pow(c.rho, static_cast<double>(c.periods));
  const double mu = c.log_a_init + std::log(3.0) / t_span;
  c.a_drift = mu * (1.0 - c.rho);

  c.f_init = 4000.0;
  c.f_drift = std::log(1.5) / static_cast<double>(c.periods);
  c.sigma_f = 0.003;
  // log M = c + slope log F. With F up 1.5x and A up 3x, slope near
  // 1 + log 3 / log 1.5 keeps A F / M roughly level so the kernel keeps support.
  c.m_slope = 3.7;
  c.m_intercept = std::log(3600.0) - c.m_slope * std::log(c.f_init);
  c.sigma_m = 0.2;

  c.sigma_e = 0.01;
  return c;
}

SimOutput simulate_market(const SimConfig& config) {
  config.validate();
  auto gen_a = make_stream(config.seed, kStreamA);
  auto gen_f = make_stream(config.seed, kStreamF);
  auto gen_m = make_stream(config.seed, kStreamM);
  auto gen_e = make_stream(config.seed, kStreamE);
  std::normal_distribution<double> normal_a, normal_f, normal_m, normal_e;

  SimOutput out;
  out.efficiency.reserve(config.periods);
  out.a_shocks.reserve(config.periods);
  out.m_shocks.reserve(config.periods);
  std::vector<MarketObservation> rows;
  rows.reserve(config.periods);

  double log_a = config.log_a_init;
  double log_f = std::log(config.f_init);
  for (std::size_t t = 0; t < config.periods; ++t) {
    const double ea = normal_a(gen_a);
    const double ef = normal_f(gen_f);
    const double em = normal_m(gen_m);
    const double ee = normal_e(gen_e);
    log_a = config.rho * log_a + config.a_drift + config.sigma_a * ea;
    log_f = log_f + config.f_drift + config.sigma_f * ef;
    const double log_m = config.m_intercept + config.m_slope * log_f + config.sigma_m * em;

    const auto females = std::max<std::int64_t>(1, std::llround(std::exp(log_f)));
    const auto males = std::max<std::int64_t>(1, std::llround(std::exp(log_m)));
    const double a = std::exp(log_a);
    const double expected = config.technology(a * static_cast<double>(females), static_cast<double>(males));
    auto e = std::llround(expected * std::exp(config.sigma_e * ee));
    e = std::clamp<std::int64_t>(e, 0, std::min(females, males));

    rows.push_back({config.start.plus_months(static_cast<int>(t)), config.region, e, females, males});
    out.efficiency.push_back(a);
    out.a_shocks.push_back(ea);
    out.m_shocks.push_back(em);
  }
  out.panel = MarketPanel(std::move(rows));
  if (config.technology.kind == Technology::Kind::CobbDouglas) {
    out.eps_f = config.technology.alpha;
    out.eps_m = 1.0 - config.technology.alpha;
  } else {
    out.eps_f = out.eps_m = NAN;
  }
  return out;
}

SimOutput simulate_regions(const SimConfig& config, const std::vector<RegionSpec>& regions) {
  if (regions.empty()) return simulate_market(config);
  SimOutput out;
  std::vector<MarketObservation> rows;
  std::vector<std::pair<std::string, std::size_t>> order;
  std::vector<SimOutput> parts;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    SimConfig c = config;
    c.region = regions[r].name;
    c.seed = config.seed + 1000003ULL * (r + 1);
    c.f_init = config.f_init * regions[r].scale;
    // Keep M_0 / F_0 fixed when F is rescaled.
    c.m_intercept = config.m_intercept + (1.0 - config.m_slope) * std::log(regions[r].scale);
    c.log_a_init = config.log_a_init + regions[r].log_a_shift;
    c.a_drift = config.a_drift + (1.0 - config.rho) * regions[r].log_a_shift;
    parts.push_back(simulate_market(c));
  }
  // MarketPanel sorts by (region, period); realign the truth vectors.
  for (const auto& p : parts) {
    for (std::size_t t = 0; t < p.panel.size(); ++t) rows.push_back(p.panel[t]);
  }
  out.panel = MarketPanel(rows);
  for (const auto& o : out.panel.observations()) {
    for (const auto& p : parts) {
      if (p.panel.empty() || p.panel[0].region != o.region) continue;
      for (std::size_t t = 0; t < p.panel.size(); ++t) {
        if (p.panel[t].period == o.period) {
          out.efficiency.push_back(p.efficiency[t]);
          out.a_shocks.push_back(p.a_shocks[t]);
          out.m_shocks.push_back(p.m_shocks[t]);
        }
      }
    }
  }
  out.eps_f = parts.front().eps_f;
  out.eps_m = parts.front().eps_m;
  return out;
}

std::vector<std::optional<double>> closed_form_efficiency(const MarketPanel& panel, double alpha) {
  return closed_form_efficiency(panel, Technology{Technology::Kind::CobbDouglas, alpha, 0.5});
}

std::vector<std::optional<double>> closed_form_efficiency(const MarketPanel& panel, const Technology& tech) {
  tech.validate();
  std::vector<std::optional<double>> out;
  out.reserve(panel.size());
  for (const auto& o : panel.observations()) {
    if (o.engagements == 0) {
      out.emplace_back(std::nullopt);
      continue;
    }
    const double e = static_cast<double>(o.engagements);
    const double f = static_cast<double>(o.females);
    const double m = static_cast<double>(o.males);
    if (tech.kind == Technology::Kind::CobbDouglas) {
      out.emplace_back(std::pow(e / (std::pow(f, tech.alpha) * std::pow(m, 1.0 - tech.alpha)), 1.0 / tech.alpha));
    } else {
      const double r = tech.substitution;
      const double inner = (std::pow(e, r) - (1.0 - tech.alpha) * std::pow(m, r)) / tech.alpha;
      if (!(inner > 0.0)) {
        out.emplace_back(std::nullopt);
        continue;
      }
      out.emplace_back(std::pow(inner, 1.0 / r) / f);
    }
  }
  return out;
}

}  // namespace matchfn
