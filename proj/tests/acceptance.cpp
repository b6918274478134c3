// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "json.hpp"
#include "matchfn/cli.hpp"
#include "matchfn/error.hpp"
#include "matchfn/isotonic.hpp"
#include "matchfn/pipeline.hpp"
#include "matchfn/simulate.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace matchfn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << " first failure: " << what << ";";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

// Shared by criteria 1 and 2.
struct PresetRun {
  SimOutput sim;
  EstimationResult est;
  double seconds = 0.0;
};

const PresetRun& preset_run() {
  static const PresetRun run = [] {
    PresetRun r;
    r.sim = simulate_market(paper_shape_config());
    const auto start = std::chrono::steady_clock::now();
    r.est = estimate(r.sim.panel);
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

// ---------------------------------------------------------------------------

Outcome efficiency_recovery() {
  Outcome o;
  const auto& r = preset_run();
  std::vector<double> recovered;
  for (const auto& row : r.est.efficiency.rows) recovered.push_back(row.a_raw);
  const double corr = testing::pearson(recovered, r.sim.efficiency);
  const double true_ratio = r.sim.efficiency.back() / r.sim.efficiency.front();
  const auto& rows = r.est.efficiency.rows;
  const double est_ratio = rows.back().a_index / rows.front().a_index;
  const double rel = est_ratio / true_ratio - 1.0;
  o.detail << "corr=" << corr << " ratio_true=" << true_ratio << " ratio_est=" << est_ratio << " rel_err=" << rel
           << " seconds=" << r.seconds;
  o.require(corr > 0.95, "correlation <= 0.95");
  o.require(std::abs(rel) <= 0.15, "end/start ratio off by more than 15%");
  o.require(r.seconds < 60.0, "runtime >= 60 s");
  return o;
}

Outcome elasticity_recovery() {
  Outcome o;
  const auto& r = preset_run();
  // Time the projection step on its own: LASSO fit plus the elasticity series.
  std::vector<double> af, m, e;
  std::vector<ElasticityInput> inputs;
  for (std::size_t t = 0; t < r.sim.panel.size(); ++t) {
    const auto& obs = r.sim.panel[t];
    af.push_back(r.est.efficiency.rows[t].a_raw * static_cast<double>(obs.females));
    m.push_back(static_cast<double>(obs.males));
    e.push_back(static_cast<double>(obs.engagements));
    inputs.push_back({obs.period, obs.region, af.back(), m.back(), e.back()});
  }
  const auto start = std::chrono::steady_clock::now();
  const auto surface = QuadraticSurface::fit(af, m, e);
  const auto series = elasticity_series(surface, inputs);
  const double seconds = seconds_since(start);

  std::vector<double> ef, em, sum;
  for (const auto& row : series) {
    if (!row.value) continue;
    ef.push_back(row.value->eps_f);
    em.push_back(row.value->eps_m);
    sum.push_back(row.value->eps_f + row.value->eps_m);
  }
  o.require(!ef.empty(), "no defined elasticities");
  if (ef.empty()) return o;
  // The pipeline result must agree with the standalone fit.
  double pipeline_f = 0.0;
  std::size_t defined = 0;
  for (const auto& row : r.est.elasticity) {
    if (row.value) {
      pipeline_f += row.value->eps_f;
      ++defined;
    }
  }
  pipeline_f /= static_cast<double>(defined);
  o.detail << "mean_eps_f=" << mean(ef) << " mean_eps_m=" << mean(em) << " mean_sum=" << mean(sum)
           << " defined=" << ef.size() << "/" << series.size() << " seconds=" << seconds;
  o.require(std::abs(mean(ef) - 0.6) <= 0.05, "mean eps_f outside 0.6 +/- 0.05");
  o.require(std::abs(mean(em) - 0.4) <= 0.05, "mean eps_m outside 0.4 +/- 0.05");
  o.require(mean(sum) >= 0.9 && mean(sum) <= 1.1, "mean eps_f + eps_m outside [0.9, 1.1]");
  o.require(std::abs(pipeline_f - mean(ef)) <= 1e-12, "pipeline and standalone elasticities differ");
  o.require(seconds < 10.0, "runtime >= 10 s");
  return o;
}

Outcome scale_invariance() {
  Outcome o;
  const auto panel = simulate_market(paper_shape_config()).panel;
  EstimateOptions opt;
  opt.lasso.penalty = 0.0;
  const auto base = estimate(panel, opt);
  const auto tripled = estimate(testing::scaled(panel, 3), opt);
  double worst_index = 0.0, worst_eps = 0.0;
  for (std::size_t t = 0; t < panel.size(); ++t) {
    const double a = base.efficiency.rows[t].a_index, b = tripled.efficiency.rows[t].a_index;
    worst_index = std::max(worst_index, std::abs(b - a) / a);
    const auto& x = base.elasticity[t].value;
    const auto& y = tripled.elasticity[t].value;
    o.require(x.has_value() == y.has_value(), "elasticity defined in one run only");
    if (x && y) worst_eps = std::max({worst_eps, std::abs(x->eps_f - y->eps_f), std::abs(x->eps_m - y->eps_m)});
  }
  o.detail << "max_rel_index_change=" << worst_index << " max_abs_eps_change=" << worst_eps;
  o.require(worst_index <= 1e-3, "a_index moved by more than 0.1%");
  o.require(worst_eps <= 0.01, "elasticity moved by more than 0.01");
  return o;
}

Outcome kernel_properties() {
  Outcome o;
  std::size_t checks = 0;
  double worst_limit = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = paper_shape_config(seed);
    cfg.periods = 60 + 15 * seed;
    const auto panel = simulate_market(cfg).panel;
    const auto est = ConditionalCdfEstimator::fit(panel);
    KernelConfig wide;
    wide.bandwidth = 1e6;
    const auto flat = ConditionalCdfEstimator::fit(panel, wide);

    double f_lo = 1e300, f_hi = 0, m_lo = 1e300, m_hi = 0, e_hi = 0;
    std::vector<double> es;
    for (const auto& obs : panel.observations()) {
      f_lo = std::min(f_lo, static_cast<double>(obs.females));
      f_hi = std::max(f_hi, static_cast<double>(obs.females));
      m_lo = std::min(m_lo, static_cast<double>(obs.males));
      m_hi = std::max(m_hi, static_cast<double>(obs.males));
      e_hi = std::max(e_hi, static_cast<double>(obs.engagements));
      es.push_back(static_cast<double>(obs.engagements));
    }
    std::mt19937_64 rng(100 + seed);
    std::uniform_real_distribution<double> uf(std::log(f_lo), std::log(f_hi)), um(std::log(m_lo), std::log(m_hi));
    std::vector<double> thresholds(200);
    for (std::size_t k = 0; k < thresholds.size(); ++k) thresholds[k] = 1.1 * e_hi * static_cast<double>(k) / 199.0;

    for (int point = 0; point < 20; ++point) {
      const EvalPoint at{std::exp(uf(rng)), std::exp(um(rng))};
      double prev = -1.0;
      for (double e : thresholds) {
        const double p = est.cdf(e, at);
        o.require(p >= 0.0 && p <= 1.0, "cdf outside [0, 1]");
        o.require(p >= prev, "cdf decreasing in threshold");
        prev = p;
        // Unconditional empirical CDF as the wide-bandwidth limit.
        const double share = static_cast<double>(std::count_if(es.begin(), es.end(), [&](double v) { return v < e; })) /
                             static_cast<double>(es.size());
        worst_limit = std::max(worst_limit, std::abs(flat.cdf(e, at) - share));
        ++checks;
      }
      // Galois connection between quantile and cdf over the candidate set.
      const auto cand = est.candidates();
      for (int k = 1; k < 20; ++k) {
        const double p = k / 20.0;
        const double q = est.quantile(p, at);
        o.require(est.cdf(q, at) >= p, "cdf(quantile(p)) < p");
        const auto it = std::lower_bound(cand.begin(), cand.end(), q);
        if (it != cand.begin()) o.require(est.cdf(*(it - 1), at) < p, "quantile not the smallest candidate");
      }
      for (std::size_t k = 0; k < cand.size(); k += 37) {
        o.require(est.quantile(est.cdf(cand[k], at), at) <= cand[k], "quantile(cdf(e)) > e");
      }
    }
  }
  o.detail << "threshold_checks=" << checks << " max_wide_bandwidth_gap=" << worst_limit;
  o.require(worst_limit <= 1e-6, "wide bandwidth differs from empirical CDF by more than 1e-6");
  return o;
}

Outcome pava_oracle() {
  Outcome o;
  std::size_t compared = 0;
  double worst = 0.0;
  const auto compare = [&](const std::vector<double>& y) {
    if (oracle::is_monotone(y)) return;
    const auto fit = isotonic_fit(y);
    const auto ref = oracle::isotonic(y);
    for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(fit[i] - ref[i]));
    ++compared;
  };
  // Every sequence over a small alphabet, lengths 2 to 6.
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<int> digits(n, 0);
    for (;;) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = 0.25 * digits[i];
      compare(y);
      std::size_t i = 0;
      while (i < n && ++digits[i] == 4) digits[i++] = 0;
      if (i == n) break;
    }
  }
  // Random real-valued sequences of lengths 7 and 8.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 7; n <= 8; ++n) {
    for (int k = 0; k < 2000; ++k) {
      std::vector<double> y(n);
      for (auto& v : y) v = u(rng);
      compare(y);
    }
  }
  // Every window of length <= 8 of full-resolution traced columns.
  std::size_t windows = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto panel = simulate_market(paper_shape_config(seed)).panel;
    const auto est = ConditionalCdfEstimator::fit(panel);
    const auto base = default_base_point(panel);
    const auto raw = trace_distribution(est, base, default_scale_grid(panel, base));
    for (std::size_t j = 0; j < raw.cols(); ++j) {
      for (std::size_t len = 2; len <= 8; ++len) {
        for (std::size_t i0 = 0; i0 + len <= raw.rows(); ++i0) {
          std::vector<double> col;
          for (std::size_t i = i0; i < i0 + len; ++i) col.push_back(raw.at(i, j));
          if (std::any_of(col.begin(), col.end(), [](double v) { return std::isnan(v); })) continue;
          const std::size_t before = compared;
          compare(col);
          windows += compared - before;
        }
      }
    }
  }
  o.require(windows > 0, "no violating traced windows");
  o.detail << "sequences=" << compared << " of_which_traced_windows=" << windows << " max_abs_diff=" << worst;
  o.require(compared > 0, "no violating sequences generated");
  o.require(worst <= 1e-12, "PAVA differs from brute force by more than 1e-12");
  return o;
}

Outcome lasso_checks() {
  Outcome o;
  std::mt19937_64 rng(61);
  std::normal_distribution<double> nd;
  const std::size_t n = 80, p = 5;
  std::vector<double> raw(n * p), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) raw[i * p + j] = nd(rng) * (1.0 + j) + 0.5 * j;
    y[i] = 1.0 + raw[i * p] - 0.5 * raw[i * p + 2] + 0.3 * nd(rng);
  }
  const auto d = standardize(raw, n, p);
  double worst_kkt = 0.0;
  bool monotone = true;
  const auto track = [&](const LassoFit& fit) {
    worst_kkt = std::max(worst_kkt, fit.kkt_residual);
    for (std::size_t s = 1; s < fit.objective_history.size(); ++s) {
      const double prev = fit.objective_history[s - 1];
      if (fit.objective_history[s] > prev + 1e-12 * std::abs(prev)) monotone = false;
    }
  };

  // Closed-form least squares on the same standardized design.
  Eigen::MatrixXd z(n, p);
  Eigen::VectorXd yc(n);
  const double ybar = mean(y);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z(i, j) = d(i, j);
    yc(i) = y[i] - ybar;
  }
  const Eigen::VectorXd ls = z.colPivHouseholderQr().solve(yc);
  const auto ols = lasso_fit(d, y, LassoOptions{0.0});
  track(ols);
  double ls_gap = 0.0;
  for (std::size_t j = 0; j < p; ++j) ls_gap = std::max(ls_gap, std::abs(ols.coef[j] - ls(j)));
  o.require(ls_gap <= 1e-6, "penalty 0 differs from least squares by more than 1e-6");

  const double top = lambda_max(d, y);
  bool zeroed = true;
  for (double factor : {1.0, 1.5, 10.0}) {
    const auto fit = lasso_fit(d, y, LassoOptions{top * factor});
    track(fit);
    for (double c : fit.coef) zeroed = zeroed && c == 0.0;
  }
  o.require(zeroed, "penalty >= lambda_max left a nonzero slope");

  for (double frac : {0.5, 0.1, 0.01}) track(lasso_fit(d, y, LassoOptions{top * frac}));
  track(lasso_fit(d, y));

  // Planted coefficients, noiseless.
  const std::vector<double> planted{0.5, 0.0, -2.0, 1.25, 0.0};
  std::vector<double> clean(n);
  for (std::size_t i = 0; i < n; ++i) {
    clean[i] = 3.0;
    for (std::size_t j = 0; j < p; ++j) clean[i] += planted[j] * d(i, j);
  }
  const auto fit = lasso_fit(d, clean, LassoOptions{1e-6});
  track(fit);
  double planted_gap = 0.0;
  for (std::size_t j = 0; j < p; ++j) planted_gap = std::max(planted_gap, std::abs(fit.coef[j] - planted[j]));
  o.require(planted_gap <= 1e-3, "planted coefficients off by more than 1e-3");

  // The quadratic surface design of the preset, the hardest case in practice.
  const auto& r = preset_run();
  for (const auto& s : r.est.surfaces) track(s.lasso());

  o.detail << "ls_gap=" << ls_gap << " planted_gap=" << planted_gap << " max_kkt=" << worst_kkt;
  o.require(worst_kkt <= 1e-8, "KKT residual above 1e-8");
  o.require(monotone, "objective increased within a fit");
  return o;
}

Outcome derivative_consistency() {
  Outcome o;
  const auto& r = preset_run();
  std::vector<double> af, m, e;
  for (std::size_t t = 0; t < r.sim.panel.size(); ++t) {
    const auto& obs = r.sim.panel[t];
    af.push_back(r.est.efficiency.rows[t].a_raw * static_cast<double>(obs.females));
    m.push_back(static_cast<double>(obs.males));
    e.push_back(static_cast<double>(obs.engagements));
  }
  const auto [af_lo, af_hi] = std::minmax_element(af.begin(), af.end());
  const auto [m_lo, m_hi] = std::minmax_element(m.begin(), m.end());
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(*af_lo, *af_hi), um(*m_lo, *m_hi);
  double worst = 0.0;
  std::size_t evaluated = 0;
  for (auto scale : {SurfaceScale::Levels, SurfaceScale::LogLog}) {
    const auto surface = QuadraticSurface::fit(af, m, e, {}, scale);
    for (int k = 0; k < 100; ++k) {
      const double x = ua(rng), y = um(rng);
      const double fitted = surface.predict(x, y);
      if (!(fitted > 0.0)) continue;
      const auto eps = elasticity_at(surface, x, y, fitted);
      const double fd_f = oracle::log_derivative([&](double v) { return surface.predict(v, y); }, x);
      const double fd_m = oracle::log_derivative([&](double v) { return surface.predict(x, v); }, y);
      worst = std::max({worst, std::abs(eps.eps_f - fd_f), std::abs(eps.eps_m - fd_m)});
      ++evaluated;
    }
  }
  o.detail << "points=" << evaluated << " max_abs_gap=" << worst;
  o.require(evaluated == 200, "fitted value not positive at an evaluation point");
  o.require(worst <= 1e-4, "analytic and finite-difference elasticities differ by more than 1e-4");
  return o;
}

Outcome normalization() {
  Outcome o;
  const auto& r = preset_run();
  o.require(r.est.efficiency.rows.front().a_index == 100.0, "anchor a_index is not exactly 100");

  auto cfg = paper_shape_config();
  cfg.periods = 48;
  const auto sim = simulate_regions(cfg, {{"north", 1.0, 0.0}, {"south", 0.6, -0.1}, {"west", 0.36, -0.2}});
  EstimateOptions opt;
  opt.anchor = Period::make(2015, 6);
  opt.anchor_region = "south";
  const auto est = estimate(sim.panel, opt);
  double anchor_raw = NAN;
  for (const auto& row : est.efficiency.rows) {
    if (row.period == *opt.anchor && row.region == "south") {
      o.require(row.a_index == 100.0, "cross-region anchor is not exactly 100");
      anchor_raw = row.a_raw;
    }
  }
  o.require(!std::isnan(anchor_raw), "anchor row missing");
  double worst = 0.0;
  std::map<std::string, int> per_region;
  for (const auto& row : est.efficiency.rows) {
    worst = std::max(worst, std::abs(row.a_index - 100.0 * row.a_raw / anchor_raw) / row.a_index);
    ++per_region[row.region];
  }
  o.require(per_region.size() == 3, "expected three regions");
  o.detail << "anchor=" << r.est.efficiency.rows.front().a_index << " cross_region_rows=" << est.efficiency.rows.size()
           << " max_rel_gap=" << worst;
  o.require(worst <= 1e-15, "rows not expressed relative to the anchor row");
  return o;
}

Outcome within_area() {
  Outcome o;
  std::ifstream in(testing::data_path("within_area_20.csv"));
  auto records = load_match_records(in);
  o.require(records.size() == 20, "fixture does not hold 20 records");
  const std::map<std::string, double> hand{
      {"2014-01 kanto", 3.0 / 5.0},   {"2014-01 kinki", 2.0 / 3.0}, {"2014-01 okinawa", 1.0 / 2.0},
      {"2014-01 hokkaido", 1.0},      {"2014-02 kanto", 2.0 / 3.0}, {"2014-02 kinki", 1.0 / 2.0},
      {"2014-02 okinawa", 1.0},       {"2014-02 hokkaido", 0.0},
  };
  const auto key_of = [](const ShareCell& c) { return c.period_label() + " " + c.region; };
  const auto reference = within_area_share(records);
  o.require(reference.size() == hand.size(), "unexpected number of cells");
  for (const auto& c : reference) {
    const auto it = hand.find(key_of(c));
    o.require(it != hand.end() && c.share == it->second, "share differs from hand count: " + key_of(c));
  }
  const std::map<std::string, double> yearly{
      {"2014 kanto", 5.0 / 8.0}, {"2014 kinki", 3.0 / 5.0}, {"2014 okinawa", 3.0 / 4.0}, {"2014 hokkaido", 2.0 / 3.0}};
  for (const auto& c : within_area_share(records, {Granularity::Year, ConditioningSide::Female, {}})) {
    const auto it = yearly.find(key_of(c));
    o.require(it != yearly.end() && c.share == it->second, "yearly share differs: " + key_of(c));
  }
  std::mt19937_64 rng(9);
  int permutations = 0;
  for (; permutations < 100; ++permutations) {
    std::shuffle(records.begin(), records.end(), rng);
    const auto cells = within_area_share(records);
    bool same = cells.size() == reference.size();
    for (std::size_t i = 0; same && i < cells.size(); ++i) {
      same = key_of(cells[i]) == key_of(reference[i]) && cells[i].same_region == reference[i].same_region &&
             cells[i].total == reference[i].total && cells[i].share == reference[i].share;
    }
    o.require(same, "record order changed the result");
  }
  o.detail << "cells=" << reference.size() << " permutations=" << permutations;
  return o;
}

Outcome determinism_and_cli() {
  Outcome o;
  std::ostringstream sink;
  const auto cli = [&](std::vector<std::string> args) {
    std::ostringstream err;
    return run_cli(args, sink, err);
  };
  const auto a = testing::scratch_dir("accept_a"), b = testing::scratch_dir("accept_b");
  o.require(cli({"simulate", "--seed", "7", "-o", a.string()}) == kExitOk, "simulate failed");
  o.require(cli({"simulate", "--seed", "7", "-o", b.string()}) == kExitOk, "simulate failed");
  o.require(slurp(a / "panel.csv") == slurp(b / "panel.csv"), "simulated panels differ");
  const auto ea = testing::scratch_dir("accept_ea"), eb = testing::scratch_dir("accept_eb");
  o.require(cli({"estimate", "--input", (a / "panel.csv").string(), "-o", ea.string()}) == kExitOk, "estimate failed");
  o.require(cli({"estimate", "--input", (b / "panel.csv").string(), "-o", eb.string()}) == kExitOk, "estimate failed");
  for (const char* name : {"efficiency.csv", "elasticity.csv", "derived.csv", "surface.csv"}) {
    o.require(!slurp(ea / name).empty() && slurp(ea / name) == slurp(eb / name), std::string(name) + " differs");
  }
  const auto ma = nlohmann::json::parse(slurp(ea / "manifest.json"));
  const auto mb = nlohmann::json::parse(slurp(eb / "manifest.json"));
  o.require(ma.at("run_hash") == mb.at("run_hash"), "manifest hash differs");

  const auto cases = nlohmann::json::parse(slurp(testing::data_path("cli_golden.json")));
  std::map<int, int> seen;
  int mismatched = 0;
  for (const auto& c : cases) {
    const auto dir = testing::scratch_dir("accept_golden");
    std::vector<std::string> args;
    for (const auto& arg : c.at("args")) {
      auto s = arg.get<std::string>();
      for (auto [key, value] : {std::pair<std::string, std::string>{"{out}", dir.string()}, {"{data}", MATCHFN_TEST_DATA}}) {
        for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key)) s.replace(pos, key.size(), value);
      }
      args.push_back(s);
    }
    std::ostringstream err;
    const int code = run_cli(args, sink, err);
    const bool ok = code == c.at("exit").get<int>() && err.str().find(c.at("stderr").get<std::string>()) != std::string::npos;
    if (!ok) ++mismatched;
    o.require(ok, "golden case '" + c.at("name").get<std::string>() + "'");
    ++seen[code];
  }
  for (int code : {kExitOk, kExitIo, kExitValidation, kExitDegraded, kExitEstimation}) {
    o.require(seen[code] > 0, "exit code " + std::to_string(code) + " not exercised");
  }
  o.detail << "golden_cases=" << cases.size() << " mismatched=" << mismatched << " run_hash=" << ma.at("run_hash").get<std::string>().substr(0, 12);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle efficiency recovery", efficiency_recovery},
      {"elasticity recovery", elasticity_recovery},
      {"CRS scale invariance", scale_invariance},
      {"kernel CDF properties", kernel_properties},
      {"PAVA vs brute-force isotonic", pava_oracle},
      {"LASSO correctness", lasso_checks},
      {"derivative consistency", derivative_consistency},
      {"normalization exactness", normalization},
      {"within-area share", within_area},
      {"determinism and CLI contract", determinism_and_cli},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << "threw: " << e.what();
    }
    if (!outcome.pass) ++failed;
    std::printf("criterion %2zu %-32s %s  %s\n", k + 1, criteria[k].first.c_str(), outcome.pass ? "PASS" : "FAIL",
                outcome.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
