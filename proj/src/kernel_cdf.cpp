#include "matchfn/kernel_cdf.hpp"

#include "matchfn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace matchfn {

namespace {

constexpr int kRefinePoints = 64;

double sample_sd(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

ConditionalCdfEstimator ConditionalCdfEstimator::fit(const MarketPanel& panel, const KernelConfig& config) {
  if (panel.size() < 2) throw ValidationError("kernel fit needs at least 2 observations");
  if (!(config.bandwidth > 0.0) || !std::isfinite(config.bandwidth)) {
    throw ValidationError("bandwidth must be positive and finite");
  }

  const auto n = panel.size();
  std::vector<double> log_f(n), log_m(n), e(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = panel[i];
    log_f[i] = std::log(static_cast<double>(o.females));
    log_m[i] = std::log(static_cast<double>(o.males));
    e[i] = static_cast<double>(o.engagements);
  }

  ConditionalCdfEstimator est;
  est.config_ = config;
  auto& s = est.stats_;
  s.mean_log_f = std::accumulate(log_f.begin(), log_f.end(), 0.0) / static_cast<double>(n);
  s.mean_log_m = std::accumulate(log_m.begin(), log_m.end(), 0.0) / static_cast<double>(n);
  s.sd_log_f = sample_sd(log_f, s.mean_log_f);
  s.sd_log_m = sample_sd(log_m, s.mean_log_m);
  if (!(s.sd_log_f > 0.0) || !(s.sd_log_m > 0.0)) {
    std::ostringstream msg;
    msg << "degenerate panel: zero variance in " << (s.sd_log_f > 0.0 ? "log M" : "log F");
    throw ValidationError(msg.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return e[a] < e[b]; });
  est.e_.reserve(n);
  est.z_f_.reserve(n);
  est.z_m_.reserve(n);
  for (auto i : order) {
    est.e_.push_back(e[i]);
    est.z_f_.push_back((log_f[i] - s.mean_log_f) / s.sd_log_f);
    est.z_m_.push_back((log_m[i] - s.mean_log_m) / s.sd_log_m);
  }

  std::vector<double> unique = est.e_;
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  auto& cand = est.candidates_;
  cand.reserve(unique.size() * (kRefinePoints + 1) + 1);
  for (std::size_t k = 0; k < unique.size(); ++k) {
    cand.push_back(unique[k]);
    if (k + 1 < unique.size()) {
      const double gap = unique[k + 1] - unique[k];
      for (int j = 1; j <= kRefinePoints; ++j) {
        cand.push_back(unique[k] + gap * j / (kRefinePoints + 1));
      }
    }
  }
  const double last_gap = unique.size() > 1 ? unique.back() - unique[unique.size() - 2] : 1.0;
  cand.push_back(unique.back() + last_gap / (kRefinePoints + 1));
  return est;
}

double ConditionalCdfEstimator::kernel_weight(const MarketObservation& obs, const EvalPoint& at) const {
  const double u = (std::log(static_cast<double>(obs.females)) - std::log(at.f)) / stats_.sd_log_f;
  const double v = (std::log(static_cast<double>(obs.males)) - std::log(at.m)) / stats_.sd_log_m;
  const double h = config_.bandwidth;
  return std::exp(-(u * u + v * v) / (2.0 * h * h));
}

ConditionalCdfEstimator::LocalWeights ConditionalCdfEstimator::local_weights(const EvalPoint& at) const {
  if (!(at.f > 0.0) || !(at.m > 0.0)) throw ValidationError("evaluation point must have f > 0 and m > 0");
  const double zf = (std::log(at.f) - stats_.mean_log_f) / stats_.sd_log_f;
  const double zm = (std::log(at.m) - stats_.mean_log_m) / stats_.sd_log_m;
  const double denom = 2.0 * config_.bandwidth * config_.bandwidth;

  LocalWeights w;
  w.cumulative.resize(e_.size() + 1);
  w.cumulative[0] = 0.0;
  for (std::size_t i = 0; i < e_.size(); ++i) {
    const double u = z_f_[i] - zf;
    const double v = z_m_[i] - zm;
    w.cumulative[i + 1] = w.cumulative[i] + std::exp(-(u * u + v * v) / denom);
  }
  w.total = w.cumulative.back();
  if (!(w.total > 0.0)) {
    std::ostringstream msg;
    msg << "no local support at (F=" << at.f << ", M=" << at.m << ")";
    throw NoLocalSupportError(msg.str());
  }
  return w;
}

double ConditionalCdfEstimator::cdf_from(const LocalWeights& w, double e_threshold) const {
  const auto below = static_cast<std::size_t>(std::lower_bound(e_.begin(), e_.end(), e_threshold) - e_.begin());
  double mass = w.cumulative[below];
  if (config_.ties == TieRule::Midpoint) {
    const auto upto = static_cast<std::size_t>(std::upper_bound(e_.begin(), e_.end(), e_threshold) - e_.begin());
    mass += 0.5 * (w.cumulative[upto] - w.cumulative[below]);
  }
  return mass / w.total;
}

double ConditionalCdfEstimator::cdf(double e_threshold, const EvalPoint& at) const {
  if (std::isnan(e_threshold)) throw ValidationError("cdf threshold is NaN");
  return cdf_from(local_weights(at), e_threshold);
}

double ConditionalCdfEstimator::quantile(double p, const EvalPoint& at) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile probability outside [0,1]");
  const auto w = local_weights(at);
  const auto it = std::partition_point(candidates_.begin(), candidates_.end(),
                                       [&](double c) { return cdf_from(w, c) < p; });
  return it == candidates_.end() ? candidates_.back() : *it;
}

}  // namespace matchfn
