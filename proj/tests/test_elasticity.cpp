#include "doctest.h"
#include "oracles.hpp"

#include "matchfn/elasticity.hpp"
#include "matchfn/error.hpp"
#include "matchfn/simulate.hpp"

#include <cmath>
#include <random>

using namespace matchfn;

namespace {

struct Inputs {
  std::vector<double> af, m, e;
};

// Effective input from the true efficiency path.
Inputs oracle_inputs(std::uint64_t seed) {
  const auto sim = simulate_market(paper_shape_config(seed));
  Inputs in;
  for (std::size_t t = 0; t < sim.panel.size(); ++t) {
    in.af.push_back(sim.efficiency[t] / sim.efficiency[0] * static_cast<double>(sim.panel[t].females));
    in.m.push_back(static_cast<double>(sim.panel[t].males));
    in.e.push_back(static_cast<double>(sim.panel[t].engagements));
  }
  return in;
}

LassoOptions fixed(double penalty) {
  LassoOptions o;
  o.penalty = penalty;
  return o;
}

}  // namespace

TEST_CASE("quadratic expansion") {
  const auto f = quadratic_features(2.0, 3.0);
  CHECK(f == std::array<double, 5>{2.0, 3.0, 4.0, 6.0, 9.0});
}

TEST_CASE("design guards") {
  const std::vector<double> af(8, 2.0), m(8, 3.0);
  CHECK_THROWS_AS(build_design(af, m), ValidationError);
  const std::vector<double> few{1, 2, 3, 4, 5}, few_m{2, 1, 4, 3, 5};
  CHECK_THROWS_AS(build_design(few, few_m), ValidationError);
}

TEST_CASE("raw-scale predictions equal standardized-space fitted values") {
  const auto in = oracle_inputs(3);
  const auto surface = QuadraticSurface::fit(in.af, in.m, in.e);
  const auto design = build_design(in.af, in.m);
  const auto fitted = lasso_predict(design, surface.lasso());
  for (std::size_t i = 0; i < in.af.size(); ++i) {
    CHECK(std::abs(surface.predict(in.af[i], in.m[i]) - fitted[i]) <= 1e-10 * std::max(1.0, std::abs(fitted[i])));
  }
}

TEST_CASE("planted linear surface gives its shares where AF = M = E") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(50.0, 150.0);
  std::vector<double> af, m, e;
  for (int i = 0; i < 40; ++i) {
    af.push_back(u(rng));
    m.push_back(u(rng));
    e.push_back(0.6 * af.back() + 0.4 * m.back());
  }
  const auto surface = QuadraticSurface::fit(af, m, e, fixed(0.0));
  const auto eps = elasticity_at(surface, 100.0, 100.0, surface.predict(100.0, 100.0));
  CHECK(surface.predict(100.0, 100.0) == doctest::Approx(100.0).epsilon(1e-8));
  CHECK(eps.eps_f == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(eps.eps_m == doctest::Approx(0.4).epsilon(1e-8));
}

TEST_CASE("analytic elasticities match central differences") {
  const auto in = oracle_inputs(5);
  for (auto scale : {SurfaceScale::Levels, SurfaceScale::LogLog}) {
    const auto surface = QuadraticSurface::fit(in.af, in.m, in.e, {}, scale);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> pick(0, in.af.size() - 1);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    for (int k = 0; k < 100; ++k) {
      const double x = in.af[pick(rng)] * jitter(rng);
      const double y = in.m[pick(rng)] * jitter(rng);
      const auto eps = elasticity_at(surface, x, y, surface.predict(x, y));
      const double fd_f = oracle::log_derivative([&](double v) { return surface.predict(v, y); }, x);
      const double fd_m = oracle::log_derivative([&](double v) { return surface.predict(x, v); }, y);
      CHECK(std::abs(eps.eps_f - fd_f) <= 1e-4);
      CHECK(std::abs(eps.eps_m - fd_m) <= 1e-4);
    }
  }
}

TEST_CASE("unpenalized elasticities do not depend on the units of AF") {
  const auto in = oracle_inputs(6);
  std::vector<double> af_k = in.af;
  for (auto& v : af_k) v *= 1000.0;
  const auto s1 = QuadraticSurface::fit(in.af, in.m, in.e, fixed(0.0));
  const auto s2 = QuadraticSurface::fit(af_k, in.m, in.e, fixed(0.0));
  for (std::size_t i = 0; i < in.af.size(); i += 7) {
    const auto a = elasticity_at(s1, in.af[i], in.m[i], s1.predict(in.af[i], in.m[i]));
    const auto b = elasticity_at(s2, af_k[i], in.m[i], s2.predict(af_k[i], in.m[i]));
    CHECK(std::abs(a.eps_f - b.eps_f) <= 1e-6);
    CHECK(std::abs(a.eps_m - b.eps_m) <= 1e-6);
  }
}

TEST_CASE("Cobb-Douglas data with true efficiency recovers alpha and CRS") {
  const auto in = oracle_inputs(7);
  const auto surface = QuadraticSurface::fit(in.af, in.m, in.e);
  std::vector<ElasticityInput> rows;
  for (std::size_t i = 0; i < in.af.size(); ++i) rows.push_back({Period::make(2014, 1).plus_months(static_cast<int>(i)), "", in.af[i], in.m[i], in.e[i]});
  const auto series = elasticity_series(surface, rows);
  double ef = 0, em = 0;
  for (const auto& r : series) {
    REQUIRE(r.value.has_value());
    ef += r.value->eps_f;
    em += r.value->eps_m;
  }
  ef /= static_cast<double>(series.size());
  em /= static_cast<double>(series.size());
  CHECK(std::abs(ef - 0.6) <= 0.05);
  CHECK(std::abs(ef + em - 1.0) <= 0.1);
}

TEST_CASE("constant inputs give a constant series; undefined points are missing") {
  const auto in = oracle_inputs(7);
  const auto surface = QuadraticSurface::fit(in.af, in.m, in.e);
  std::vector<ElasticityInput> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({Period::make(2014, 1).plus_months(i), "", in.af[40], in.m[40], in.e[40]});
  const auto series = elasticity_series(surface, rows);
  for (const auto& r : series) {
    REQUIRE(r.value.has_value());
    CHECK(r.value->eps_f == series[0].value->eps_f);
    CHECK(r.value->eps_m == series[0].value->eps_m);
  }
  rows[2].e = 0.0;
  const auto observed = elasticity_series(surface, rows, ElasticityDenominator::Observed);
  CHECK_FALSE(observed[2].value.has_value());
  CHECK(observed[1].value.has_value());
  CHECK_THROWS_AS(elasticity_at(surface, in.af[0], in.m[0], 0.0), ValidationError);
}
