#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matchfn/cli.hpp"
#include "matchfn/error.hpp"
#include "matchfn/isotonic.hpp"
#include "matchfn/pipeline.hpp"
#include "matchfn/simulate.hpp"

#include <sstream>
#include <tuple>

namespace py = pybind11;
using namespace matchfn;

namespace {

using Row = std::tuple<std::string, std::string, std::int64_t, std::int64_t, std::int64_t>;

MarketPanel to_panel(const std::vector<Row>& rows) {
  std::vector<MarketObservation> obs;
  obs.reserve(rows.size());
  for (const auto& [ym, region, e, f, m] : rows) obs.push_back({Period::parse(ym), region, e, f, m});
  return MarketPanel(std::move(obs));
}

std::vector<Row> from_panel(const MarketPanel& panel) {
  std::vector<Row> rows;
  for (const auto& o : panel.observations()) rows.emplace_back(o.period.str(), o.region, o.engagements, o.females, o.males);
  return rows;
}

py::dict simulate(std::uint64_t seed, std::optional<std::size_t> periods, std::optional<double> alpha,
                  std::optional<double> sigma_a) {
  auto cfg = paper_shape_config(seed);
  if (periods) cfg.periods = *periods;
  if (alpha) cfg.technology.alpha = *alpha;
  if (sigma_a) cfg.sigma_a = *sigma_a;
  const auto sim = simulate_market(cfg);
  py::dict out;
  out["rows"] = from_panel(sim.panel);
  out["efficiency"] = sim.efficiency;
  out["eps_f"] = sim.eps_f;
  out["eps_m"] = sim.eps_m;
  return out;
}

py::dict estimate_rows(const std::vector<Row>& rows, double bandwidth, const std::string& ties,
                       std::optional<double> penalty, std::optional<std::string> anchor,
                       std::optional<std::string> anchor_region, bool per_region_anchor) {
  EstimateOptions opt;
  opt.kernel.bandwidth = bandwidth;
  if (ties == "midpoint") {
    opt.kernel.ties = TieRule::Midpoint;
  } else if (ties != "strict") {
    throw ValidationError("ties must be 'strict' or 'midpoint'");
  }
  if (penalty) opt.lasso.penalty = *penalty;
  if (anchor) opt.anchor = Period::parse(*anchor);
  opt.anchor_region = anchor_region;
  opt.per_region_anchor = per_region_anchor;

  const auto panel = to_panel(rows);
  const auto est = estimate(panel, opt);
  py::list efficiency, elasticity;
  for (const auto& r : est.efficiency.rows) {
    py::dict d;
    d["period"] = r.period.str();
    d["region"] = r.region;
    d["rank"] = r.rank;
    d["a_raw"] = r.a_raw;
    d["a_index"] = r.a_index;
    d["support_edge"] = r.support_edge;
    efficiency.append(d);
  }
  for (const auto& r : est.elasticity) {
    py::dict d;
    d["period"] = r.period.str();
    d["region"] = r.region;
    d["e_fitted"] = r.e_fitted;
    d["eps_f"] = r.value ? py::object(py::float_(r.value->eps_f)) : py::none();
    d["eps_m"] = r.value ? py::object(py::float_(r.value->eps_m)) : py::none();
    elasticity.append(d);
  }
  py::dict out;
  out["anchor"] = est.anchor.str();
  out["anchor_region"] = est.anchor_region;
  out["efficiency"] = efficiency;
  out["elasticity"] = elasticity;
  out["clamped_fraction"] = est.clamped_fraction();
  out["warnings"] = est.warnings;
  return out;
}

py::dict lasso(const std::vector<std::vector<double>>& x, const std::vector<double>& y, std::optional<double> penalty) {
  if (x.empty()) throw ValidationError("design has no rows");
  const std::size_t cols = x.front().size();
  std::vector<double> raw;
  for (const auto& row : x) {
    if (row.size() != cols) throw ValidationError("ragged design matrix");
    raw.insert(raw.end(), row.begin(), row.end());
  }
  const auto design = standardize(raw, x.size(), cols);
  LassoOptions opt;
  if (penalty) opt.penalty = *penalty;
  const auto fit = lasso_fit(design, y, opt);
  // Slopes and intercept on the raw scale.
  std::vector<double> slopes(cols);
  double intercept = fit.intercept;
  for (std::size_t j = 0; j < cols; ++j) {
    slopes[j] = fit.coef[j] / design.sd[j];
    intercept -= slopes[j] * design.mean[j];
  }
  py::dict out;
  out["intercept"] = intercept;
  out["coef"] = slopes;
  out["penalty"] = fit.penalty;
  out["sweeps"] = fit.sweeps;
  out["kkt_residual"] = fit.kkt_residual;
  out["objective_history"] = fit.objective_history;
  return out;
}

std::vector<py::dict> within_area(const std::vector<std::tuple<std::string, std::string, std::string>>& records,
                                  const std::string& granularity, const std::string& side) {
  std::vector<MatchRecord> recs;
  for (const auto& [ym, female, male] : records) recs.push_back({Period::parse(ym), female, male});
  ShareOptions opt;
  opt.granularity = granularity == "year" ? Granularity::Year : Granularity::Month;
  opt.side = side == "male" ? ConditioningSide::Male : ConditioningSide::Female;
  std::vector<py::dict> out;
  for (const auto& c : within_area_share(recs, opt)) {
    py::dict d;
    d["period"] = c.period_label();
    d["region"] = c.region;
    d["same_region"] = c.same_region;
    d["total"] = c.total;
    d["share"] = c.share;
    out.push_back(d);
  }
  return out;
}

std::tuple<int, std::string, std::string> cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Matching-function estimation: efficiency series, elasticities and simulation.";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "EstimationError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("load_panel", [](const std::string& path) { return from_panel(load_panel_file(path)); }, py::arg("path"),
        "Rows (ym, region, E, F, M) of a validated panel CSV.");
  m.def("simulate", &simulate, py::arg("seed") = 7, py::arg("periods") = py::none(), py::arg("alpha") = py::none(),
        py::arg("sigma_a") = py::none(), "Panel from the paper-shape preset, with the true efficiency path.");
  m.def("estimate", &estimate_rows, py::arg("rows"), py::arg("bandwidth") = 0.75, py::arg("ties") = "strict",
        py::arg("penalty") = py::none(), py::arg("anchor") = py::none(), py::arg("anchor_region") = py::none(),
        py::arg("per_region_anchor") = false,
        "Efficiency index and elasticities. penalty=None selects the LASSO penalty by cross-validation.");
  m.def("isotonic_fit", [](const std::vector<double>& y) { return isotonic_fit(y); }, py::arg("values"));
  m.def("lasso_fit", &lasso, py::arg("x"), py::arg("y"), py::arg("penalty") = py::none());
  m.def("within_area_share", &within_area, py::arg("records"), py::arg("granularity") = "month",
        py::arg("side") = "female");
  m.def("run_cli", &cli, py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");

  py::class_<ConditionalCdfEstimator>(m, "ConditionalCdf")
      .def(py::init([](const std::vector<Row>& rows, double bandwidth) {
             KernelConfig kc;
             kc.bandwidth = bandwidth;
             return ConditionalCdfEstimator::fit(to_panel(rows), kc);
           }),
           py::arg("rows"), py::arg("bandwidth") = 0.75)
      .def("cdf", [](const ConditionalCdfEstimator& est, double e, double f, double m) { return est.cdf(e, {f, m}); },
           py::arg("e"), py::arg("f"), py::arg("m"))
      .def("quantile",
           [](const ConditionalCdfEstimator& est, double p, double f, double m) { return est.quantile(p, {f, m}); },
           py::arg("p"), py::arg("f"), py::arg("m"));
}
