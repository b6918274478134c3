#include "matchfn/cli.hpp"

#include "matchfn/csv.hpp"
#include "matchfn/error.hpp"
#include "matchfn/panel.hpp"
#include "matchfn/pipeline.hpp"
#include "matchfn/simulate.hpp"
#include "report_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace matchfn {

namespace {

namespace fs = std::filesystem;
using cli::Format;
using cli::Table;
using nlohmann::json;

constexpr double kClampLimit = 0.2;

/// Validation error attributed to a command-line flag.
ValidationError flag_error(const std::string& flag, const std::string& what) {
  return ValidationError(flag + ": " + what);
}

Format parse_format(const std::string& s) { return s == "json" ? Format::Json : Format::Csv; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_table(const fs::path& dir, const std::string& stem, const Table& table, Format format,
                 const std::string& run_hash, json& outputs) {
  const auto path = dir / (stem + cli::extension(format));
  const auto text = cli::render(table, format, run_hash);
  cli::write_atomic(path, text);
  outputs.push_back({{"file", path.filename().string()}, {"sha256", cli::sha256_hex(text)}});
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["created"] = utc_timestamp();  // not part of run_hash
  cli::write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string preset = "paper-shape";
  std::uint64_t seed = 7;
  std::string out;
  std::size_t periods = 0;
  double alpha = 0.0;
  std::string technology = "cobb-douglas";
  double substitution = 0.0;
  double rho = 0.0, sigma_a = 0.0, sigma_f = 0.0, sigma_m = 0.0, sigma_e = 0.0;
  std::vector<std::string> regions;
  std::map<std::string, bool> given;
};

std::string flag_for_parameter(const std::string& message) {
  static const std::map<std::string, std::string> flags = {
      {"alpha", "--alpha"},     {"substitution", "--substitution"}, {"periods", "--periods"},
      {"rho", "--rho"},         {"sigma_a", "--sigma-a"},           {"sigma_f", "--sigma-f"},
      {"sigma_m", "--sigma-m"}, {"sigma_e", "--sigma-e"},
  };
  const std::string marker = "parameter ";
  const auto at = message.find(marker);
  if (at == std::string::npos) return {};
  const auto start = at + marker.size();
  const auto name = message.substr(start, message.find(':', start) - start);
  const auto it = flags.find(name);
  return it == flags.end() ? std::string{} : it->second;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig cfg = paper_shape_config(a.seed);
  const auto given = [&](const char* name) { return a.given.count(name) && a.given.at(name); };
  if (given("periods")) cfg.periods = a.periods;
  if (given("alpha")) cfg.technology.alpha = a.alpha;
  if (a.technology == "ces") cfg.technology.kind = Technology::Kind::Ces;
  if (given("substitution")) cfg.technology.substitution = a.substitution;
  if (given("rho")) cfg.rho = a.rho;
  if (given("sigma-a")) cfg.sigma_a = a.sigma_a;
  if (given("sigma-f")) cfg.sigma_f = a.sigma_f;
  if (given("sigma-m")) cfg.sigma_m = a.sigma_m;
  if (given("sigma-e")) cfg.sigma_e = a.sigma_e;

  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    const auto flag = flag_for_parameter(e.what());
    if (flag.empty()) throw;
    throw flag_error(flag, e.what());
  }

  SimOutput sim;
  if (a.regions.empty()) {
    sim = simulate_market(cfg);
  } else {
    std::vector<RegionSpec> specs;
    for (std::size_t i = 0; i < a.regions.size(); ++i) {
      specs.push_back({a.regions[i], std::pow(0.6, static_cast<double>(i)), -0.1 * static_cast<double>(i)});
    }
    sim = simulate_regions(cfg, specs);
  }

  const fs::path dir = a.out;
  cli::ensure_directory(dir);
  std::ostringstream panel_text;
  write_panel(panel_text, sim.panel);
  cli::write_atomic(dir / "panel.csv", panel_text.str());

  std::ostringstream truth;
  truth << "ym,region,A,eps_f,eps_m\n";
  for (std::size_t t = 0; t < sim.panel.size(); ++t) {
    const auto& o = sim.panel[t];
    truth << o.period.str() << ',' << o.region << ',' << csv::format_double(sim.efficiency[t]) << ','
          << csv::format_double(sim.eps_f) << ',' << csv::format_double(sim.eps_m) << '\n';
  }
  cli::write_atomic(dir / "truth.csv", truth.str());

  out << "T=" << cfg.periods << " alpha=" << csv::format_double(cfg.technology.alpha);
  for (const auto& region : sim.panel.regions()) {
    std::size_t first = sim.panel.size(), last = 0;
    for (std::size_t t = 0; t < sim.panel.size(); ++t) {
      if (sim.panel[t].region != region) continue;
      first = std::min(first, t);
      last = t;
    }
    out << (region.empty() ? std::string{} : " " + region) << " true_A_ratio="
        << csv::format_double(sim.efficiency[last] / sim.efficiency[first]);
  }
  out << "\nwrote " << (dir / "panel.csv").string() << " and " << (dir / "truth.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string input;
  std::vector<std::string> regions;
  std::string anchor;
  std::string anchor_region;
  bool per_region_anchor = false;
  double bandwidth = 0.75;
  std::string ties = "strict";
  std::size_t psi_grid = 80;
  std::size_t lambda_grid = 40;
  std::string penalty = "cv";
  std::size_t cv_folds = 5;
  bool log_log = false;
  bool observed_denominator = false;
  std::string format = "csv";
  std::string out;
};

std::variant<double, CrossValidation> parse_penalty(const std::string& text, std::size_t folds) {
  if (text == "cv") {
    CrossValidation cv;
    cv.folds = folds;
    return cv;
  }
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || !(value >= 0.0) || !std::isfinite(value)) {
    throw flag_error("--penalty", "expected 'cv' or a nonnegative number, got '" + text + "'");
  }
  return value;
}

MarketPanel filter_regions(const MarketPanel& panel, const std::vector<std::string>& regions) {
  if (regions.empty()) return panel;
  for (const auto& r : regions) {
    if (!panel.has_region(r)) throw flag_error("--region", "unknown region '" + r + "'");
  }
  std::vector<MarketObservation> kept;
  for (const auto& o : panel.observations()) {
    if (std::find(regions.begin(), regions.end(), o.region) != regions.end()) kept.push_back(o);
  }
  return MarketPanel(std::move(kept));
}

json estimate_config(const EstimateArgs& a) {
  return {
      {"command", "estimate"},
      {"input", fs::path(a.input).filename().string()},
      {"regions", a.regions},
      {"anchor", a.anchor},
      {"anchor_region", a.anchor_region},
      {"per_region_anchor", a.per_region_anchor},
      {"bandwidth", a.bandwidth},
      {"ties", a.ties},
      {"psi_grid", a.psi_grid},
      {"lambda_grid", a.lambda_grid},
      {"penalty", a.penalty},
      {"cv_folds", a.cv_folds},
      {"surface", a.log_log ? "log-log" : "levels"},
      {"denominator", a.observed_denominator ? "observed" : "fitted"},
      {"format", a.format},
  };
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  EstimateOptions opt;
  opt.kernel.bandwidth = a.bandwidth;
  if (!(a.bandwidth > 0.0) || !std::isfinite(a.bandwidth)) throw flag_error("--bandwidth", "must be positive");
  opt.kernel.ties = a.ties == "midpoint" ? TieRule::Midpoint : TieRule::Strict;
  if (a.psi_grid < 2) throw flag_error("--psi-grid", "needs at least 2 points");
  if (a.lambda_grid < 2) throw flag_error("--lambda-grid", "needs at least 2 points");
  if (a.cv_folds < 2) throw flag_error("--cv-folds", "needs at least 2 folds");
  opt.psi_points = a.psi_grid;
  opt.lambda_points = a.lambda_grid;
  opt.lasso.penalty = parse_penalty(a.penalty, a.cv_folds);
  if (!a.anchor.empty()) {
    try {
      opt.anchor = Period::parse(a.anchor);
    } catch (const ValidationError& e) {
      throw flag_error("--anchor", e.what());
    }
  }
  if (!a.anchor_region.empty()) opt.anchor_region = a.anchor_region;
  opt.per_region_anchor = a.per_region_anchor;
  opt.surface_scale = a.log_log ? SurfaceScale::LogLog : SurfaceScale::Levels;
  opt.denominator = a.observed_denominator ? ElasticityDenominator::Observed : ElasticityDenominator::Fitted;

  const auto input_bytes = cli::read_file(a.input);
  std::istringstream input_stream(input_bytes);
  const MarketPanel panel = filter_regions(load_panel(input_stream), a.regions);
  const auto result = estimate(panel, opt);

  const json config = estimate_config(a);
  const std::string input_hash = cli::sha256_hex(input_bytes);
  const std::string run_hash = cli::sha256_hex(config.dump() + input_hash);
  const Format format = parse_format(a.format);
  const fs::path dir = a.out;
  cli::ensure_directory(dir);
  json outputs = json::array();

  Table derived{{"period", "region", "tightness", "female_rate", "male_rate"}, {}};
  for (const auto& d : derive_ratios(panel)) {
    derived.add({d.period.str(), d.region, cli::number(d.tightness), cli::number(d.female_rate),
                 cli::number(d.male_rate)});
  }
  write_table(dir, "derived", derived, format, run_hash, outputs);

  Table efficiency{{"period", "region", "rank", "a_raw", "a_index", "support_edge"}, {}};
  for (const auto& r : result.efficiency.rows) {
    efficiency.add({r.period.str(), r.region, cli::number(r.rank), cli::number(r.a_raw), cli::number(r.a_index),
                    r.support_edge});
  }
  write_table(dir, "efficiency", efficiency, format, run_hash, outputs);

  Table elasticity{{"period", "region", "e_fitted", "eps_f", "eps_m", "missing"}, {}};
  for (const auto& r : result.elasticity) {
    elasticity.add({r.period.str(), r.region, cli::number(r.e_fitted),
                    r.value ? cli::number(r.value->eps_f) : json(nullptr),
                    r.value ? cli::number(r.value->eps_m) : json(nullptr), !r.value.has_value()});
  }
  write_table(dir, "elasticity", elasticity, format, run_hash, outputs);

  Table surface{{"period", "region", "effective_input", "males", "matches", "observed", "rank"}, {}};
  for (const auto& p : result.surface.points) {
    surface.add({p.period.str(), p.region, cli::number(p.effective_input), cli::number(p.males),
                 cli::number(p.matches), cli::number(p.observed), cli::number(p.rank)});
  }
  write_table(dir, "surface", surface, format, run_hash, outputs);

  json lasso = json::array();
  const auto regions = panel.regions();
  for (std::size_t i = 0; i < result.surfaces.size(); ++i) {
    const auto& s = result.surfaces[i];
    const auto& raw = s.raw_coefficients();
    lasso.push_back({{"region", regions[i]},
                     {"penalty", s.lasso().penalty},
                     {"sweeps", s.lasso().sweeps},
                     {"kkt_residual", s.lasso().kkt_residual},
                     {"terms", {"intercept", "x", "y", "x^2", "xy", "y^2"}},
                     {"coefficients", std::vector<double>(raw.begin(), raw.end())}});
  }

  const double clamped = result.clamped_fraction();
  write_manifest(dir, {{"run_hash", run_hash},
                       {"config", config},
                       {"input_sha256", input_hash},
                       {"anchor", result.anchor.str()},
                       {"anchor_region", result.anchor_region},
                       {"observations", panel.size()},
                       {"clamped_fraction", clamped},
                       {"monotonicity_violations", result.surface.monotonicity_violations},
                       {"lasso", lasso},
                       {"warnings", result.warnings},
                       {"outputs", outputs}});

  out << "estimated " << panel.size() << " observations; anchor " << result.anchor.str()
      << (result.anchor_region.empty() ? std::string{} : " " + result.anchor_region) << "; "
      << result.warnings.size() << " warnings; outputs in " << dir.string() << "\n";
  if (clamped > kClampLimit) {
    err << "warning: " << csv::format_double(100.0 * clamped)
        << "% of observations clamped at the distribution support edge\n";
    return kExitDegraded;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string format = "csv";
  std::string out;
};

/// Input series table as strings keyed by column name.
struct SeriesFile {
  std::string path;
  std::vector<std::string> columns;
  std::vector<std::map<std::string, std::string>> rows;

  bool has(const std::string& column) const {
    return std::find(columns.begin(), columns.end(), column) != columns.end();
  }
};

std::string cell_text(const json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "1" : "0";
  if (cell.is_number_float()) return csv::format_double(cell.get<double>());
  return cell.dump();
}

SeriesFile load_series(const std::string& path) {
  const auto bytes = cli::read_file(path);
  SeriesFile file{path, {}, {}};
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && bytes[first] == '{') {
    json doc;
    try {
      doc = json::parse(bytes);
      file.columns = doc.at("columns").get<std::vector<std::string>>();
      for (const auto& row : doc.at("rows")) {
        std::map<std::string, std::string> r;
        for (const auto& c : file.columns) r[c] = cell_text(row.at(c));
        file.rows.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw ValidationError("malformed series file '" + path + "': " + e.what());
    }
    return file;
  }
  std::istringstream in(bytes);
  const auto table = csv::read(in);
  file.columns = table.header;
  for (const auto& fields : table.rows) {
    if (fields.size() != table.header.size()) throw ValidationError("ragged row in '" + path + "'");
    std::map<std::string, std::string> r;
    for (std::size_t c = 0; c < fields.size(); ++c) r[table.header[c]] = fields[c];
    file.rows.push_back(std::move(r));
  }
  return file;
}

json parse_value(const std::string& text, const std::string& path) {
  if (text.empty()) return nullptr;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ValidationError("non-numeric value '" + text + "' in '" + path + "'");
  }
  return cli::number(v);
}

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<SeriesFile> files;
  std::string hashes;
  for (const auto& path : a.inputs) {
    files.push_back(load_series(path));
    hashes += cli::sha256_file(path);
  }

  using Key = std::pair<std::string, std::string>;
  std::optional<std::set<Key>> reference;
  std::string reference_path;
  Table report{{"period", "region", "metric", "value"}, {}};

  for (const auto& f : files) {
    std::vector<std::string> metrics;
    bool per_period = true;
    if (f.has("a_index")) {
      metrics = {"a_index"};
    } else if (f.has("eps_f") && f.has("eps_m")) {
      metrics = {"eps_f", "eps_m"};
    } else if (f.has("share")) {
      metrics = {"share"};
      per_period = false;
    } else {
      throw ValidationError("unrecognized series file '" + f.path + "': expected a_index, eps_f/eps_m or share");
    }
    if (!f.has("period")) throw ValidationError("missing column 'period' in '" + f.path + "'");

    std::set<Key> keys;
    for (const auto& r : f.rows) {
      const auto region = r.count("region") ? r.at("region") : std::string{};
      if (!keys.emplace(r.at("period"), region).second) {
        throw ValidationError("duplicate key " + r.at("period") + " " + region + " in '" + f.path + "'");
      }
    }
    if (per_period) {
      if (!reference) {
        reference = keys;
        reference_path = f.path;
      } else if (keys != *reference) {
        throw ValidationError("period keys in '" + f.path + "' do not match '" + reference_path + "'");
      }
    }

    for (const auto& r : f.rows) {
      const auto region = r.count("region") ? r.at("region") : std::string{};
      for (const auto& m : metrics) {
        const std::string name = m == "share" ? "within_area_share" : m;
        report.add({r.at("period"), region, name, parse_value(r.at(m), f.path)});
      }
    }
  }

  const std::string run_hash = cli::sha256_hex(hashes);
  const fs::path dir = a.out;
  cli::ensure_directory(dir);
  json outputs = json::array();
  const Format format = parse_format(a.format);
  write_table(dir, "report", report, format, run_hash, outputs);
  json inputs = json::array();
  for (const auto& path : a.inputs) inputs.push_back(fs::path(path).filename().string());
  write_manifest(dir, {{"run_hash", run_hash},
                       {"config", {{"command", "report"}, {"inputs", inputs}, {"format", a.format}}},
                       {"warnings", json::array()},
                       {"outputs", outputs}});
  out << "merged " << files.size() << " files into " << report.rows.size() << " rows\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// within-area

struct WithinAreaArgs {
  std::string input;
  std::string groups;
  std::string granularity = "month";
  std::string side = "female";
  std::vector<std::string> vocabulary;
  std::string format = "csv";
  std::string out;
};

int cmd_within_area(const WithinAreaArgs& a, std::ostream& out) {
  const auto bytes = cli::read_file(a.input);
  std::istringstream in(bytes);
  auto records = load_match_records(in);
  std::string groups_hash;

  ShareOptions opt;
  opt.granularity = a.granularity == "year" ? Granularity::Year : Granularity::Month;
  opt.side = a.side == "male" ? ConditioningSide::Male : ConditioningSide::Female;
  opt.vocabulary = a.vocabulary;

  if (!a.groups.empty()) {
    const auto group_bytes = cli::read_file(a.groups);
    groups_hash = cli::sha256_hex(group_bytes);
    std::istringstream gin(group_bytes);
    const auto groups = load_region_groups(gin);
    // Vocabulary checks apply to the raw labels, before grouping.
    for (auto& rec : records) {
      for (auto* label : {&rec.female_region, &rec.male_region}) {
        if (!opt.vocabulary.empty() &&
            std::find(opt.vocabulary.begin(), opt.vocabulary.end(), *label) == opt.vocabulary.end()) {
          throw ValidationError("unknown region label '" + *label + "'");
        }
        const auto it = groups.find(*label);
        if (it == groups.end()) {
          throw ValidationError("region '" + *label + "' has no group in '" + a.groups + "'");
        }
        *label = it->second;
      }
    }
    opt.vocabulary.clear();
  }

  const auto cells = within_area_share(records, opt);
  Table table{{"period", "region", "same_region", "total", "share"}, {}};
  for (const auto& c : cells) {
    table.add({c.period_label(), c.region, c.same_region, c.total, cli::number(c.share)});
  }

  const json config = {{"command", "within-area"},
                       {"input", fs::path(a.input).filename().string()},
                       {"region_groups", a.groups.empty() ? "" : fs::path(a.groups).filename().string()},
                       {"granularity", a.granularity},
                       {"side", a.side},
                       {"vocabulary", a.vocabulary},
                       {"format", a.format}};
  const std::string run_hash = cli::sha256_hex(config.dump() + cli::sha256_hex(bytes) + groups_hash);
  const fs::path dir = a.out;
  cli::ensure_directory(dir);
  json outputs = json::array();
  write_table(dir, "within_area", table, parse_format(a.format), run_hash, outputs);
  write_manifest(dir, {{"run_hash", run_hash}, {"config", config}, {"warnings", json::array()}, {"outputs", outputs}});
  out << "wrote " << cells.size() << " share cells\n";
  return kExitOk;
}

void add_format(CLI::App* cmd, std::string& target) {
  cmd->add_option("--format", target, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric matching-function estimation for two-sided market panels", "matchfn"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic panel with known efficiency");
  simulate->add_option("--preset", sim.preset, "Named scenario")->check(CLI::IsMember({"paper-shape"}));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("-o,--out", sim.out, "Output directory")->required();
  std::vector<std::pair<std::string, CLI::Option*>> overrides = {
      {"periods", simulate->add_option("--periods", sim.periods, "Number of months")},
      {"alpha", simulate->add_option("--alpha", sim.alpha, "Elasticity on effective female input")},
      {"substitution", simulate->add_option("--substitution", sim.substitution, "CES substitution parameter")},
      {"rho", simulate->add_option("--rho", sim.rho, "AR(1) persistence of log A")},
      {"sigma-a", simulate->add_option("--sigma-a", sim.sigma_a, "Efficiency shock sd")},
      {"sigma-f", simulate->add_option("--sigma-f", sim.sigma_f, "Female shock sd")},
      {"sigma-m", simulate->add_option("--sigma-m", sim.sigma_m, "Male shock sd")},
      {"sigma-e", simulate->add_option("--sigma-e", sim.sigma_e, "Measurement noise sd")},
  };
  simulate->add_option("--technology", sim.technology, "Generating technology")
      ->check(CLI::IsMember({"cobb-douglas", "ces"}));
  simulate->add_option("--regions", sim.regions, "Comma-separated region names")->delimiter(',');

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate efficiency and elasticities from a panel");
  estimate_cmd->add_option("--input", est.input, "Panel CSV (ym, region, E, F, M)")->required();
  estimate_cmd->add_option("--region", est.regions, "Restrict to these regions")->delimiter(',');
  estimate_cmd->add_option("--anchor", est.anchor, "Normalization period YYYY-MM");
  estimate_cmd->add_option("--anchor-region", est.anchor_region, "Region whose anchor row is 100");
  estimate_cmd->add_flag("--per-region-anchor", est.per_region_anchor, "Estimate and anchor each region separately");
  estimate_cmd->add_option("--bandwidth", est.bandwidth, "Kernel bandwidth on standardized logs");
  estimate_cmd->add_option("--ties", est.ties, "Indicator at ties")->check(CLI::IsMember({"strict", "midpoint"}));
  estimate_cmd->add_option("--psi-grid", est.psi_grid, "Points on the efficiency scale grid");
  estimate_cmd->add_option("--lambda-grid", est.lambda_grid, "Points on the female scale grid");
  estimate_cmd->add_option("--penalty", est.penalty, "LASSO penalty: 'cv' or a number");
  estimate_cmd->add_option("--cv-folds", est.cv_folds, "Cross-validation folds");
  estimate_cmd->add_flag("--log-log", est.log_log, "Fit the surface in logs");
  estimate_cmd->add_flag("--observed-denominator", est.observed_denominator, "Divide by observed E");
  add_format(estimate_cmd, est.format);
  estimate_cmd->add_option("-o,--out", est.out, "Output directory")->required();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Merge series files into one long table");
  report->add_option("--input", rep.inputs, "Series files (efficiency, elasticity, within-area)")->required();
  add_format(report, rep.format);
  report->add_option("-o,--out", rep.out, "Output directory")->required();

  WithinAreaArgs wa;
  auto* within = app.add_subcommand("within-area", "Share of matches within the same region");
  within->add_option("--input", wa.input, "Match records CSV (ym, female_region, male_region)")->required();
  within->add_option("--region-groups", wa.groups, "CSV mapping region to group");
  within->add_option("--granularity", wa.granularity, "Period cells")->check(CLI::IsMember({"month", "year"}));
  within->add_option("--side", wa.side, "Conditioning side")->check(CLI::IsMember({"female", "male"}));
  within->add_option("--regions", wa.vocabulary, "Declared region labels")->delimiter(',');
  add_format(within, wa.format);
  within->add_option("-o,--out", wa.out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      for (const auto& [name, opt] : overrides) sim.given[name] = opt->count() > 0;
      return cmd_simulate(sim, out);
    }
    if (estimate_cmd->parsed()) return cmd_estimate(est, out, err);
    if (report->parsed()) return cmd_report(rep, out);
    return cmd_within_area(wa, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: estimation failed: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEstimation;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace matchfn
