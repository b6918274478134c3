#include "matchfn/panel.hpp"

#include "matchfn/csv.hpp"
#include "matchfn/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace matchfn {

namespace {

std::string row_suffix(std::optional<std::size_t> row) {
  return row ? " at row " + std::to_string(*row) : std::string{};
}

std::string key_label(const Period& period, const std::string& region) {
  return "(" + period.str() + (region.empty() ? std::string{} : ", " + region) + ")";
}

std::int64_t parse_count(const std::string& text, const std::string& column, std::size_t row) {
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ValidationError("unparseable count '" + text + "' in column " + column + " at row " + std::to_string(row),
                          row);
  }
  return value;
}

}  // namespace

void validate(const MarketObservation& obs, std::optional<std::size_t> row) {
  if (obs.females <= 0) throw ValidationError("F must be positive" + row_suffix(row), row);
  if (obs.males <= 0) throw ValidationError("M must be positive" + row_suffix(row), row);
  if (obs.engagements < 0) throw ValidationError("E must be nonnegative" + row_suffix(row), row);
  if (obs.engagements > std::min(obs.females, obs.males)) {
    throw ValidationError("E exceeds min(F,M)" + row_suffix(row), row);
  }
}

MarketPanel::MarketPanel(std::vector<MarketObservation> observations) : obs_(std::move(observations)) {
  for (const auto& o : obs_) validate(o);
  std::stable_sort(obs_.begin(), obs_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.region, a.period) < std::tie(b.region, b.period);
  });
  for (std::size_t i = 1; i < obs_.size(); ++i) {
    if (obs_[i].region == obs_[i - 1].region && obs_[i].period == obs_[i - 1].period) {
      throw ValidationError("duplicate key " + key_label(obs_[i].period, obs_[i].region));
    }
  }
}

std::vector<std::string> MarketPanel::regions() const {
  std::vector<std::string> out;
  for (const auto& o : obs_) {
    if (out.empty() || out.back() != o.region) out.push_back(o.region);
  }
  return out;
}

bool MarketPanel::has_region(const std::string& region) const {
  return std::any_of(obs_.begin(), obs_.end(), [&](const auto& o) { return o.region == region; });
}

const MarketObservation* MarketPanel::find(const Period& period, const std::string& region) const {
  const auto it = std::lower_bound(obs_.begin(), obs_.end(), std::tie(region, period),
                                   [](const MarketObservation& o, const auto& key) {
                                     return std::tie(o.region, o.period) < key;
                                   });
  if (it != obs_.end() && it->region == region && it->period == period) return &*it;
  return nullptr;
}

MarketPanel load_panel(std::istream& in, const PanelSchema& schema) {
  const auto table = csv::read(in, schema.delimiter);
  const auto period_col = table.require_column(schema.period_column);
  const auto region_col = table.column(schema.region_column);
  const auto e_col = table.require_column(schema.engagements_column);
  const auto f_col = table.require_column(schema.females_column);
  const auto m_col = table.require_column(schema.males_column);

  std::vector<MarketObservation> obs;
  obs.reserve(table.rows.size());
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& fields = table.rows[i];
    const auto row = table.row_numbers[i];
    MarketObservation o;
    try {
      o.period = Period::parse(fields[period_col]);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " at row " + std::to_string(row), row);
    }
    if (region_col) o.region = fields[*region_col];
    o.engagements = parse_count(fields[e_col], schema.engagements_column, row);
    o.females = parse_count(fields[f_col], schema.females_column, row);
    o.males = parse_count(fields[m_col], schema.males_column, row);
    validate(o, row);
    if (!seen.emplace(o.region, o.period.index()).second) {
      throw ValidationError("duplicate key " + key_label(o.period, o.region) + " at row " + std::to_string(row), row);
    }
    obs.push_back(std::move(o));
  }
  return MarketPanel(std::move(obs));
}

MarketPanel load_panel_file(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_panel(in, schema);
}

void write_panel(std::ostream& out, const MarketPanel& panel, const PanelSchema& schema) {
  const char d = schema.delimiter;
  const bool regional = std::any_of(panel.observations().begin(), panel.observations().end(),
                                    [](const auto& o) { return !o.region.empty(); });
  out << schema.period_column;
  if (regional) out << d << schema.region_column;
  out << d << schema.engagements_column << d << schema.females_column << d << schema.males_column << '\n';
  for (const auto& o : panel.observations()) {
    out << o.period.str();
    if (regional) out << d << o.region;
    out << d << o.engagements << d << o.females << d << o.males << '\n';
  }
}

std::vector<DerivedRow> derive_ratios(const MarketPanel& panel) {
  if (panel.empty()) throw ValidationError("derive_ratios: empty panel");
  std::vector<DerivedRow> out;
  out.reserve(panel.size());
  for (const auto& o : panel.observations()) {
    const auto e = static_cast<double>(o.engagements);
    const auto f = static_cast<double>(o.females);
    const auto m = static_cast<double>(o.males);
    out.push_back({o.period, o.region, f / m, e / f, e / m});
  }
  return out;
}

MarketPanel slice_region(const MarketPanel& panel, const std::string& region) {
  if (!panel.has_region(region)) throw ValidationError("unknown region '" + region + "'");
  std::vector<MarketObservation> rows;
  for (const auto& o : panel.observations()) {
    if (o.region == region) rows.push_back(o);
  }
  return MarketPanel(std::move(rows));
}

}  // namespace matchfn
