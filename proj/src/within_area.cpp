#include "matchfn/csv.hpp"
#include "matchfn/error.hpp"
#include "matchfn/panel.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

namespace matchfn {

std::string ShareCell::period_label() const {
  if (month == 0) return std::to_string(year);
  return Period{year, month}.str();
}

std::vector<MatchRecord> load_match_records(std::istream& in, char delimiter) {
  const auto table = csv::read(in, delimiter);
  const auto period_col = table.require_column("ym");
  const auto female_col = table.require_column("female_region");
  const auto male_col = table.require_column("male_region");
  std::vector<MatchRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& fields = table.rows[i];
    const auto row = table.row_numbers[i];
    MatchRecord rec;
    try {
      rec.period = Period::parse(fields[period_col]);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " at row " + std::to_string(row), row);
    }
    rec.female_region = fields[female_col];
    rec.male_region = fields[male_col];
    if (rec.female_region.empty() || rec.male_region.empty()) {
      throw ValidationError("empty region label at row " + std::to_string(row), row);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ShareCell> within_area_share(std::span<const MatchRecord> records, const ShareOptions& options) {
  const auto known = [&](const std::string& label) {
    return options.vocabulary.empty() ||
           std::find(options.vocabulary.begin(), options.vocabulary.end(), label) != options.vocabulary.end();
  };

  // (year, month, region) -> (same, total)
  std::map<std::tuple<int, int, std::string>, std::pair<std::size_t, std::size_t>> cells;
  for (const auto& rec : records) {
    for (const auto* label : {&rec.female_region, &rec.male_region}) {
      if (!known(*label)) throw ValidationError("unknown region label '" + *label + "'");
    }
    const auto& own = options.side == ConditioningSide::Female ? rec.female_region : rec.male_region;
    const int month = options.granularity == Granularity::Month ? rec.period.month : 0;
    auto& [same, total] = cells[{rec.period.year, month, own}];
    ++total;
    if (rec.female_region == rec.male_region) ++same;
  }

  std::vector<ShareCell> out;
  out.reserve(cells.size());
  for (const auto& [key, counts] : cells) {
    const auto& [year, month, region] = key;
    out.push_back({year, month, region, counts.first, counts.second,
                   static_cast<double>(counts.first) / static_cast<double>(counts.second)});
  }
  return out;
}

std::map<std::string, std::string> load_region_groups(std::istream& in, char delimiter) {
  const auto table = csv::read(in, delimiter);
  const auto region_col = table.require_column("region");
  const auto group_col = table.require_column("group");
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& fields = table.rows[i];
    if (!out.emplace(fields[region_col], fields[group_col]).second) {
      throw ValidationError("region '" + fields[region_col] + "' listed twice at row " +
                                std::to_string(table.row_numbers[i]),
                            table.row_numbers[i]);
    }
  }
  return out;
}

}  // namespace matchfn
