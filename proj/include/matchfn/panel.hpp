#pragma once

#include "matchfn/period.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace matchfn {

/// One (period, region) cell of counts. An empty region is the national
/// aggregate.
struct MarketObservation {
  Period period;
  std::string region;
  std::int64_t engagements = 0;  // E
  std::int64_t females = 0;      // F
  std::int64_t males = 0;        // M

  bool operator==(const MarketObservation&) const = default;
};

/// Throws ValidationError unless F > 0, M > 0 and 0 <= E <= min(F, M).
void validate(const MarketObservation& obs, std::optional<std::size_t> row = std::nullopt);

/// Validated, immutable set of observations keyed by (period, region),
/// ordered by region and then period.
class MarketPanel {
public:
  MarketPanel() = default;
  /// Validates every row and rejects duplicate keys.
  explicit MarketPanel(std::vector<MarketObservation> observations);

  std::span<const MarketObservation> observations() const noexcept { return obs_; }
  std::size_t size() const noexcept { return obs_.size(); }
  bool empty() const noexcept { return obs_.empty(); }
  const MarketObservation& operator[](std::size_t i) const { return obs_[i]; }

  /// Distinct region labels in panel order.
  std::vector<std::string> regions() const;
  bool has_region(const std::string& region) const;
  const MarketObservation* find(const Period& period, const std::string& region) const;

  bool operator==(const MarketPanel&) const = default;

private:
  std::vector<MarketObservation> obs_;
};

struct PanelSchema {
  std::string period_column = "ym";
  std::string region_column = "region";  // optional in the input
  std::string engagements_column = "E";
  std::string females_column = "F";
  std::string males_column = "M";
  char delimiter = ',';
};

MarketPanel load_panel(std::istream& in, const PanelSchema& schema = {});
MarketPanel load_panel_file(const std::string& path, const PanelSchema& schema = {});
/// Writes the schema columns; the region column is omitted when every row is
/// national.
void write_panel(std::ostream& out, const MarketPanel& panel, const PanelSchema& schema = {});

struct DerivedRow {
  Period period;
  std::string region;
  double tightness = 0.0;     // F / M
  double female_rate = 0.0;   // E / F
  double male_rate = 0.0;     // E / M
};

std::vector<DerivedRow> derive_ratios(const MarketPanel& panel);

/// Rows of a single region, order preserved. Throws ValidationError for an
/// unknown label.
MarketPanel slice_region(const MarketPanel& panel, const std::string& region);

// ---------------------------------------------------------------------------
// Match records and within-area shares

struct MatchRecord {
  Period period;
  std::string female_region;
  std::string male_region;
};

std::vector<MatchRecord> load_match_records(std::istream& in, char delimiter = ',');

enum class Granularity { Month, Year };
enum class ConditioningSide { Female, Male };

struct ShareOptions {
  Granularity granularity = Granularity::Month;
  ConditioningSide side = ConditioningSide::Female;
  /// Declared region vocabulary. When empty, any label is accepted.
  std::vector<std::string> vocabulary;
};

struct ShareCell {
  int year = 0;
  int month = 0;  // 0 for yearly cells
  std::string region;
  std::size_t same_region = 0;
  std::size_t total = 0;
  double share = 0.0;

  std::string period_label() const;
};

/// Share of matches whose two parties live in the same region, conditioned
/// on the region of the chosen side. Cells with no records are absent.
/// Output is ordered by (period, region).
std::vector<ShareCell> within_area_share(std::span<const MatchRecord> records, const ShareOptions& options = {});

/// region -> group mapping read from a "region,group" table.
std::map<std::string, std::string> load_region_groups(std::istream& in, char delimiter = ',');

}  // namespace matchfn
