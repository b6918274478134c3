#pragma once

#include "matchfn/panel.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(MATCHFN_TEST_DATA) + "/" + name; }

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline matchfn::MarketObservation obs(int year, int month, std::int64_t e, std::int64_t f, std::int64_t m, std::string region = {}) {
  return {matchfn::Period::make(year, month), std::move(region), e, f, m};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("matchfn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Every observation's counts multiplied by k.
inline matchfn::MarketPanel scaled(const matchfn::MarketPanel& panel, std::int64_t k) {
  std::vector<matchfn::MarketObservation> rows(panel.observations().begin(), panel.observations().end());
  for (auto& o : rows) {
    o.engagements *= k;
    o.females *= k;
    o.males *= k;
  }
  return matchfn::MarketPanel(std::move(rows));
}

}  // namespace testing
