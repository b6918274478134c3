#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace matchfn::cli {

enum class Format { Csv, Json };

/// Output table. Cells are JSON scalars: strings, numbers, booleans or null
/// (missing). Non-finite numbers are stored as null.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row);
};

nlohmann::json number(double value);

/// CSV starts with a "# run_hash: <hex>" line; JSON carries a run_hash field.
std::string render(const Table& table, Format format, const std::string& run_hash);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);
void ensure_directory(const std::filesystem::path& dir);

std::string extension(Format format);

}  // namespace matchfn::cli
