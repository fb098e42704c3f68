#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fhelm/grid.hpp"

namespace fhelm {

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal, locale independent.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> columns) : header(std::move(columns)) {}
  void add(std::vector<std::string> row);
};

// Header row, data rows, then "# config_hash=<hex>".
std::string render_csv(const CsvTable& table, const std::string& config_hash);
void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::string& config_hash);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

// Field snapshot: <base>.bin holds little-endian complex64 pairs in grid order
// (last axis fastest), <base>.json the grid metadata.
void write_snapshot(const std::filesystem::path& base, const ComplexField& field,
                    const std::string& name, const std::string& config_hash);
ComplexField read_snapshot(const std::filesystem::path& base);

}  // namespace fhelm
