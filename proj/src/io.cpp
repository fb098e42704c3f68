#include "fhelm/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fhelm/errors.hpp"

namespace fhelm {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw UsageError("csv row width differs from the header");
  rows.push_back(std::move(row));
}

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += escape(row[i]);
  }
  out += "\r\n";
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::out | std::ios::trunc | mode);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

}  // namespace

std::string render_csv(const CsvTable& table, const std::string& config_hash) {
  std::string out;
  append_row(out, table.header);
  for (const auto& r : table.rows) append_row(out, r);
  out += "# config_hash=" + config_hash + "\r\n";
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::string& config_hash) {
  write_text(path, render_csv(table, config_hash));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto f = open_out(path, std::ios::binary);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_snapshot(const std::filesystem::path& base, const ComplexField& field,
                    const std::string& name, const std::string& config_hash) {
  const Grid& g = field.grid();
  std::vector<unsigned char> bytes(field.size() * 8);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const float parts[2] = {static_cast<float>(field[i].real()), static_cast<float>(field[i].imag())};
    for (int k = 0; k < 2; ++k) {
      std::uint32_t w = std::bit_cast<std::uint32_t>(parts[k]);
      for (int b = 0; b < 4; ++b) bytes[8 * i + 4 * k + b] = static_cast<unsigned char>(w >> (8 * b));
    }
  }
  std::filesystem::path bin = base;
  bin += ".bin";
  auto f = open_out(bin, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));

  nlohmann::json meta = {{"name", name},
                         {"dtype", "complex64"},
                         {"byte_order", "little"},
                         {"layout", "row-major, last axis fastest"},
                         {"space", field.space() == Space::physical ? "physical" : "spectral"},
                         {"n", g.dim()},
                         {"points_per_axis", g.points_per_axis()},
                         {"box_length", g.box_length()},
                         {"file", bin.filename().string()},
                         {"config_hash", config_hash}};
  std::filesystem::path side = base;
  side += ".json";
  write_json(side, meta);
}

ComplexField read_snapshot(const std::filesystem::path& base) {
  std::filesystem::path side = base, bin = base;
  side += ".json";
  bin += ".bin";
  std::ifstream fs(side);
  if (!fs) throw ConfigError("cannot read " + side.string());
  nlohmann::json meta;
  try {
    fs >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("snapshot sidecar " + side.string() + ": " + e.what());
  }
  if (meta.value("dtype", "") != "complex64") throw ConfigError("snapshot dtype must be complex64");
  const Grid g(meta.at("n").get<int>(), meta.at("points_per_axis").get<int>(),
               meta.at("box_length").get<double>());
  const Space space = meta.value("space", "physical") == "spectral" ? Space::spectral : Space::physical;
  std::ifstream fb(bin, std::ios::binary);
  if (!fb) throw ConfigError("cannot read " + bin.string());
  std::vector<unsigned char> bytes(g.size() * 8);
  fb.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (fb.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw ConfigError("snapshot " + bin.string() + " is truncated");
  ComplexField f(g, space);
  for (std::size_t i = 0; i < g.size(); ++i) {
    float parts[2];
    for (int k = 0; k < 2; ++k) {
      std::uint32_t w = 0;
      for (int b = 0; b < 4; ++b) w |= static_cast<std::uint32_t>(bytes[8 * i + 4 * k + b]) << (8 * b);
      parts[k] = std::bit_cast<float>(w);
    }
    f[i] = cplx(parts[0], parts[1]);
  }
  return f;
}

}  // namespace fhelm
