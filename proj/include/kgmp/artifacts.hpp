#pragma once
// Reproducible artifacts: JSON reports and CSV tables, each carrying the schema version and the
// resolved config. CSV preamble lines start with '#'.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgmp/common.hpp"
#include "kgmp/config.hpp"

namespace kgmp {

using Json = nlohmann::ordered_json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// ε as a file-name token, e.g. 0.05 → "0.05".
inline std::string epsilon_tag(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

class ArtifactWriter {
 public:
  ArtifactWriter(const ExperimentConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir) {}

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& written() const { return written_; }

  void write_json(const std::string& name, const Json& results) {
    Json doc;
    doc["schema_version"] = schema_version;
    doc["config"] = to_json(cfg_);
    doc["results"] = results;
    std::ofstream out = open(name);
    out << doc.dump(2) << '\n';
  }

  /// Header row, then one row per entry of `rows`, each formatted with 17 significant digits.
  void write_csv(const std::string& name, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open(name);
    out << "# schema_version=" << schema_version << '\n';
    out << "# config=" << to_json(cfg_).dump() << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
      out << '\n';
    }
  }

 private:
  std::ofstream open(const std::string& name) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write artifact " + path.string());
    written_.push_back(path.string());
    return out;
  }

  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

/// Reads a table written by ArtifactWriter (preamble lines skipped).
inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      have_header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace kgmp
