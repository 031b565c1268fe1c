#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace hardy::cli {

// Numbers in CSV files carry 17 significant digits.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  // Cells are either numbers or plain strings without commas.
  struct Cell {
    Cell(double v) : text(format_number(v)) {}
    Cell(int v) : text(std::to_string(v)) {}
    Cell(std::size_t v) : text(std::to_string(v)) {}
    Cell(const char* s) : text(s) {}
    Cell(std::string s) : text(std::move(s)) {}
    std::string text;
  };
  void add(std::vector<Cell> row);
  std::string str() const;
  bool empty() const { return rows_.empty(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct RunRecord {
  nlohmann::json config = nlohmann::json::object();
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::string> grid_hashes;
  double wall_time_s = 0.0;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;
  std::map<std::string, double> metrics;
  std::string status = "error";  // pass | fail | error
  std::string reason;
  int exit_code = 2;

  void check(const std::string& name, bool pass, double value, double bound);
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Output directory held for one run via a lock file created exclusively.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);
  ~OutputDir();
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  const std::filesystem::path& path() const { return dir_; }
  // Writes `name` and lists it in the record.
  void write(const std::string& name, const std::string& content, RunRecord& rec) const;
  // Appends the record as one JSON line to run.jsonl.
  void append_record(RunRecord& rec) const;

 private:
  std::filesystem::path dir_;
  std::filesystem::path lock_;
};

}  // namespace hardy::cli
