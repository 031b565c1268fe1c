#include "record.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "hardy/errors.hpp"

namespace hardy::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw std::logic_error("csv row width mismatch");
  std::vector<std::string> r;
  for (auto& c : row) r.push_back(std::move(c.text));
  rows_.push_back(std::move(r));
}

std::string CsvTable::str() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void RunRecord::check(const std::string& name, bool pass, double value, double bound) {
  checks.push_back({name, pass, value, bound});
}

bool RunRecord::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v)); }

}  // namespace

nlohmann::json RunRecord::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["seed"] = seed;
  j["status"] = status;
  j["exit_code"] = exit_code;
  j["reason"] = reason;
  j["config"] = config;
  j["grid_hashes"] = grid_hashes;
  j["wall_time_s"] = wall_time_s;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"bound", number(c.bound)}});
  j["checks"] = cs;
  nlohmann::json ms = nlohmann::json::object();
  for (const auto& [k, v] : metrics) ms[k] = number(v);
  j["metrics"] = ms;
  j["artifacts"] = artifacts;
  return j;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigurationError("cannot create output directory " + dir_.string());
  lock_ = dir_ / ".lock";
  const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    lock_.clear();
    throw ConfigurationError("output directory is locked by another run: " + dir_.string());
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  (void)!::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputDir::~OutputDir() {
  if (!lock_.empty()) {
    std::error_code ec;
    std::filesystem::remove(lock_, ec);
  }
}

void OutputDir::write(const std::string& name, const std::string& content, RunRecord& rec) const {
  std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw NumericalError("cannot write " + (dir_ / name).string());
  rec.artifacts.push_back(name);
}

void OutputDir::append_record(RunRecord& rec) const {
  if (std::find(rec.artifacts.begin(), rec.artifacts.end(), "run.jsonl") == rec.artifacts.end())
    rec.artifacts.push_back("run.jsonl");
  std::ofstream out(dir_ / "run.jsonl", std::ios::app);
  out << rec.to_json().dump() << '\n';
}

}  // namespace hardy::cli
