#pragma once

#include <string>

#include "config.hpp"
#include "record.hpp"

namespace hardy::cli {

// Runs the configured experiment at every refinement level, writes
// results.csv (and optional field dumps) and fills checks and metrics.
void run_experiment(const ExperimentConfig& cfg, const OutputDir& out, RunRecord& rec);

// Per-metric relative differences between two run records (last line of each
// run.jsonl). Throws ConfigurationError when the kinds differ. Returns the
// rendered table; `differences` receives the number of differing metrics.
std::string compare_records(const std::string& path_a, const std::string& path_b, int* differences);

}  // namespace hardy::cli
