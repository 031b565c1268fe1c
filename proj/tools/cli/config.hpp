#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hardy/geometry.hpp"
#include "hardy/grid.hpp"

namespace hardy::cli {

// Flat key-value experiment configuration.
//
//   # comment
//   domain.dim = 4
//   domain.sigma_kind = point        # point | sphere
//   domain.k = 0
//   domain.r_sigma = 0.5
//   spectral.mu = 0.75
//   grid.h = 0.0625
//   grid.refine = 0
//   grid.symmetry = none             # none | axis | full
//   experiment.kind = spectral
//   experiment.<parameter> = ...
//
// Unknown keys, duplicate keys and experiment parameters that the kind does
// not use are rejected with ConfigurationError.
struct ExperimentConfig {
  std::map<std::string, std::string> entries;  // every key as given
  std::string kind;
  DomainSpec domain;
  double mu = 0.0;
  double h = 1.0 / 16;
  int refine = 0;
  std::string symmetry = "none";
  std::uint64_t seed = 1;

  // Typed access to experiment.<name>; the first form throws when absent.
  std::string str(const std::string& name) const;
  std::string str(const std::string& name, const std::string& fallback) const;
  double num(const std::string& name, double fallback) const;
  int integer(const std::string& name, int fallback) const;
  bool flag(const std::string& name, bool fallback) const;
  std::vector<double> list(const std::string& name, const std::vector<double>& fallback) const;
  bool has(const std::string& name) const;
  // Comma-separated coordinates; the dimension must match domain.dim.
  Point point(const std::string& name, const Point& fallback) const;
  // Semicolon-separated points.
  std::vector<Point> points(const std::string& name) const;

  // Grid spacing of refinement level l: h / 2^l.
  double level_h(int level) const;
  SymmetrySpec symmetry_spec() const;
};

// Experiment kinds accepted by the runner.
const std::vector<std::string>& experiment_kinds();

// Parses the text of a config file. `kind` (may be empty) is the subcommand;
// it must agree with experiment.kind when both are given.
ExperimentConfig parse_config(const std::string& text, const std::string& kind);
ExperimentConfig load_config(const std::string& path, const std::string& kind);

double parse_double(const std::string& key, const std::string& value);
Point parse_point(const std::string& key, const std::string& value, int dim);

}  // namespace hardy::cli
