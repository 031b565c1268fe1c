#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hardy/geometry.hpp"

namespace hardy {

// Optional reduction of the lattice by symmetries of the problem. Mirrored
// axes keep only x_a > 0; the axes of the permutation block keep only sorted
// lattice indices. Every stored node stands for its orbit; `weight` is the
// orbit size. Fields on a reduced grid are orbit-symmetric functions; a
// measure given on a reduced grid is read as its symmetrization.
struct SymmetrySpec {
  std::uint32_t mirror_mask = 0;
  int perm_begin = 0;
  int perm_end = 0;

  bool mirrored(int axis) const { return (mirror_mask >> axis) & 1u; }
  bool in_perm(int axis) const { return perm_end - perm_begin >= 2 && axis >= perm_begin && axis < perm_end; }
  bool trivial() const { return mirror_mask == 0 && perm_end - perm_begin < 2; }

  static SymmetrySpec none() { return {}; }
  // Mirrors on the axes in [first, last) and optionally permutations of the
  // axes in [pb, pe).
  static SymmetrySpec mirrors(int first, int last, int pb = 0, int pe = 0);
  // Throws PreconditionError if Sigma is not invariant.
  void validate(const DomainSpec& dom) const;
};

// Half-offset lattice: nodes at ((j_1 + 1/2) h, ..., (j_N + 1/2) h) strictly
// inside the ball. Nodes are grouped in lines along axis 0.
class Grid {
 public:
  Grid() = default;

  const DomainSpec& domain() const { return dom_; }
  const SymmetrySpec& symmetry() const { return sym_; }
  int dim() const { return dom_.dim; }
  double h() const { return h_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return dist_.size(); }
  // Number of nodes of the unreduced lattice.
  double full_size() const { return full_size_; }

  const std::int16_t* lattice(std::size_t i) const { return &lat_[i * dom_.dim]; }
  Point node(std::size_t i) const;
  double d(std::size_t i) const { return dist_[i]; }
  double d_sigma(std::size_t i) const { return dist_sigma_[i]; }
  double weight(std::size_t i) const { return weight_[i]; }
  const std::vector<double>& weights() const { return weight_; }
  // Cell mass of node i on the unreduced lattice: weight * h^N.
  double mass(std::size_t i) const { return weight_[i] * cell_volume_; }
  int parity(std::size_t i) const;

  // Lattice index to canonical representative (in place).
  void canonicalize(int* j) const;
  // Node index of the canonical representative of j, if that node exists.
  std::optional<std::size_t> find(const int* j) const;
  // Node whose cell contains x (after canonicalization), or the nearest
  // neighbouring node when that cell center lies outside the ball.
  std::size_t nearest_node(const Point& x) const;
  std::uint64_t hash() const;

  friend Grid build_grid_unchecked(const DomainSpec& dom, double h, const SymmetrySpec& sym);

 private:
  std::uint64_t line_key(const int* j) const;

  DomainSpec dom_;
  SymmetrySpec sym_;
  double h_ = 0.0;
  double cell_volume_ = 0.0;
  double full_size_ = 0.0;
  int offset_ = 0;
  int bits_ = 0;
  std::vector<std::int16_t> lat_;
  std::vector<double> dist_;
  std::vector<double> dist_sigma_;
  std::vector<double> weight_;
  std::vector<std::uint64_t> line_keys_;
  std::vector<std::int32_t> line_j0_;
  std::vector<std::int32_t> line_len_;
  std::vector<std::size_t> line_start_;
};

// Requires 0 < h < R/8 and at least 100 nodes (ConfigurationError otherwise).
Grid build_grid(const DomainSpec& dom, double h, const SymmetrySpec& sym = {});
// No size checks; used for multigrid coarse levels.
Grid build_grid_unchecked(const DomainSpec& dom, double h, const SymmetrySpec& sym);

}  // namespace hardy
