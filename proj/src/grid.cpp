#include "hardy/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "hardy/errors.hpp"

namespace hardy {

SymmetrySpec SymmetrySpec::mirrors(int first, int last, int pb, int pe) {
  SymmetrySpec s;
  for (int a = first; a < last; ++a) s.mirror_mask |= (1u << a);
  s.perm_begin = pb;
  s.perm_end = pe;
  return s;
}

void SymmetrySpec::validate(const DomainSpec& dom) const {
  if (mirror_mask >> dom.dim) throw PreconditionError("mirror axis beyond the dimension");
  if (perm_end - perm_begin >= 2) {
    if (perm_begin < 0 || perm_end > dom.dim) throw PreconditionError("permutation block out of range");
    if (dom.sigma_kind == SigmaKind::kSphere) {
      const int split = dom.k + 1;
      const bool inside = perm_end <= split || perm_begin >= split;
      if (!inside) throw PreconditionError("permutation block mixes Sigma-plane and normal axes");
    }
    // Sorting is only a canonical form when the stored sign convention agrees
    // across the block.
    for (int a = perm_begin + 1; a < perm_end; ++a)
      if (mirrored(a) != mirrored(perm_begin))
        throw PreconditionError("permutation block needs uniform mirror flags");
  }
}

Point Grid::node(std::size_t i) const {
  Point p(dom_.dim);
  const std::int16_t* j = lattice(i);
  for (int a = 0; a < dom_.dim; ++a) p[a] = (j[a] + 0.5) * h_;
  return p;
}

int Grid::parity(std::size_t i) const {
  const std::int16_t* j = lattice(i);
  int s = 0;
  for (int a = 0; a < dom_.dim; ++a) s += j[a];
  return s & 1;
}

void Grid::canonicalize(int* j) const {
  for (int a = 0; a < dom_.dim; ++a)
    if (sym_.mirrored(a) && j[a] < 0) j[a] = -1 - j[a];
  if (sym_.perm_end - sym_.perm_begin >= 2) std::sort(j + sym_.perm_begin, j + sym_.perm_end);
}

std::uint64_t Grid::line_key(const int* j) const {
  std::uint64_t key = 0;
  for (int a = dom_.dim - 1; a >= 1; --a) key = (key << bits_) | static_cast<std::uint64_t>(j[a] + offset_);
  return key;
}

std::optional<std::size_t> Grid::find(const int* jin) const {
  int j[kMaxDim];
  std::copy(jin, jin + dom_.dim, j);
  canonicalize(j);
  for (int a = 1; a < dom_.dim; ++a)
    if (j[a] < -offset_ || j[a] >= offset_) return std::nullopt;
  const std::uint64_t key = line_key(j);
  const auto it = std::lower_bound(line_keys_.begin(), line_keys_.end(), key);
  if (it == line_keys_.end() || *it != key) return std::nullopt;
  const std::size_t l = static_cast<std::size_t>(it - line_keys_.begin());
  const int off = j[0] - line_j0_[l];
  if (off < 0 || off >= line_len_[l]) return std::nullopt;
  return line_start_[l] + static_cast<std::size_t>(off);
}

std::size_t Grid::nearest_node(const Point& xin) const {
  const int N = dom_.dim;
  Point x = xin;
  for (int a = 0; a < N; ++a)
    if (sym_.mirrored(a)) x[a] = std::abs(x[a]);
  if (sym_.perm_end - sym_.perm_begin >= 2)
    std::sort(x.x.begin() + sym_.perm_begin, x.x.begin() + sym_.perm_end);
  int j[kMaxDim];
  for (int a = 0; a < N; ++a) j[a] = static_cast<int>(std::floor(x[a] / h_));
  if (auto hit = find(j)) return *hit;
  // Cell center outside the ball: search the surrounding 3^N block.
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  bool found = false;
  int total = 1;
  for (int a = 0; a < N; ++a) total *= 3;
  for (int c = 0; c < total; ++c) {
    int jj[kMaxDim];
    int t = c;
    for (int a = 0; a < N; ++a) {
      jj[a] = j[a] + (t % 3) - 1;
      t /= 3;
    }
    if (auto hit = find(jj)) {
      const double dd = distance(node(*hit), x);
      if (dd < best) {
        best = dd;
        best_i = *hit;
        found = true;
      }
    }
  }
  if (!found) throw DomainError("nearest_node: point not within one cell of the grid");
  return best_i;
}

std::uint64_t Grid::hash() const {
  std::uint64_t hsh = 1469598103934665603ull;
  auto mix = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      hsh ^= b[i];
      hsh *= 1099511628211ull;
    }
  };
  mix(&dom_.dim, sizeof dom_.dim);
  mix(&dom_.k, sizeof dom_.k);
  mix(&dom_.r_sigma, sizeof dom_.r_sigma);
  mix(&dom_.ball_radius, sizeof dom_.ball_radius);
  mix(&h_, sizeof h_);
  mix(&sym_.mirror_mask, sizeof sym_.mirror_mask);
  mix(&sym_.perm_begin, sizeof sym_.perm_begin);
  mix(&sym_.perm_end, sizeof sym_.perm_end);
  mix(lat_.data(), lat_.size() * sizeof(std::int16_t));
  return hsh;
}

namespace {

double orbit_size(const int* j, const SymmetrySpec& sym) {
  double w = std::pow(2.0, std::popcount(sym.mirror_mask));
  const int len = sym.perm_end - sym.perm_begin;
  if (len >= 2) {
    double f = std::tgamma(len + 1.0);
    int run = 1;
    for (int a = sym.perm_begin + 1; a <= sym.perm_end; ++a) {
      if (a < sym.perm_end && j[a] == j[a - 1]) {
        ++run;
      } else {
        f /= std::tgamma(run + 1.0);
        run = 1;
      }
    }
    w *= std::round(f);
  }
  return w;
}

}  // namespace

Grid build_grid_unchecked(const DomainSpec& dom, double h, const SymmetrySpec& sym) {
  dom.validate();
  sym.validate(dom);
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigurationError("grid spacing must be positive");
  const int N = dom.dim;
  const double R = dom.ball_radius;
  const double R2 = R * R;
  Grid g;
  g.dom_ = dom;
  g.sym_ = sym;
  g.h_ = h;
  g.cell_volume_ = std::pow(h, N);
  const int M = static_cast<int>(std::ceil(R / h)) + 1;
  g.offset_ = M;
  g.bits_ = std::bit_width(static_cast<unsigned>(2 * M + 1));
  if (g.bits_ * (N - 1) > 64 || M > 30000) throw ConfigurationError("grid too fine for lattice key packing");

  int j[kMaxDim] = {};
  auto coord = [h](int jj) { return (jj + 0.5) * h; };

  // Depth-first over axes N-1 .. 1, emitting one line along axis 0 each time.
  auto emit_line = [&](double rest) {
    int lo = sym.mirrored(0) ? 0 : -M;
    int hi = M;
    if (sym.in_perm(0) && sym.in_perm(1)) hi = std::min(hi, j[1]);
    while (lo <= hi && coord(lo) * coord(lo) + rest >= R2) ++lo;
    while (hi >= lo && coord(hi) * coord(hi) + rest >= R2) --hi;
    if (lo > hi) return;
    g.line_keys_.push_back(g.line_key(j));
    g.line_j0_.push_back(lo);
    g.line_len_.push_back(hi - lo + 1);
    g.line_start_.push_back(g.dist_.size());
    for (int j0 = lo; j0 <= hi; ++j0) {
      j[0] = j0;
      for (int a = 0; a < N; ++a) g.lat_.push_back(static_cast<std::int16_t>(j[a]));
      Point p(N);
      for (int a = 0; a < N; ++a) p[a] = coord(j[a]);
      g.dist_.push_back(R - p.norm());
      g.dist_sigma_.push_back(dist_to_sigma(p, dom));
      const double w = orbit_size(j, sym);
      g.weight_.push_back(w);
      g.full_size_ += w;
    }
  };
  auto recurse = [&](auto&& self, int axis, double rest) -> void {
    if (axis == 0) {
      emit_line(rest);
      return;
    }
    int lo = sym.mirrored(axis) ? 0 : -M;
    int hi = M;
    if (sym.in_perm(axis) && sym.in_perm(axis + 1) && axis + 1 < N) hi = std::min(hi, j[axis + 1]);
    for (int v = lo; v <= hi; ++v) {
      const double c = coord(v);
      if (rest + c * c >= R2) continue;
      j[axis] = v;
      self(self, axis - 1, rest + c * c);
    }
  };
  recurse(recurse, N - 1, 0.0);

  // Enumeration order yields ascending keys; keep the lookup sorted regardless.
  if (!std::is_sorted(g.line_keys_.begin(), g.line_keys_.end()))
    throw NumericalError("grid line keys not sorted");
  return g;
}

Grid build_grid(const DomainSpec& dom, double h, const SymmetrySpec& sym) {
  if (!(h > 0.0 && h < dom.ball_radius / 8.0))
    throw ConfigurationError("grid spacing must satisfy 0 < h < R/8");
  Grid g = build_grid_unchecked(dom, h, sym);
  if (g.size() < 100) throw ConfigurationError("grid has fewer than 100 nodes");
  return g;
}

}  // namespace hardy
