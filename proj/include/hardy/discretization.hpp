#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <vector>

#include "hardy/geometry.hpp"
#include "hardy/grid.hpp"
#include "hardy/linear_solver.hpp"
#include "hardy/sparse.hpp"
#include "hardy/spectral.hpp"

namespace hardy {

// One value per grid node. On a reduced grid node i carries the common value
// of its orbit.
struct Field {
  std::vector<double> values;
  bool diverged = false;
  bool warning = false;
  double indicator = 0.0;

  Field() = default;
  explicit Field(std::size_t n, double v = 0.0) : values(n, v) {}
  explicit Field(std::vector<double> v) : values(std::move(v)) {}
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct Atom {
  Point x;
  double weight = 1.0;
};

// tau = sum of interior atoms + density dx; nu = sum of boundary atoms on the
// outer sphere or on Sigma.
struct MeasureData {
  std::vector<Atom> interior;
  std::optional<std::vector<double>> density;
  std::vector<Atom> boundary;

  bool empty() const { return interior.empty() && boundary.empty() && !density; }
  // Checks carrier sets to tolerance tol (h/10 by convention) and signs.
  void validate(const DomainSpec& dom, double tol, bool require_positive) const;
};

// (-L_mu^h) on the reduced grid, scaled by orbit sizes so that it is
// symmetric: row i is weight_i times the unreduced stencil row. An exterior
// neighbour at distance theta h (theta in (0, 1]) contributes 1/(theta h^2) to
// the diagonal and no coupling, i.e. the zero boundary value is imposed at the
// true sphere.
CsrMatrix assemble_matrix(const Grid& grid, const SpectralParams& params);

enum class Preconditioning { kMultigrid, kJacobi };

struct OperatorOptions {
  Preconditioning preconditioning = Preconditioning::kMultigrid;
  Exec exec = Exec::kParallel;
  double rel_tol = 1e-10;
  int max_iter = 100000;
  std::size_t column_cache = 128;
};

class DiscreteOperator {
 public:
  DiscreteOperator(Grid grid, const SpectralParams& params, OperatorOptions opts = {});
  DiscreteOperator(const DiscreteOperator&) = delete;
  DiscreteOperator& operator=(const DiscreteOperator&) = delete;

  const Grid& grid() const { return grid_; }
  const SpectralParams& params() const { return params_; }
  const CsrMatrix& matrix() const { return A_; }
  const OperatorOptions& options() const { return opts_; }
  const Preconditioner& preconditioner() const { return *precond_; }

  // Solves (-L_mu^h) u = f with f given per node; u is the initial guess when
  // sized. abs_tol is an absolute floor on the residual norm.
  CgResult solve(const std::vector<double>& f, std::vector<double>& u, double abs_tol = 0.0) const;
  // Same, for a right-hand side already scaled by orbit sizes.
  CgResult solve_scaled(const std::vector<double>& b, std::vector<double>& u, double rel_tol,
                        double abs_tol) const;
  // y = (-L_mu^h) u.
  void apply(const std::vector<double>& u, std::vector<double>& y) const;
  // Green column of unit mass at `node` (cached).
  const std::vector<double>& column(std::size_t node) const;
  const std::vector<double>& inv_weights() const { return inv_w_; }

 private:
  Grid grid_;
  SpectralParams params_;
  OperatorOptions opts_;
  CsrMatrix A_;
  std::vector<double> inv_w_;
  std::unique_ptr<Preconditioner> precond_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::size_t, std::vector<double>> cache_;
};

struct EigenResult {
  double lambda = 0.0;
  Field phi;
  int iterations = 0;
  double residual = 0.0;  // ||A phi - lambda phi|| / ||phi||
  bool positive_definite = true;  // false: lambda_h <= 0, downstream runs refuse
};

struct EigenOptions {
  double tol = 1e-8;
  int max_iter = 10000;
};

// Smallest eigenpair by inverse iteration; phi > 0 with unit l2 norm on the
// unreduced lattice.
EigenResult principal_eigen(const DiscreteOperator& op, const EigenOptions& opts = {});

Field green_column(const DiscreteOperator& op, const Point& y);
Field green_apply(const DiscreteOperator& op, const MeasureData& tau);

struct MartinOptions {
  std::vector<double> depths_in_h = {8.0, 4.0, 2.0};
  // Approach direction off a point Sigma (unit e_1 when empty).
  std::optional<Point> direction;
};

// Reference node: maximizer of min(d, d_Sigma).
std::size_t martin_reference_node(const Grid& g);
// Green column at the point shifted inward from xi by `depth`, normalized to 1
// at the reference node. indicator = relative weighted-L1 change between the
// two smallest depths; warning when it exceeds 0.5.
Field martin_column(const DiscreteOperator& op, const Point& xi, const MartinOptions& opts = {});
// Approach point used by martin_column for a given depth.
Point martin_approach_point(const DomainSpec& dom, const Point& xi, double depth,
                            const std::optional<Point>& direction = std::nullopt);
Field martin_apply(const DiscreteOperator& op, const MeasureData& nu, const MartinOptions& opts = {});

// Weighted sums over the unreduced lattice.
double integrate(const Grid& g, const std::vector<double>& f);
double weighted_l1(const Grid& g, const std::vector<double>& f, const std::vector<double>* w = nullptr);

void write_field_csv(std::ostream& os, const Grid& g, const Field& f);
void write_operator_triplets(std::ostream& os, const DiscreteOperator& op);

}  // namespace hardy
