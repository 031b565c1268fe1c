#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "hardy/capacity.hpp"
#include "hardy/discretization.hpp"
#include "hardy/errors.hpp"
#include "hardy/norms.hpp"
#include "hardy/solver.hpp"
#include "hardy/spectral.hpp"

namespace hardy::cli {

namespace {

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string level_key(const std::string& name, int level) { return fmt::format("{}_L{}", name, level); }

Point unit_e1(int dim) {
  Point p(dim);
  p[0] = 1.0;
  return p;
}

Point on_axis(int dim, double t) {
  Point p(dim);
  p[0] = t;
  return p;
}

// True when x is fixed by every mirror and permutation of the grid symmetry.
bool invariant(const SymmetrySpec& sym, const Point& x) {
  for (int a = 0; a < x.n; ++a)
    if (sym.mirrored(a) && x[a] != 0.0) return false;
  if (sym.perm_end - sym.perm_begin >= 2)
    for (int a = sym.perm_begin + 1; a < sym.perm_end; ++a)
      if (x[a] != x[sym.perm_begin]) return false;
  return true;
}

void require_invariant(const SymmetrySpec& sym, const Point& x, const std::string& what) {
  if (!invariant(sym, x)) throw ConfigurationError(what + " is not invariant under grid.symmetry");
}

Grid make_grid(const ExperimentConfig& cfg, int level) {
  return build_grid(cfg.domain, cfg.level_h(level), cfg.symmetry_spec());
}

std::vector<double> phi_weights(const Grid& g, const SpectralParams& sp, double gamma) {
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = phi_surrogate(g.node(i), sp, g.domain(), gamma);
  return w;
}

Point default_sigma_point(const DomainSpec& dom) {
  return dom.sigma_kind == SigmaKind::kPoint ? Point(dom.dim) : on_axis(dom.dim, dom.r_sigma);
}

Point default_interior_atom(const DomainSpec& dom) {
  // Midway between Sigma and the boundary along e_1.
  const double t = dom.sigma_kind == SigmaKind::kPoint ? 0.5 * dom.ball_radius
                                                       : 0.5 * (dom.r_sigma + dom.ball_radius);
  return on_axis(dom.dim, t);
}

struct Context {
  const ExperimentConfig& cfg;
  const OutputDir& out;
  RunRecord& rec;
  SpectralParams sp;
};

// ---------------------------------------------------------------------------

void run_spectral(Context& c) {
  CsvTable t({"level", "h", "nodes", "N", "k", "mu", "H", "alpha_minus", "alpha_plus", "lambda_h", "iterations",
              "residual"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    c.rec.grid_hashes.push_back(hex(op.grid().hash()));
    const EigenResult e = principal_eigen(op);
    t.add({l, op.grid().h(), op.grid().size(), c.sp.N, c.sp.k, c.sp.mu, c.sp.H, c.sp.alpha_minus, c.sp.alpha_plus,
           e.lambda, e.iterations, e.residual});
    c.rec.metrics[level_key("lambda_h", l)] = e.lambda;
    c.rec.check(level_key("lambda_positive", l), e.positive_definite && e.lambda > 0.0, e.lambda, 0.0);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

void run_green_check(Context& c) {
  if (c.cfg.symmetry != "none") throw ConfigurationError("green-check samples atoms and needs grid.symmetry = none");
  const int n_points = c.cfg.integer("points", 4);
  const double max_spread = c.cfg.num("max_spread", 100.0);
  if (n_points < 1) throw ConfigurationError("experiment.points must be positive");
  const auto ys = sample_interior(c.cfg.domain, n_points, 0.1, 0.1, c.cfg.seed);
  CsvTable t({"level", "h", "atom", "y", "pairs", "ratio_min", "ratio_max"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    const Grid& g = op.grid();
    const double h = g.h();
    c.rec.grid_hashes.push_back(hex(g.hash()));
    double lo_all = 1e300, hi_all = 0.0;
    for (std::size_t a = 0; a < ys.size(); ++a) {
      const Point y = g.node(g.nearest_node(ys[a]));
      const Field col = green_column(op, y);
      double lo = 1e300, hi = 0.0;
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.node(i);
        if (distance(x, y) <= 4 * h || g.d(i) <= 4 * h || g.d_sigma(i) <= 4 * h) continue;
        const double r = col[i] / green_estimate(x, y, c.sp, c.cfg.domain).value;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++pairs;
      }
      std::string ystr;
      for (int d = 0; d < y.n; ++d) ystr += (d ? " " : "") + format_number(y[d]);
      t.add({l, h, a, ystr, pairs, lo, hi});
      lo_all = std::min(lo_all, lo);
      hi_all = std::max(hi_all, hi);
    }
    c.rec.metrics[level_key("ratio_min", l)] = lo_all;
    c.rec.metrics[level_key("ratio_max", l)] = hi_all;
    c.rec.check(level_key("ratio_spread", l), hi_all / lo_all <= max_spread, hi_all / lo_all, max_spread);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

void run_martin_check(Context& c) {
  const Point xi = c.cfg.point("xi", default_sigma_point(c.cfg.domain));
  require_invariant(c.cfg.symmetry_spec(), xi, "experiment.xi");
  const double max_spread = c.cfg.num("max_spread", 100.0);
  CsvTable t({"level", "h", "ratio_min", "ratio_max", "indicator", "warning"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    const Grid& g = op.grid();
    const double h = g.h();
    c.rec.grid_hashes.push_back(hex(g.hash()));
    const Field k = martin_column(op, xi);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.node(i);
      if (g.d(i) <= 4 * h || g.d_sigma(i) <= 4 * h || distance(x, xi) <= 4 * h) continue;
      const double r = k[i] / martin_estimate(x, xi, c.sp, c.cfg.domain).value;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    t.add({l, h, lo, hi, k.indicator, k.warning ? "true" : "false"});
    c.rec.metrics[level_key("ratio_min", l)] = lo;
    c.rec.metrics[level_key("ratio_max", l)] = hi;
    c.rec.metrics[level_key("indicator", l)] = k.indicator;
    c.rec.check(level_key("ratio_spread", l), hi / lo <= max_spread, hi / lo, max_spread);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

void run_weaknorm(Context& c) {
  const Point y = c.cfg.point("atom", default_interior_atom(c.cfg.domain));
  require_invariant(c.cfg.symmetry_spec(), y, "experiment.atom");
  const double gamma = c.cfg.num("gamma", 1.0);
  ExponentTable table;
  table.params = c.sp;
  const double kappa = c.cfg.num("kappa", table.q_source(gamma));
  CsvTable t({"level", "h", "kappa", "star", "weak", "log_weak", "attaining_threshold"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    c.rec.grid_hashes.push_back(hex(op.grid().hash()));
    const Field col = green_column(op, y);
    const auto w = phi_weights(op.grid(), c.sp, gamma);
    const WeakNormReport r = weak_norm_report(WeightedField::on_grid(op.grid(), col.values, &w), kappa);
    t.add({l, op.grid().h(), kappa, r.star, r.weak, r.log_weak, r.attaining_threshold});
    c.rec.metrics[level_key("weak", l)] = r.weak;
    c.rec.metrics[level_key("star", l)] = r.star;
    const double upper = kappa / (kappa - 1) * r.star;
    c.rec.check(level_key("sandwich", l), r.star <= r.weak * (1 + 1e-12) && r.weak <= upper * (1 + 1e-12), r.weak,
                upper);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

void run_iterate(Context& c) {
  const double p = c.cfg.num("p", 1.5);
  const double rho = c.cfg.num("rho", 1e-3);
  const double sigma = c.cfg.num("sigma", 0.0);
  const bool dump = c.cfg.flag("dump_fields", false);
  const SymmetrySpec sym = c.cfg.symmetry_spec();
  MeasureData tau, nu;
  if (rho != 0.0) {
    const Point y = c.cfg.point("atom", default_interior_atom(c.cfg.domain));
    require_invariant(sym, y, "experiment.atom");
    tau.interior.push_back({y, 1.0});
  }
  if (sigma != 0.0) {
    const Point z = c.cfg.point("nu_atom", default_sigma_point(c.cfg.domain));
    require_invariant(sym, z, "experiment.nu_atom");
    nu.boundary.push_back({z, 1.0});
  }
  CsvTable t({"level", "h", "step", "l1_norm", "sup_change"});
  CsvTable s({"level", "h", "status", "iterations", "monotone", "fixed_point_residual"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    c.rec.grid_hashes.push_back(hex(op.grid().hash()));
    tau.validate(c.cfg.domain, op.grid().h() / 10, true);
    nu.validate(c.cfg.domain, op.grid().h() / 10, true);
    const IterationTrace tr = picard_general(op, Nonlinearity::positive_power_of(p), tau, nu, rho, sigma);
    for (std::size_t k = 0; k < tr.l1_norm.size(); ++k)
      t.add({l, op.grid().h(), k + 1, tr.l1_norm[k], tr.sup_change[k]});
    s.add({l, op.grid().h(), status_name(tr.status), tr.iterations, tr.monotone ? "true" : "false",
           tr.fixed_point_residual});
    c.rec.metrics[level_key("final_l1", l)] = tr.l1_norm.empty() ? 0.0 : tr.l1_norm.back();
    c.rec.metrics[level_key("iterations", l)] = tr.iterations;
    c.rec.check(level_key("converged", l), tr.status == IterationStatus::kConverged, tr.iterations, 0.0);
    if (tr.status == IterationStatus::kConverged)
      c.rec.check(level_key("fixed_point_residual", l), tr.fixed_point_residual <= 1e-8, tr.fixed_point_residual,
                  1e-8);
    if (dump) {
      std::ostringstream os;
      write_field_csv(os, op.grid(), tr.solution);
      c.out.write(fmt::format("field_solution_L{}.csv", l), os.str(), c.rec);
    }
  }
  c.out.write("results.csv", t.str(), c.rec);
  c.out.write("summary.csv", s.str(), c.rec);
}

void run_sweep(Context& c) {
  const std::string data = c.cfg.str("data", "tau-interior");
  DataKind kind;
  Point atom;
  if (data == "tau-interior") {
    kind = DataKind::kTauInterior;
    atom = default_interior_atom(c.cfg.domain);
  } else if (data == "nu-sigma") {
    kind = DataKind::kNuSigma;
    atom = default_sigma_point(c.cfg.domain);
  } else if (data == "nu-boundary") {
    kind = DataKind::kNuBoundary;
    atom = unit_e1(c.cfg.domain.dim);
  } else {
    throw ConfigurationError("experiment.data must be tau-interior, nu-sigma or nu-boundary");
  }
  atom = c.cfg.point("atom", atom);
  require_invariant(c.cfg.symmetry_spec(), atom, "experiment.atom");
  const auto p_list = c.cfg.list("p_list", {1.5, 2.0, 3.0});
  const auto couplings = c.cfg.list("couplings", {1e-3, 1e-2, 1e-1, 1.0});
  if (!std::is_sorted(p_list.begin(), p_list.end()) || !std::is_sorted(couplings.begin(), couplings.end()))
    throw ConfigurationError("experiment.p_list and experiment.couplings must be ascending");
  SweepOptions so;
  if (kind == DataKind::kTauInterior)
    so.data.interior.push_back({atom, 1.0});
  else
    so.data.boundary.push_back({atom, 1.0});
  so.bisect_steps = c.cfg.integer("bisect", 0);
  so.picard.rel_tol = c.cfg.num("rel_tol", so.picard.rel_tol);
  so.picard.compute_residual = false;
  CsvTable cells({"level", "h", "p", "coupling", "status", "iterations", "final_l1"});
  CsvTable thr({"level", "h", "p", "threshold"});
  std::vector<std::vector<double>> thresholds;
  std::vector<double> hs;
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const DiscreteOperator op(make_grid(c.cfg, l), c.sp);
    c.rec.grid_hashes.push_back(hex(op.grid().hash()));
    const SweepResult r = threshold_sweep(op, kind, p_list, couplings, so);
    for (const SweepCell& cell : r.cells)
      cells.add({l, op.grid().h(), cell.p, cell.coupling, status_name(cell.status), cell.iterations, cell.final_l1});
    for (std::size_t i = 0; i < p_list.size(); ++i) {
      thr.add({l, op.grid().h(), p_list[i], r.threshold[i]});
      c.rec.metrics[fmt::format("threshold_p{}_L{}", format_number(p_list[i]), l)] = r.threshold[i];
    }
    c.rec.check(level_key("downward_closed", l), r.downward_closed, r.downward_closed ? 1.0 : 0.0, 1.0);
    if (r.critical_p) c.rec.metrics[level_key("critical_p", l)] = *r.critical_p;
    thresholds.push_back(r.threshold);
    hs.push_back(op.grid().h());
  }
  if (hs.size() >= 2) {
    const RefinementCollapse rc = threshold_collapse(p_list, hs, thresholds, c.cfg.num("collapse_tol", 0.25), true);
    CsvTable col({"p", "decay_exponent", "collapsed"});
    for (std::size_t i = 0; i < p_list.size(); ++i)
      col.add({p_list[i], rc.decay_exponent[i], rc.collapsed[i] ? "true" : "false"});
    c.out.write("collapse.csv", col.str(), c.rec);
    if (rc.critical_p) c.rec.metrics["collapse_critical_p"] = *rc.critical_p;
  }
  c.out.write("results.csv", cells.str(), c.rec);
  c.out.write("thresholds.csv", thr.str(), c.rec);
}

void run_capacity(Context& c) {
  CapacityParams cp;
  cp.alpha = c.cfg.num("alpha", cp.alpha);
  cp.s = c.cfg.num("s", cp.s);
  cp.b = c.cfg.num("b", cp.b);
  cp.theta = c.cfg.num("theta", cp.theta);
  std::vector<Point> targets = c.cfg.points("targets");
  if (targets.empty())
    targets = sample_interior(c.cfg.domain, static_cast<std::size_t>(c.cfg.integer("points", 1)), 0.2, 0.2,
                              c.cfg.seed);
  CsvTable t({"level", "h", "targets", "bound", "dual_norm", "refined_dual_norm", "divergent", "rounds"});
  CsvTable cert({"level", "atom", "weight", "x"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    CapacityOptions opts;
    opts.h = c.cfg.level_h(l);
    const CapacityEstimate e = cap_lower_bound(c.cfg.domain, targets, cp, opts);
    t.add({l, opts.h, targets.size(), e.bound, e.dual_norm, e.refined_dual_norm, e.divergent ? "true" : "false",
           e.rounds});
    for (std::size_t a = 0; a < e.certificate.size(); ++a) {
      std::string x;
      for (int d = 0; d < e.certificate[a].x.n; ++d) x += (d ? " " : "") + format_number(e.certificate[a].x[d]);
      cert.add({l, a, e.certificate[a].weight, x});
    }
    c.rec.metrics[level_key("bound", l)] = e.bound;
    c.rec.check(level_key("dual_constraint", l), e.dual_norm <= 1.0 + 1e-9, e.dual_norm, 1.0 + 1e-9);
    if (!e.divergent && e.refined_dual_norm > 0.0)
      c.rec.check(level_key("refined_dual_norm", l), std::abs(e.refined_dual_norm - e.dual_norm) < 0.1 * e.dual_norm,
                  e.refined_dual_norm, 1.1 * e.dual_norm);
  }
  c.out.write("results.csv", t.str(), c.rec);
  c.out.write("certificate.csv", cert.str(), c.rec);
}

void run_bvivier(Context& c) {
  if (c.cfg.symmetry != "none") throw ConfigurationError("bvivier samples atoms and needs grid.symmetry = none");
  ExponentTable table;
  table.params = c.sp;
  // green-estimate: the two-sided Green estimate with eta = phi.
  // aux-f: the auxiliary F kernel with eta = d, whose weak exponent is 2.
  const std::string which = c.cfg.str("kernel", "green-estimate");
  if (which != "aux-f" && which != "green-estimate")
    throw ConfigurationError("experiment.kernel must be aux-f or green-estimate");
  const bool aux = which == "aux-f";
  const double kappa = c.cfg.num("kappa", aux ? 2.0 : table.q_source(1.0));
  const int n_points = c.cfg.integer("points", 3);
  if (n_points < 1) throw ConfigurationError("experiment.points must be positive");
  const auto pts = sample_interior(c.cfg.domain, n_points, 0.3, 0.3, c.cfg.seed);
  // Atoms stay deep enough that the top of the sampled lambda ladder is in
  // the asymptotic regime; near the boundary the local slope transiently
  // drops below kappa.
  std::vector<Atom> omega;
  for (const Point& y : pts) omega.push_back({y, 1.0 / n_points});
  BvivierOptions bo;
  bo.seed = c.cfg.seed;
  bo.samples = static_cast<std::size_t>(c.cfg.integer("samples", 100000));
  const SpectralParams sp = c.sp;
  const DomainSpec dom = c.cfg.domain;
  KernelFn kernel;
  WeightFn eta;
  if (aux) {
    kernel = [dom](const Point& x, const Point& y) { return aux_kernel(x, y, AuxKind::kF, {}, dom).value; };
    eta = [dom](const Point& x) { return dist_to_boundary(x, dom); };
  } else {
    kernel = [sp, dom](const Point& x, const Point& y) { return green_estimate(x, y, sp, dom).value; };
    eta = [sp, dom](const Point& x) { return phi_surrogate(x, sp, dom, 1.0); };
  }
  CsvTable t({"level", "h", "kernel", "kappa", "C", "decay_slope", "norm", "bound", "fit_ok", "pass"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const Grid g = make_grid(c.cfg, l);
    c.rec.grid_hashes.push_back(hex(g.hash()));
    const BvivierResult r = bvivier_check(g, kernel, eta, omega, kappa, bo);
    t.add({l, g.h(), which, kappa, r.C, r.decay_slope, r.norm, r.bound, r.fit_ok ? "true" : "false",
           r.pass ? "true" : "false"});
    c.rec.metrics[level_key("norm", l)] = r.norm;
    c.rec.metrics[level_key("C", l)] = r.C;
    c.rec.check(level_key("weak_bound", l), r.pass, r.norm, r.bound);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

void run_boundary_concentration(Context& c) {
  const double p = c.cfg.num("p", 2.5);
  const auto depths = c.cfg.list("depths", {0.25, 0.125, 0.0625});
  const Point y_star = c.cfg.point("y_star", unit_e1(c.cfg.domain.dim));
  require_invariant(c.cfg.symmetry_spec(), y_star, "experiment.y_star");
  const int N = c.cfg.domain.dim;
  const double crit = (N + 1.0) / (N - 1.0);
  CsvTable t({"level", "h", "p", "depth", "integral", "growth"});
  for (int l = 0; l <= c.cfg.refine; ++l) {
    const Grid g = make_grid(c.cfg, l);
    c.rec.grid_hashes.push_back(hex(g.hash()));
    const ConcentrationReport r = boundary_concentration_experiment(g, c.sp, p, y_star, depths);
    double peak = 0.0;
    for (const ConcentrationRow& row : r.rows) {
      t.add({l, g.h(), p, row.depth, row.integral, row.growth});
      peak = std::max(peak, row.integral / r.rows.front().integral);
    }
    c.rec.metrics[level_key("min_growth", l)] = r.min_growth;
    c.rec.metrics[level_key("max_growth", l)] = r.max_growth;
    if (p >= crit)
      c.rec.check(level_key("unbounded", l), r.min_growth >= 1.5, r.min_growth, 1.5);
    else
      c.rec.check(level_key("bounded", l), peak <= 1.2, peak, 1.2);
  }
  c.out.write("results.csv", t.str(), c.rec);
}

// ---------------------------------------------------------------------------

nlohmann::json read_last_record(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::is_directory(p)) p /= "run.jsonl";
  std::ifstream in(p);
  if (!in) throw ConfigurationError("cannot read run record " + p.string());
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) throw ConfigurationError("empty run record " + p.string());
  try {
    return nlohmann::json::parse(last);
  } catch (const nlohmann::json::exception&) {
    throw ConfigurationError("malformed run record " + p.string());
  }
}

double metric_value(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  const std::string s = v.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const OutputDir& out, RunRecord& rec) {
  Context c{cfg, out, rec, exponents(cfg.mu, cfg.domain.dim, cfg.domain.k)};
  cfg.symmetry_spec().validate(cfg.domain);
  if (cfg.kind == "spectral") return run_spectral(c);
  if (cfg.kind == "green-check") return run_green_check(c);
  if (cfg.kind == "martin-check") return run_martin_check(c);
  if (cfg.kind == "weaknorm") return run_weaknorm(c);
  if (cfg.kind == "iterate") return run_iterate(c);
  if (cfg.kind == "sweep") return run_sweep(c);
  if (cfg.kind == "capacity") return run_capacity(c);
  if (cfg.kind == "bvivier") return run_bvivier(c);
  if (cfg.kind == "boundary-concentration") return run_boundary_concentration(c);
  throw ConfigurationError("unknown experiment kind " + cfg.kind);
}

std::string compare_records(const std::string& path_a, const std::string& path_b, int* differences) {
  const nlohmann::json a = read_last_record(path_a);
  const nlohmann::json b = read_last_record(path_b);
  if (a.value("kind", "") != b.value("kind", ""))
    throw ConfigurationError("cannot compare kinds " + a.value("kind", "") + " and " + b.value("kind", ""));
  std::map<std::string, std::pair<double, double>> rows;
  for (const auto& [k, v] : a["metrics"].items()) rows[k].first = metric_value(v);
  for (const auto& [k, v] : b["metrics"].items()) rows[k].second = metric_value(v);
  const auto present = [](const nlohmann::json& r, const std::string& k) { return r["metrics"].contains(k); };
  std::string out = "metric,a,b,relative_difference\n";
  int n = 0;
  for (const auto& [k, ab] : rows) {
    if (!present(a, k) || !present(b, k)) {
      out += fmt::format("{},{},{},missing\n", k, present(a, k) ? format_number(ab.first) : "",
                         present(b, k) ? format_number(ab.second) : "");
      ++n;
      continue;
    }
    if (ab.first == ab.second || (std::isnan(ab.first) && std::isnan(ab.second))) continue;
    const double scale = std::max(std::abs(ab.first), std::abs(ab.second));
    out += fmt::format("{},{},{},{}\n", k, format_number(ab.first), format_number(ab.second),
                       format_number(std::abs(ab.second - ab.first) / scale));
    ++n;
  }
  if (differences) *differences = n;
  return out;
}

}  // namespace hardy::cli
