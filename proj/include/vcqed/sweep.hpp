#pragma once

// Parameter sweeps over one or two axes with a truncation convergence guard.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcqed/csv.hpp"
#include "vcqed/dynamics.hpp"
#include "vcqed/entanglement.hpp"
#include "vcqed/observables.hpp"

namespace vcqed {

struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 2;
  std::vector<double> explicit_values;  // overrides start/stop/steps when set

  std::vector<double> values() const {
    if (!explicit_values.empty()) return explicit_values;
    std::vector<double> v(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      v[k] = steps == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }
    if (steps > 1) v.back() = stop;
    return v;
  }
};

struct SweepOutputs {
  bool observables = true;
  bool correlations = false;
  bool spectra = false;
  bool witness = false;
};

struct SweepSpec {
  std::string name = "sweep";
  ModelParams base;
  std::vector<SweepAxis> axes;
  SweepOutputs outputs;
  std::vector<std::pair<int, int>> pairs{{1, 1}, {1, 2}};
  std::optional<TauGrid> tau;  // defaults to 20/(kappa+gamma), 2048 points
  double omega_max = 40.0;
  std::size_t omega_points = 801;
  double tol = 1e-9;
  bool guard = false;
  double convergence_threshold = 0.01;
  int max_fock = 12;
  double memory_budget_bytes = 2.0e9;
};

inline void validate(const SweepSpec& s) {
  validate(s.base);
  if (s.axes.empty() || s.axes.size() > 2) throw Error(ErrorKind::Config, "a sweep needs one or two axes");
  for (const auto& a : s.axes) {
    if (!is_settable_param(a.name)) throw Error(ErrorKind::Config, "unknown sweep parameter '" + a.name + "'");
    if (a.explicit_values.empty()) {
      if (!std::isfinite(a.start) || !std::isfinite(a.stop)) {
        throw Error(ErrorKind::Config, "sweep range for '" + a.name + "' is not finite");
      }
      if (a.steps < 2) throw Error(ErrorKind::Config, "sweep axis '" + a.name + "' needs at least 2 steps");
    } else {
      for (double v : a.explicit_values)
        if (!std::isfinite(v)) throw Error(ErrorKind::Config, "sweep value for '" + a.name + "' is not finite");
    }
  }
  for (const auto& [i, j] : s.pairs) {
    if ((i != 1 && i != 2) || (j != 1 && j != 2)) throw Error(ErrorKind::Config, "correlation pair must be in {1,2}^2");
  }
  if (!(s.tol > 0.0)) throw Error(ErrorKind::Config, "tolerance must be positive");
  if (!(s.convergence_threshold > 0.0)) throw Error(ErrorKind::Config, "convergence threshold must be positive");
}

inline nlohmann::ordered_json to_json(const SweepSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["base"] = to_json(s.base);
  j["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : s.axes) {
    nlohmann::ordered_json ax;
    ax["name"] = a.name;
    if (a.explicit_values.empty()) {
      ax["start"] = a.start;
      ax["stop"] = a.stop;
      ax["steps"] = a.steps;
    } else {
      ax["values"] = a.explicit_values;
    }
    j["axes"].push_back(ax);
  }
  j["outputs"] = {{"observables", s.outputs.observables},
                  {"correlations", s.outputs.correlations},
                  {"spectra", s.outputs.spectra},
                  {"witness", s.outputs.witness}};
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : s.pairs) j["pairs"].push_back({a, b});
  if (s.tau) j["tau"] = {{"t_max", s.tau->t_max}, {"n_points", s.tau->n_points}};
  j["omega"] = {{"max", s.omega_max}, {"points", s.omega_points}};
  j["tol"] = s.tol;
  j["guard"] = s.guard;
  j["convergence_threshold"] = s.convergence_threshold;
  j["max_fock"] = s.max_fock;
  return j;
}

/// Reads a sweep specification. Parameter keys may sit under "base" or at
/// the top level.
inline SweepSpec sweep_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "sweep specification must be a JSON object");
  SweepSpec s;
  static const std::vector<std::string> sweep_keys{"name",  "base", "axes",  "outputs", "pairs",
                                                   "tau",   "omega", "tol",  "guard",   "convergence_threshold",
                                                   "max_fock"};
  try {
    if (j.contains("base")) merge_json(s.base, j.at("base"));
    merge_json(s.base, j, sweep_keys);
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    if (j.contains("axes")) {
      for (const auto& a : j.at("axes")) {
        SweepAxis ax;
        ax.name = a.at("name").get<std::string>();
        if (a.contains("values")) {
          ax.explicit_values = a.at("values").get<std::vector<double>>();
        } else {
          ax.start = a.at("start").get<double>();
          ax.stop = a.at("stop").get<double>();
          ax.steps = a.at("steps").get<std::size_t>();
        }
        s.axes.push_back(ax);
      }
    }
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      s.outputs.observables = o.value("observables", true);
      s.outputs.correlations = o.value("correlations", false);
      s.outputs.spectra = o.value("spectra", false);
      s.outputs.witness = o.value("witness", false);
    }
    if (j.contains("pairs")) {
      s.pairs.clear();
      for (const auto& p : j.at("pairs")) s.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    }
    if (j.contains("tau")) s.tau = TauGrid{j.at("tau").at("t_max").get<double>(), j.at("tau").at("n_points").get<std::size_t>()};
    if (j.contains("omega")) {
      s.omega_max = j.at("omega").value("max", s.omega_max);
      s.omega_points = j.at("omega").value("points", s.omega_points);
    }
    s.tol = j.value("tol", s.tol);
    s.guard = j.value("guard", s.guard);
    s.convergence_threshold = j.value("convergence_threshold", s.convergence_threshold);
    s.max_fock = j.value("max_fock", s.max_fock);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed sweep specification: ") + e.what());
  }
  return s;
}

inline std::string spec_hash(const SweepSpec& s) { return hex64(fnv1a(to_json(s).dump())); }

struct SweepRow {
  std::vector<double> coords;
  ScanPoint point;
  std::optional<WitnessResult> witness;
  std::vector<CorrelationSeries> correlations;
  std::vector<Spectrum> spectra;
};

struct GuardReport {
  int recommended = 1;
  bool converged = false;
  struct Corner {
    ModelParams params;
    std::vector<double> n_total;  // n1 + n2 for fock = 1, 2, ...
    int recommended = 0;
  };
  std::vector<Corner> corners;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  std::optional<GuardReport> guard;
};

namespace detail {
inline ModelParams point_params(const SweepSpec& s, const std::vector<double>& coords) {
  ModelParams p = s.base;
  for (std::size_t k = 0; k < coords.size(); ++k) set_param(p, s.axes[k].name, coords[k]);
  return p;
}

inline std::vector<std::vector<double>> grid_coords(const SweepSpec& s) {
  std::vector<std::vector<double>> out;
  const auto v0 = s.axes[0].values();
  if (s.axes.size() == 1) {
    for (double x : v0) out.push_back({x});
    return out;
  }
  const auto v1 = s.axes[1].values();
  for (double x : v0)
    for (double y : v1) out.push_back({x, y});
  return out;
}

inline bool is_truncation_axis(const std::string& name) { return name.rfind("fock_states", 0) == 0; }

/// Rough peak memory of a solve at this truncation, dominated by the
/// Krylov basis of the iterative path or the explicit generator.
inline double solve_memory_estimate(const ModelParams& p, const GmresOptions& g) {
  const double d = 3.0 * p.fock_states_1 * p.fock_states_2;
  return (static_cast<double>(g.restart) + 8.0) * d * d * 16.0;
}
}  // namespace detail

/// Steps the truncation at every corner of the sweep until the mean photon
/// number of each mode changes by less than the threshold between F and F+1.
inline GuardReport convergence_guard(const SweepSpec& spec) {
  validate(spec);
  std::vector<std::vector<double>> corner_coords{{}};
  for (const auto& a : spec.axes) {
    if (detail::is_truncation_axis(a.name)) continue;
    const auto v = a.values();
    std::vector<std::vector<double>> next;
    for (const auto& c : corner_coords) {
      for (double e : {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())}) {
        auto cc = c;
        cc.push_back(e);
        next.push_back(cc);
      }
    }
    corner_coords = next;
  }
  GuardReport report;
  report.converged = true;
  SteadyOptions opt;
  opt.tol = spec.tol;
  for (const auto& cc : corner_coords) {
    ModelParams p = spec.base;
    std::size_t k = 0;
    for (const auto& a : spec.axes) {
      if (detail::is_truncation_axis(a.name)) continue;
      set_param(p, a.name, cc[k++]);
    }
    GuardReport::Corner corner;
    corner.params = p;
    std::vector<std::pair<double, double>> n;
    auto eval = [&](int f) {
      ModelParams q = p;
      q.fock_states_1 = q.fock_states_2 = f;
      if (detail::solve_memory_estimate(q, opt.gmres) > spec.memory_budget_bytes) {
        throw SolverError(ErrorKind::NonConvergence,
                          "truncation " + std::to_string(f) + " exceeds the memory budget before convergence", 0.0);
      }
      const ScanPoint pt = solve_point(q, opt);
      if (pt.status != PointStatus::ok) {
        throw SolverError(ErrorKind::NonConvergence, "guard solve failed at truncation " + std::to_string(f) + ": " +
                                                         pt.message, pt.residual);
      }
      n.emplace_back(pt.obs.n1, pt.obs.n2);
      corner.n_total.push_back(pt.obs.n_total());
    };
    auto close = [&](double a, double b) {
      if (a < 1e-12 && b < 1e-12) return true;
      return std::abs(b - a) < spec.convergence_threshold * std::max(a, 1e-300);
    };
    eval(1);
    int f = 1;
    for (;; ++f) {
      if (f + 1 > spec.max_fock) {
        throw SolverError(ErrorKind::NonConvergence,
                          "photon number not converged below " + std::to_string(spec.max_fock) + " Fock states", 0.0);
      }
      eval(f + 1);
      const auto& [a1, a2] = n[static_cast<std::size_t>(f - 1)];
      const auto& [b1, b2] = n[static_cast<std::size_t>(f)];
      if (close(a1, b1) && close(a2, b2)) break;
    }
    corner.recommended = f;
    report.recommended = std::max(report.recommended, f);
    report.corners.push_back(corner);
  }
  return report;
}

/// Evaluates every grid point. Rows follow the grid in row-major order (first
/// axis outermost) regardless of thread count.
inline SweepResult run_sweep(const SweepSpec& spec_in, unsigned threads = 1) {
  validate(spec_in);
  SweepResult result;
  result.spec = spec_in;
  SweepSpec& spec = result.spec;
  if (spec.guard) {
    result.guard = convergence_guard(spec);
    spec.base.fock_states_1 = spec.base.fock_states_2 = result.guard->recommended;
  }
  const auto coords = detail::grid_coords(spec);
  SteadyOptions opt;
  opt.tol = spec.tol;
  const std::vector<double> omega = default_omega_grid(spec.omega_max, spec.omega_points);
  result.rows = parallel_map<SweepRow>(coords.size(), threads, [&](std::size_t k) {
    SweepRow row;
    row.coords = coords[k];
    const ModelParams p = detail::point_params(spec, row.coords);
    validate(p);
    DenseMatrix rho;
    row.point = solve_point(p, opt, &rho);
    if (row.point.status != PointStatus::ok) return row;
    const HilbertSpace space(p.fock_states_1, p.fock_states_2);
    if (spec.outputs.witness) row.witness = witness(space, rho);
    if (spec.outputs.correlations || spec.outputs.spectra) {
      try {
        const Liouvillian l = build_liouvillian(p);
        const TauGrid grid = spec.tau.value_or(default_tau_grid(p));
        for (const auto& [i, j] : spec.pairs) {
          const double ni = i == 1 ? row.point.obs.n1 : row.point.obs.n2;
          const double nj = j == 1 ? row.point.obs.n1 : row.point.obs.n2;
          if (ni <= 1e-12 || nj <= 1e-12) continue;
          row.correlations.push_back(g2_correlation(l, rho, i, j, grid, correlation_decay_rate(p)));
          if (spec.outputs.spectra) row.spectra.push_back(hbt_spectrum(row.correlations.back(), omega));
        }
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        row.point.status = PointStatus::solver_failure;
        row.point.message = std::string("correlation: ") + e.what();
      }
    }
    return row;
  });
  return result;
}

inline nlohmann::ordered_json provenance(const SweepResult& r) {
  nlohmann::ordered_json j;
  j["spec_hash"] = spec_hash(r.spec);
  j["spec"] = to_json(r.spec);
  j["truncation"] = {{"fock_states_1", r.spec.base.fock_states_1}, {"fock_states_2", r.spec.base.fock_states_2}};
  j["tolerances"] = {{"steady_residual", r.spec.tol},
                     {"hermiticity", PhysicalityTolerance{}.hermiticity},
                     {"trace", PhysicalityTolerance{}.trace},
                     {"min_eigenvalue", PhysicalityTolerance{}.min_eigenvalue},
                     {"convergence_threshold", r.spec.convergence_threshold}};
  if (r.guard) {
    j["guard"] = {{"recommended", r.guard->recommended}, {"corners", r.guard->corners.size()}};
  }
  return j;
}

/// One row per grid point: axis values, status, observables, optional
/// witness, solver diagnostics.
inline CsvTable sweep_table(const SweepResult& r) {
  CsvTable t;
  t.file = r.spec.name + ".csv";
  t.add_meta("spec_hash", spec_hash(r.spec));
  t.add_meta("base_params", param_record(r.spec.base));
  for (const auto& a : r.spec.axes) t.columns.push_back(a.name);
  for (const char* c : {"status", "fock_states_1", "fock_states_2", "n1", "n2", "pa", "pb", "pc", "g2_11", "g2_22",
                        "g2_12"})
    t.columns.emplace_back(c);
  if (r.spec.outputs.witness) {
    t.columns.emplace_back("witness_min_eigenvalue");
    t.columns.emplace_back("entangled");
  }
  for (const char* c : {"residual", "method", "subspace_dim", "hermiticity_error", "trace_error", "min_eigenvalue",
                        "message"})
    t.columns.emplace_back(c);
  for (const auto& row : r.rows) {
    std::vector<std::string> cells;
    for (double c : row.coords) cells.push_back(format_number(c));
    const auto& pt = row.point;
    const auto& o = pt.obs;
    cells.push_back(to_string(pt.status));
    cells.push_back(format_number(pt.params.fock_states_1));
    cells.push_back(format_number(pt.params.fock_states_2));
    for (double v : {o.n1, o.n2, o.pa, o.pb, o.pc, o.g2_11, o.g2_22, o.g2_12}) cells.push_back(format_number(v));
    if (r.spec.outputs.witness) {
      cells.push_back(row.witness ? format_number(row.witness->min_eigenvalue) : "nan");
      cells.push_back(row.witness ? (row.witness->entangled ? "1" : "0") : "");
    }
    cells.push_back(format_number(pt.residual));
    cells.push_back(pt.method);
    cells.push_back(format_number(pt.subspace_dim));
    cells.push_back(format_number(pt.diagnostics.hermiticity_error));
    cells.push_back(format_number(pt.diagnostics.trace_error));
    cells.push_back(format_number(pt.diagnostics.min_eigenvalue));
    cells.push_back(pt.message);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

/// Long-format correlation series: one line per (point, pair, tau).
inline CsvTable correlation_table(const SweepResult& r) {
  CsvTable t;
  t.file = r.spec.name + "_g2.csv";
  t.add_meta("spec_hash", spec_hash(r.spec));
  t.add_meta("base_params", param_record(r.spec.base));
  t.columns = {"point", "i", "j", "tau", "g2"};
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    for (const auto& s : r.rows[k].correlations)
      for (std::size_t m = 0; m < s.tau.size(); ++m) t.add_row(k, s.i, s.j, s.tau[m], s.g2[m]);
  return t;
}

inline CsvTable spectrum_table(const SweepResult& r) {
  CsvTable t;
  t.file = r.spec.name + "_spectrum.csv";
  t.add_meta("spec_hash", spec_hash(r.spec));
  t.add_meta("base_params", param_record(r.spec.base));
  t.columns = {"point", "i", "j", "omega", "F"};
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto& row = r.rows[k];
    for (std::size_t q = 0; q < row.spectra.size(); ++q)
      for (std::size_t m = 0; m < row.spectra[q].omega.size(); ++m)
        t.add_row(k, row.correlations[q].i, row.correlations[q].j, row.spectra[q].omega[m], row.spectra[q].value[m]);
  }
  return t;
}

}  // namespace vcqed
