// Command-line driver for the V-type bimodal cavity simulator.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcqed/vcqed.hpp"

namespace fs = std::filesystem;
using namespace vcqed;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kSolverFailure = 3,
  kSelftestFailure = 4,
};

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::InvalidTruncation:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::InvalidIndex:
    case ErrorKind::UnknownFigure:
    case ErrorKind::InsufficientWindow:
    case ErrorKind::UndefinedCorrelation:
      return kConfigError;
    default:
      return kSolverFailure;
  }
}

struct Common {
  std::string config;
  std::string out = ".";
  std::vector<std::string> sets;
  int fock = 0;
  double tol = 1e-9;
  unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--set", c.sets, "parameter override key=value (repeatable)");
  app->add_option("--fock", c.fock, "Fock states per mode")->check(CLI::PositiveNumber);
  app->add_option("--tol", c.tol, "steady-state residual tolerance")->check(CLI::PositiveNumber);
  app->add_option("--threads", c.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

nlohmann::json load_config(const Common& c) {
  if (c.config.empty()) return nlohmann::json::object();
  return read_json_file(c.config);
}

ModelParams resolve_params(const Common& c, const nlohmann::json& cfg, const std::vector<std::string>& extra_keys) {
  ModelParams p;
  if (cfg.contains("base")) merge_json(p, cfg.at("base"));
  std::vector<std::string> ignored = extra_keys;
  for (const char* k : {"name", "base", "axes", "outputs", "pairs", "tau", "omega", "tol", "guard",
                        "convergence_threshold", "max_fock"})
    ignored.emplace_back(k);
  merge_json(p, cfg, ignored);
  for (const auto& s : c.sets) apply_override(p, s);
  if (c.fock > 0) p.fock_states_1 = p.fock_states_2 = c.fock;
  validate(p);
  return p;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::ordered_json solve_diagnostics(const ModelParams& p, const SteadyStateResult& r, double seconds) {
  nlohmann::ordered_json j;
  j["engine"] = kEngineName;
  j["engine_version"] = kEngineVersion;
  j["params"] = to_json(p);
  j["hilbert_dim"] = 3 * p.fock_states_1 * p.fock_states_2;
  j["solver"] = to_json(r);
  j["physical"] = r.diagnostics.physical();
  j["wall_seconds"] = seconds;
  return j;
}

struct Solved {
  ModelParams params;
  Liouvillian l;
  SteadyStateResult ss;
};

Solved solve_and_record(const Common& c, const ModelParams& p, const std::string& tag) {
  const auto t0 = std::chrono::steady_clock::now();
  Liouvillian l = build_liouvillian(p);
  SteadyOptions so;
  so.tol = c.tol;
  SteadyStateResult ss = steady_state(l, so);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(fs::path(c.out) / (tag + "_diagnostics.json"), solve_diagnostics(p, ss, secs));
  return {p, std::move(l), std::move(ss)};
}

int cmd_solve(const Common& c) {
  const ModelParams p = resolve_params(c, load_config(c), {});
  const Solved s = solve_and_record(c, p, "solve");
  const ObservableRecord o = compute_observables(s.l.space(), s.ss.rho);

  CsvTable t;
  t.file = "solve.csv";
  t.add_meta("params", param_record(p));
  t.columns = {"n1", "n2", "pa", "pb", "pc", "g2_11", "g2_22", "g2_12", "residual", "min_eigenvalue"};
  t.add_row(o.n1, o.n2, o.pa, o.pb, o.pc, o.g2_11, o.g2_22, o.g2_12, s.ss.residual, s.ss.diagnostics.min_eigenvalue);
  const nlohmann::ordered_json prov = {{"params", to_json(p)}, {"tolerance", c.tol}};
  write_table(c.out, t, prov);

  CsvTable dist;
  dist.file = "solve_distribution.csv";
  dist.add_meta("params", param_record(p));
  dist.columns = {"n", "P_n1", "P_n2"};
  const std::size_t nmax = std::max(o.p_n1.size(), o.p_n2.size());
  for (std::size_t n = 0; n < nmax; ++n)
    dist.add_row(n, n < o.p_n1.size() ? o.p_n1[n] : 0.0, n < o.p_n2.size() ? o.p_n2[n] : 0.0);
  write_table(c.out, dist, prov);

  {
    std::ofstream h(fs::path(c.out) / "hamiltonian.mtx");
    write_matrix_market(h, SparseOperator::from_eigen(s.l.hamiltonian()));
    std::ofstream r(fs::path(c.out) / "rho.mtx");
    write_matrix_market(r, SparseOperator::from_eigen(CsrMatrix(s.ss.rho.sparseView())));
  }
  std::cout << "n1=" << format_number(o.n1) << " n2=" << format_number(o.n2) << " g2_11=" << format_number(o.g2_11)
            << " g2_12=" << format_number(o.g2_12) << " residual=" << format_number(s.ss.residual) << "\n";
  return kOk;
}

SweepAxis parse_axis(const std::string& s) {
  // name:start:stop:steps
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw Error(ErrorKind::Config, "axis '" + s + "' is not name:start:stop:steps");
  SweepAxis a;
  a.name = parts[0];
  a.start = detail::parse_number(a.name, parts[1]);
  a.stop = detail::parse_number(a.name, parts[2]);
  const double steps = detail::parse_number(a.name, parts[3]);
  if (steps < 2 || steps != std::floor(steps)) throw Error(ErrorKind::Config, "axis steps must be an integer >= 2");
  a.steps = static_cast<std::size_t>(steps);
  return a;
}

int cmd_scan(const Common& c, const std::vector<std::string>& axes, bool guard, bool witness_out, bool corr_out,
             bool spectra_out) {
  const nlohmann::json cfg = load_config(c);
  SweepSpec spec = sweep_from_json(cfg);
  spec.base = resolve_params(c, cfg, {});
  for (const auto& a : axes) spec.axes.push_back(parse_axis(a));
  if (guard) spec.guard = true;
  if (witness_out) spec.outputs.witness = true;
  if (corr_out) spec.outputs.correlations = true;
  if (spectra_out) spec.outputs.spectra = true;
  spec.tol = c.tol;
  const SweepResult r = run_sweep(spec, c.threads);
  const auto prov = provenance(r);
  write_table(c.out, sweep_table(r), prov);
  if (spec.outputs.correlations || spec.outputs.spectra) write_table(c.out, correlation_table(r), prov);
  if (spec.outputs.spectra) write_table(c.out, spectrum_table(r), prov);
  std::size_t failed = 0;
  for (const auto& row : r.rows) failed += row.point.status != PointStatus::ok;
  if (r.guard) std::cout << "guard: recommended fock_states=" << r.guard->recommended << "\n";
  std::cout << "points=" << r.rows.size() << " failed=" << failed << " spec_hash=" << spec_hash(r.spec) << "\n";
  return kOk;
}

CorrelationSeries correlate(const Solved& s, int pair, double t_max, std::size_t points) {
  const int i = pair / 10, j = pair % 10;
  if ((i != 1 && i != 2) || (j != 1 && j != 2)) throw Error(ErrorKind::Config, "pair must be one of 11, 12, 21, 22");
  TauGrid grid = default_tau_grid(s.params);
  if (t_max > 0.0) grid.t_max = t_max;
  if (points > 0) grid.n_points = points;
  return g2_correlation(s.l, s.ss.rho, i, j, grid, correlation_decay_rate(s.params));
}

int cmd_correlate(const Common& c, int pair, double t_max, std::size_t points) {
  const ModelParams p = resolve_params(c, load_config(c), {});
  const Solved s = solve_and_record(c, p, "correlate");
  const CorrelationSeries g = correlate(s, pair, t_max, points);
  CsvTable t;
  t.file = "g2_" + std::to_string(pair) + ".csv";
  t.add_meta("params", param_record(p));
  t.add_meta("g_inf", format_number(g.g_inf));
  t.add_meta("direct_tau0", format_number(g.direct_zero));
  t.columns = {"tau", "g2"};
  for (std::size_t k = 0; k < g.tau.size(); ++k) t.add_row(g.tau[k], g.g2[k]);
  write_table(c.out, t, {{"params", to_json(p)}, {"tolerance", c.tol}});
  std::cout << "g2_" << pair << "(0)=" << format_number(g.g2.front()) << " g_inf=" << format_number(g.g_inf) << "\n";
  return kOk;
}

int cmd_spectrum(const Common& c, int pair, double t_max, std::size_t points, double omega_max,
                 std::size_t omega_points) {
  const ModelParams p = resolve_params(c, load_config(c), {});
  const Solved s = solve_and_record(c, p, "spectrum");
  const CorrelationSeries g = correlate(s, pair, t_max, points);
  const Spectrum f = hbt_spectrum(g, default_omega_grid(omega_max, omega_points));
  CsvTable t;
  t.file = "F_" + std::to_string(pair) + ".csv";
  t.add_meta("params", param_record(p));
  t.add_meta("resolution", format_number(f.resolution));
  t.add_meta("g_inf", format_number(g.g_inf));
  t.columns = {"omega", "F", "curvature"};
  for (std::size_t k = 0; k < f.omega.size(); ++k) t.add_row(f.omega[k], f.value[k], f.curvature[k]);
  write_table(c.out, t, {{"params", to_json(p)}, {"tolerance", c.tol}});
  std::cout << "F(0)=" << format_number(f.value.front()) << " resolution=" << format_number(f.resolution) << "\n";
  for (const auto& feat : spectral_features(f, f.resolution))
    std::cout << "feature " << to_string(feat.kind) << " omega=" << format_number(feat.omega) << "\n";
  return kOk;
}

int cmd_witness(const Common& c, int mode) {
  const ModelParams p = resolve_params(c, load_config(c), {});
  const Solved s = solve_and_record(c, p, "witness");
  const WitnessResult w = witness(s.l.space(), s.ss.rho, mode);
  const ObservableRecord o = compute_observables(s.l.space(), s.ss.rho);
  CsvTable t;
  t.file = "witness.csv";
  t.add_meta("params", param_record(p));
  t.add_meta("transposed_mode", std::to_string(mode));
  t.add_meta("min_eigenvalue", format_number(w.min_eigenvalue));
  t.add_meta("entangled", w.entangled ? "1" : "0");
  t.add_meta("n1", format_number(o.n1));
  t.add_meta("n2", format_number(o.n2));
  t.add_meta("g2_12", format_number(o.g2_12));
  t.columns = {"index", "eigenvalue"};
  for (std::size_t k = 0; k < w.spectrum.size(); ++k) t.add_row(k, w.spectrum[k]);
  write_table(c.out, t, {{"params", to_json(p)}, {"tolerance", c.tol}});
  std::cout << "min_eigenvalue=" << format_number(w.min_eigenvalue) << " entangled=" << (w.entangled ? 1 : 0)
            << "\n";
  return kOk;
}

int cmd_figure(const Common& c, const std::string& name) {
  FigureOptions o;
  o.threads = c.threads;
  o.tol = c.tol;
  o.overrides = c.sets;
  if (c.fock > 0) o.fock_states = c.fock;
  const FigureBundle b = run_figure(name, o);
  for (const auto& t : b.tables) {
    write_table(c.out, t, {{"figure", b.name}, {"tolerance", c.tol}, {"fock_states", o.fock_states}});
    std::cout << "wrote " << (fs::path(c.out) / t.file).string() << " (" << t.rows.size() << " rows)\n";
  }
  for (const auto& f : b.features) {
    std::cout << "predicted " << f.name << " at";
    for (double v : f.location) std::cout << " " << format_number(v);
    std::cout << "\n";
  }
  return kOk;
}

int cmd_selftest(const Common& c, double rate_factor) {
  SelftestOptions opt;
  opt.rate_factor = rate_factor;
  const SelftestReport r = run_selftest(opt);
  const auto j = to_json(r);
  std::cout << j.dump(2) << "\n";
  if (c.out != ".") write_json(fs::path(c.out) / "selftest.json", j);
  return r.passed() ? kOk : kSelftestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states, correlations and entanglement of a V-type atom in a bimodal cavity"};
  app.require_subcommand(1);
  Common common;

  auto* solve = app.add_subcommand("solve", "steady state and observables for one parameter set");
  add_common(solve, common);

  auto* scan = app.add_subcommand("scan", "parameter sweep from a configuration file or --axis options");
  add_common(scan, common);
  std::vector<std::string> axes;
  bool guard = false, scan_witness = false, scan_corr = false, scan_spectra = false;
  scan->add_option("--axis", axes, "sweep axis name:start:stop:steps (at most two)");
  scan->add_flag("--guard", guard, "pick the truncation with the convergence guard");
  scan->add_flag("--witness", scan_witness, "add the entanglement witness");
  scan->add_flag("--correlations", scan_corr, "add g2(tau) series");
  scan->add_flag("--spectra", scan_spectra, "add HBT spectra");

  int pair = 12;
  double t_max = 0.0;
  std::size_t points = 0;
  auto* corr = app.add_subcommand("correlate", "two-time intensity correlation g2_ij(tau)");
  add_common(corr, common);
  corr->add_option("--pair", pair, "mode pair ij: 11, 12, 21 or 22");
  corr->add_option("--tmax", t_max, "largest delay (default 20/(kappa+gamma))");
  corr->add_option("--points", points, "delay samples (default 2048)");

  double omega_max = 40.0;
  std::size_t omega_points = 801;
  auto* spec = app.add_subcommand("spectrum", "HBT spectrum F_ij(omega)");
  add_common(spec, common);
  spec->add_option("--pair", pair, "mode pair ij: 11, 12, 21 or 22");
  spec->add_option("--tmax", t_max, "largest delay (default 20/(kappa+gamma))");
  spec->add_option("--points", points, "delay samples (default 2048)");
  spec->add_option("--omega-max", omega_max, "largest frequency");
  spec->add_option("--omega-points", omega_points, "frequency samples");

  int mode = 2;
  auto* wit = app.add_subcommand("witness", "partial-transpose entanglement witness");
  add_common(wit, common);
  wit->add_option("--mode", mode, "transposed mode")->check(CLI::IsMember({1, 2}));

  std::string fig_name;
  auto* fig = app.add_subcommand("figure", "CSV data for a named figure preset");
  add_common(fig, common);
  fig->add_option("name", fig_name, "fig3 fig4 fig5 fig6 fig7 fig8 shelving fig11 fig12 fig13")->required();

  double rate_factor = 1.0;
  auto* self = app.add_subcommand("selftest", "run the built-in oracle checks");
  add_common(self, common);
  self->add_option("--rate-factor", rate_factor, "scale all dissipative rates (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    fs::create_directories(common.out);
    if (*solve) return cmd_solve(common);
    if (*scan) return cmd_scan(common, axes, guard, scan_witness, scan_corr, scan_spectra);
    if (*corr) return cmd_correlate(common, pair, t_max, points);
    if (*spec) return cmd_spectrum(common, pair, t_max, points, omega_max, omega_points);
    if (*wit) return cmd_witness(common, mode);
    if (*fig) return cmd_figure(common, fig_name);
    if (*self) return cmd_selftest(common, rate_factor);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
