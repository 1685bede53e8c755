#pragma once

// Data pipelines behind each published figure. Every pipeline returns CSV
// tables plus predicted feature locations from the dressed-state picture.

#include <cmath>
#include <string>
#include <vector>

#include "vcqed/csv.hpp"
#include "vcqed/dressed.hpp"
#include "vcqed/dynamics.hpp"
#include "vcqed/entanglement.hpp"
#include "vcqed/observables.hpp"
#include "vcqed/sweep.hpp"

namespace vcqed {

struct FigureOptions {
  unsigned threads = 1;
  int fock_states = 6;
  double tol = 1e-9;
  std::vector<std::string> overrides;  // key=value applied to every base parameter set
};

struct FigureBundle {
  std::string name;
  std::vector<CsvTable> tables;
  std::vector<ScanFeature> features;
};

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig3", "fig4",     "fig5",  "fig6",  "fig7",
                                              "fig8", "shelving", "fig11", "fig12", "fig13"};
  return names;
}

namespace detail {

inline ModelParams figure_base(const FigureOptions& o) {
  ModelParams p;
  p.fock_states_1 = p.fock_states_2 = o.fock_states;
  for (const auto& s : o.overrides) apply_override(p, s);
  return p;
}

inline std::string features_record(const std::vector<ScanFeature>& f) {
  std::string out;
  for (const auto& x : f) {
    if (!out.empty()) out += ';';
    out += x.name + "=";
    for (std::size_t k = 0; k < x.location.size(); ++k) {
      if (k) out += '|';
      out += format_number(x.location[k]);
    }
  }
  return out;
}

/// Runs the same axes once per family value and concatenates the rows
/// with a leading family column.
inline CsvTable family_sweep(const std::string& file, const ModelParams& base, const std::string& family_key,
                             const std::vector<double>& family, const std::vector<SweepAxis>& axes,
                             const FigureOptions& o, bool with_witness = false) {
  CsvTable out;
  out.file = file;
  out.add_meta("base_params", param_record(base));
  bool first = true;
  for (double v : family) {
    SweepSpec s;
    s.name = "part";
    s.base = base;
    set_param(s.base, family_key, v);
    s.axes = axes;
    s.outputs.witness = with_witness;
    s.tol = o.tol;
    CsvTable part = sweep_table(run_sweep(s, o.threads));
    if (first) {
      out.columns.push_back(family_key);
      out.columns.insert(out.columns.end(), part.columns.begin(), part.columns.end());
      first = false;
    }
    for (auto& row : part.rows) {
      row.insert(row.begin(), format_number(v));
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

inline SweepAxis axis(std::string name, double start, double stop, std::size_t steps) {
  return SweepAxis{std::move(name), start, stop, steps, {}};
}

inline CsvTable select_columns(const CsvTable& in, const std::string& file, const std::vector<std::string>& cols) {
  CsvTable out;
  out.file = file;
  out.meta = in.meta;
  out.columns = cols;
  std::vector<std::size_t> idx;
  for (const auto& c : cols) idx.push_back(in.column(c));
  for (const auto& row : in.rows) {
    std::vector<std::string> r;
    for (std::size_t k : idx) r.push_back(row[k]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

/// g2_ij(tau) and F_ij(omega) for each pump value at the default grid.
inline FigureBundle correlation_figure(const std::string& name, int i, int j, const FigureOptions& o) {
  FigureBundle b;
  b.name = name;
  const ModelParams base = figure_base(o);
  const std::string pair = std::to_string(i) + std::to_string(j);
  CsvTable tau_t, spec_t;
  tau_t.file = name + "_g2_" + pair + ".csv";
  spec_t.file = name + "_F_" + pair + ".csv";
  tau_t.columns = {"eta_ic", "tau", "g2"};
  spec_t.columns = {"eta_ic", "omega", "F", "curvature"};
  for (auto* t : {&tau_t, &spec_t}) t->add_meta("base_params", param_record(base));
  const std::vector<double> etas{0.5, 1.0, 1.5, 2.0};
  struct Out {
    CorrelationSeries s;
    Spectrum f;
  };
  const auto results = parallel_map<Out>(etas.size(), o.threads, [&](std::size_t k) {
    ModelParams p = base;
    set_param(p, "eta_ic", etas[k]);
    const Liouvillian l = build_liouvillian(p);
    SteadyOptions so;
    so.tol = o.tol;
    const auto ss = steady_state(l, so);
    Out r;
    r.s = g2_correlation(l, ss.rho, i, j, default_tau_grid(p), correlation_decay_rate(p));
    r.f = hbt_spectrum(r.s, default_omega_grid());
    return r;
  });
  for (std::size_t k = 0; k < etas.size(); ++k) {
    const auto& r = results[k];
    for (std::size_t m = 0; m < r.s.tau.size(); ++m) tau_t.add_row(etas[k], r.s.tau[m], r.s.g2[m]);
    for (std::size_t m = 0; m < r.f.omega.size(); ++m)
      spec_t.add_row(etas[k], r.f.omega[m], r.f.value[m], r.f.curvature[m]);
    tau_t.add_meta("g_inf_eta_ic_" + format_number(etas[k]), format_number(r.s.g_inf));
    spec_t.add_meta("resolution", format_number(r.f.resolution));
  }
  b.tables = {tau_t, spec_t};
  const double g = base.g1;
  b.features = {{"vacuum_rabi_frequency", {2.0 * g}}, {"two_photon_sector_frequency", {std::sqrt(2.0) * g}}};
  return b;
}

}  // namespace detail

inline FigureBundle fig3(const FigureOptions& o) {
  FigureBundle b{"fig3", {}, {}};
  SweepSpec s;
  s.name = "fig3";
  s.base = detail::figure_base(o);
  s.axes = {detail::axis("fock_states", 2, 8, 7)};
  s.tol = o.tol;
  b.tables.push_back(sweep_table(run_sweep(s, o.threads)));
  return b;
}

inline FigureBundle fig4(const FigureOptions& o) {
  FigureBundle b{"fig4", {}, {}};
  const ModelParams base = detail::figure_base(o);
  b.tables.push_back(detail::family_sweep("fig4.csv", base, "eta_ic", {0.5, 1.0, 1.5, 2.0},
                                          {detail::axis("g", 0.0, 20.0, 81)}, o));
  SweepSpec s;
  s.name = "fig4_surface";
  s.base = base;
  s.axes = {detail::axis("g1", 0.0, 20.0, 21), detail::axis("g2", 0.0, 20.0, 21)};
  s.tol = o.tol;
  b.tables.push_back(sweep_table(run_sweep(s, o.threads)));
  return b;
}

inline FigureBundle fig5(const FigureOptions& o) {
  FigureBundle b{"fig5", {}, {}};
  const CsvTable full = detail::family_sweep("fig5.csv", detail::figure_base(o), "eta_ic", {0.5, 1.0, 1.5, 2.0},
                                             {detail::axis("g", 0.0, 20.0, 81)}, o);
  b.tables.push_back(detail::select_columns(full, "fig5.csv", {"eta_ic", "g", "status", "g2_11", "g2_22", "g2_12"}));
  return b;
}

inline FigureBundle fig6(const FigureOptions& o) {
  FigureBundle b{"fig6", {}, {}};
  const ModelParams base = detail::figure_base(o);
  b.tables.push_back(detail::family_sweep("fig6.csv", base, "eta_ic", {0.5, 1.0, 1.5, 2.0},
                                          {detail::axis("delta1", -30.0, 30.0, 241)}, o));
  SweepSpec s;
  s.name = "fig6_surface";
  s.base = base;
  s.axes = {detail::axis("delta1", -25.0, 25.0, 101), detail::axis("delta2", -25.0, 25.0, 101)};
  s.tol = o.tol;
  b.tables.push_back(sweep_table(run_sweep(s, o.threads)));
  for (const auto& f : expected_scan_features(base))
    if (f.name.rfind("n1_peak", 0) == 0 || f.name.rfind("n2_peak", 0) == 0 || f.name == "intensity_linewidth")
      b.features.push_back(f);
  return b;
}

inline FigureBundle fig7(const FigureOptions& o) { return detail::correlation_figure("fig7", 1, 2, o); }
inline FigureBundle fig8(const FigureOptions& o) { return detail::correlation_figure("fig8", 1, 1, o); }

/// Shelving regime: metastable level b, weak mode-1 coupling.
inline ModelParams shelving_params(const FigureOptions& o) {
  ModelParams p = detail::figure_base(o);
  p.gamma1 = 0.1;
  p.g1 = 1.0;
  p.g2 = 3.0;
  p.eta_ic1 = 2.0;
  return p;
}

inline FigureBundle shelving(const FigureOptions& o) {
  FigureBundle b{"shelving", {}, {}};
  SweepSpec s;
  s.name = "shelving";
  s.base = shelving_params(o);
  s.axes = {detail::axis("eta_ic2", 0.0, 2.0, 41)};
  s.tol = o.tol;
  b.tables.push_back(sweep_table(run_sweep(s, o.threads)));
  return b;
}

/// Coherently driven, unpumped configuration.
inline ModelParams driven_params(const FigureOptions& o) {
  ModelParams p = detail::figure_base(o);
  p.frame = Frame::laser_frame;
  p.eta_ic1 = p.eta_ic2 = 0.0;
  p.eta_c1 = p.eta_c2 = 2.0;
  return p;
}

inline FigureBundle fig11(const FigureOptions& o) {
  FigureBundle b{"fig11", {}, {}};
  const ModelParams base = driven_params(o);
  const CsvTable full = detail::family_sweep("fig11.csv", base, "eta_c", {0.1, 0.5, 1.0, 1.5, 2.0},
                                             {detail::axis("deltaL", 0.0, 15.0, 151)}, o, true);
  b.tables.push_back(detail::select_columns(full, "fig11_witness.csv",
                                            {"eta_c", "deltaL", "status", "witness_min_eigenvalue", "entangled"}));
  b.tables.push_back(detail::select_columns(full, "fig11_n.csv", {"eta_c", "deltaL", "status", "n1", "n2"}));
  b.tables.push_back(detail::select_columns(full, "fig11_g2.csv", {"eta_c", "deltaL", "status", "g2_12"}));
  for (const auto& f : expected_scan_features(base))
    if (f.name.find("resonance_deltaL") != std::string::npos) b.features.push_back(f);
  return b;
}

inline FigureBundle fig12(const FigureOptions& o) {
  FigureBundle b{"fig12", {}, {}};
  ModelParams base = driven_params(o);
  set_param(base, "deltaL", base.g1 / std::sqrt(2.0));
  const CsvTable full = detail::family_sweep("fig12.csv", base, "eta_ic1", {0.01, 0.1, 0.5},
                                             {detail::axis("eta_ic2", 0.0, 1.0, 21)}, o, true);
  b.tables.push_back(detail::select_columns(full, "fig12_witness.csv",
                                            {"eta_ic1", "eta_ic2", "status", "witness_min_eigenvalue", "entangled"}));
  b.tables.push_back(detail::select_columns(full, "fig12_n.csv", {"eta_ic1", "eta_ic2", "status", "n1", "n2"}));
  b.tables.push_back(
      detail::select_columns(full, "fig12_g2.csv", {"eta_ic1", "eta_ic2", "status", "g2_11", "g2_22", "g2_12"}));
  return b;
}

inline FigureBundle fig13(const FigureOptions& o) {
  FigureBundle b{"fig13", {}, {}};
  ModelParams inc = detail::figure_base(o);
  ModelParams coh = driven_params(o);
  CsvTable out;
  out.file = "fig13.csv";
  out.columns = {"g", "strength", "n_incoherent", "n_coherent", "status_incoherent", "status_coherent"};
  out.add_meta("incoherent_params", param_record(inc));
  out.add_meta("coherent_params", param_record(coh));
  for (double g : {5.0, 10.0}) {
    SweepSpec si, sc;
    si.base = inc;
    sc.base = coh;
    set_param(si.base, "g", g);
    set_param(sc.base, "g", g);
    si.axes = {detail::axis("eta_ic", 0.0, 5.0, 51)};
    sc.axes = {detail::axis("eta_c", 0.0, 5.0, 51)};
    si.tol = sc.tol = o.tol;
    const SweepResult ri = run_sweep(si, o.threads);
    const SweepResult rc = run_sweep(sc, o.threads);
    for (std::size_t k = 0; k < ri.rows.size(); ++k) {
      const auto& a = ri.rows[k].point;
      const auto& c = rc.rows[k].point;
      out.rows.push_back({format_number(g), format_number(ri.rows[k].coords[0]), format_number(a.obs.n_total()),
                          format_number(c.obs.n_total()), to_string(a.status), to_string(c.status)});
    }
  }
  b.tables.push_back(out);
  return b;
}

inline FigureBundle run_figure(const std::string& name, const FigureOptions& o) {
  FigureBundle b;
  if (name == "fig3") b = fig3(o);
  else if (name == "fig4") b = fig4(o);
  else if (name == "fig5") b = fig5(o);
  else if (name == "fig6") b = fig6(o);
  else if (name == "fig7") b = fig7(o);
  else if (name == "fig8") b = fig8(o);
  else if (name == "shelving") b = shelving(o);
  else if (name == "fig11") b = fig11(o);
  else if (name == "fig12") b = fig12(o);
  else if (name == "fig13") b = fig13(o);
  else throw Error(ErrorKind::UnknownFigure, "unknown figure '" + name + "'");
  if (!b.features.empty()) {
    const std::string rec = detail::features_record(b.features);
    for (auto& t : b.tables) t.add_meta("predicted_features", rec);
  }
  return b;
}

}  // namespace vcqed
