#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vcqed/sweep.hpp"

using namespace vcqed;

namespace {

SweepSpec one_axis(const std::string& name, double start, double stop, std::size_t steps) {
  SweepSpec s;
  s.axes.push_back({name, start, stop, steps, {}});
  return s;
}

ModelParams driven_base() {
  ModelParams p;
  p.frame = Frame::laser_frame;
  p.eta_ic1 = p.eta_ic2 = 0.0;
  p.eta_c1 = p.eta_c2 = 2.0;
  p.delta1L = p.delta2L = 10.0 / std::sqrt(2.0);
  return p;
}

}  // namespace

TEST(SweepSpec, AxisValues) {
  const SweepAxis a{"g", 0.0, 1.0, 5, {}};
  const auto v = a.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v[2], 0.5);
  EXPECT_EQ(v.back(), 1.0);
  const SweepAxis b{"g", 0.0, 0.0, 0, {3.0, 1.0}};
  EXPECT_EQ(b.values(), (std::vector<double>{3.0, 1.0}));
}

TEST(SweepSpec, ConfigErrors) {
  auto expect_config = [](const SweepSpec& s) {
    try {
      validate(s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
  };
  expect_config(SweepSpec{});
  expect_config(one_axis("bogus", 0, 1, 3));
  expect_config(one_axis("g", 0, 1, 1));
  expect_config(one_axis("g", 0, INFINITY, 3));
  SweepSpec pairs = one_axis("g", 0, 1, 3);
  pairs.pairs = {{1, 3}};
  expect_config(pairs);
  SweepSpec drive = one_axis("eta_c", 0, 1, 3);
  expect_config([&] {
    SweepSpec s = drive;
    s.base.eta_c1 = 1.0;
    return s;
  }());
  SweepSpec three = one_axis("g", 0, 1, 3);
  three.axes.push_back(three.axes[0]);
  three.axes.push_back(three.axes[0]);
  expect_config(three);
}

TEST(SweepSpec, JsonRoundTrip) {
  SweepSpec s = one_axis("eta_ic", 0.5, 2.0, 4);
  s.name = "pumps";
  s.base.g1 = 7.0;
  s.outputs.witness = true;
  s.pairs = {{1, 2}};
  s.tau = TauGrid{5.0, 101};
  const SweepSpec back = sweep_from_json(nlohmann::json::parse(to_json(s).dump()));
  EXPECT_EQ(back.name, "pumps");
  EXPECT_EQ(back.base, s.base);
  EXPECT_EQ(back.axes[0].values(), s.axes[0].values());
  EXPECT_TRUE(back.outputs.witness);
  EXPECT_EQ(back.pairs, s.pairs);
  ASSERT_TRUE(back.tau.has_value());
  EXPECT_EQ(back.tau->n_points, 101u);
  EXPECT_EQ(spec_hash(back), spec_hash(s));
}

TEST(SweepSpec, TopLevelParameterKeys) {
  const auto j = nlohmann::json::parse(R"({"g1": 4.0, "eta_ic": 1.0, "axes": [{"name": "delta1", "values": [0, 1]}]})");
  const SweepSpec s = sweep_from_json(j);
  EXPECT_EQ(s.base.g1, 4.0);
  EXPECT_EQ(s.base.eta_ic1, 1.0);
  EXPECT_EQ(s.base.eta_ic2, 1.0);
  EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"axes": [{"name": "g"}]})")), Error);
  EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"nonsense": 1})")), Error);
}

TEST(Guard, NoPumpCornerNeedsOneState) {
  SweepSpec s = one_axis("g", 1.0, 10.0, 3);
  s.base.eta_ic1 = s.base.eta_ic2 = 0.0;
  const GuardReport r = convergence_guard(s);
  EXPECT_EQ(r.recommended, 1);
  EXPECT_EQ(r.corners.size(), 2u);
}

TEST(Guard, ModeratePumpNeedsAtMostSix) {
  SweepSpec s;
  s.axes.push_back({"g", 0.0, 10.0, 3, {}});
  s.axes.push_back({"eta_ic", 0.5, 2.0, 3, {}});
  const GuardReport r = convergence_guard(s);
  EXPECT_EQ(r.corners.size(), 4u);
  EXPECT_LE(r.recommended, 6);
  EXPECT_GE(r.recommended, 2);
}

TEST(Guard, StrongerPumpNeedsMoreStates) {
  SweepSpec two = one_axis("eta_ic", 2.0, 2.0, 2);
  SweepSpec four = one_axis("eta_ic", 4.0, 4.0, 2);
  EXPECT_GT(convergence_guard(four).recommended, convergence_guard(two).recommended);
}

TEST(Guard, RefusesWhenBudgetExhausted) {
  SweepSpec s = one_axis("eta_ic", 2.0, 2.0, 2);
  s.max_fock = 3;
  try {
    convergence_guard(s);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
  }
  s.max_fock = 12;
  s.memory_budget_bytes = 1e5;
  EXPECT_THROW(convergence_guard(s), SolverError);
}

TEST(Guard, SoundAtRandomRow) {
  SweepSpec s = one_axis("g", 2.0, 12.0, 11);
  s.base.eta_ic1 = s.base.eta_ic2 = 1.0;
  s.guard = true;
  const SweepResult r = run_sweep(s, 2);
  ASSERT_TRUE(r.guard.has_value());
  std::mt19937 rng(20240611u);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(0, r.rows.size() - 1)(rng);
  const ScanPoint& row = r.rows[k].point;
  ASSERT_EQ(row.status, PointStatus::ok);
  EXPECT_EQ(row.params.fock_states_1, r.guard->recommended);
  ModelParams bigger = row.params;
  bigger.fock_states_1 = bigger.fock_states_2 = r.guard->recommended + 1;
  const ScanPoint check = solve_point(bigger);
  EXPECT_LT(std::abs(check.obs.n_total() - row.obs.n_total()) / row.obs.n_total(), 1e-2);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  SweepSpec s;
  s.base.fock_states_1 = s.base.fock_states_2 = 4;
  s.axes.push_back({"g", 1.0, 9.0, 4, {}});
  s.axes.push_back({"delta1", -3.0, 3.0, 3, {}});
  s.outputs.witness = true;
  const SweepResult a = run_sweep(s, 1);
  const SweepResult b = run_sweep(s, 4);
  EXPECT_EQ(to_csv_string(sweep_table(a)), to_csv_string(sweep_table(b)));
  ASSERT_EQ(a.rows.size(), 12u);
  EXPECT_DOUBLE_EQ(a.rows[1].coords[0], 1.0);
  EXPECT_DOUBLE_EQ(a.rows[1].coords[1], 0.0);
  EXPECT_DOUBLE_EQ(a.rows[3].coords[0], 11.0 / 3.0);
  EXPECT_DOUBLE_EQ(a.rows[3].coords[1], -3.0);
}

TEST(Sweep, TruncationPlateau) {
  SweepSpec s = one_axis("fock_states", 2.0, 8.0, 7);
  const SweepResult r = run_sweep(s, 2);
  ASSERT_EQ(r.rows.size(), 7u);
  std::vector<double> n;
  for (const auto& row : r.rows) n.push_back(row.point.obs.n1);
  for (std::size_t k = 1; k < n.size(); ++k) EXPECT_GT(n[k], n[k - 1]);
  for (std::size_t k = 4; k < n.size(); ++k) EXPECT_LT(std::abs(n[k] - n[k - 1]) / n[k - 1], 1e-2);
}

TEST(Sweep, IncoherentPumpingOutperformsCoherentDrive) {
  for (double g : {5.0, 10.0}) {
    ModelParams inc;
    inc.g1 = inc.g2 = g;
    inc.eta_ic1 = inc.eta_ic2 = 0.5;
    ModelParams coh = driven_base();
    coh.g1 = coh.g2 = g;
    coh.delta1L = coh.delta2L = 0.0;
    coh.eta_c1 = coh.eta_c2 = 0.5;
    const ScanPoint a = solve_point(inc);
    const ScanPoint b = solve_point(coh);
    EXPECT_GE(a.obs.n_total(), 10.0 * b.obs.n_total()) << "g=" << g;
  }
}

TEST(Sweep, EntanglementPersistsToModeratePumping) {
  SweepSpec s = one_axis("eta_ic2", 0.0, 0.4, 3);
  s.base = driven_base();
  s.base.eta_ic1 = 0.01;
  s.outputs.witness = true;
  const SweepResult r = run_sweep(s, 2);
  for (const auto& row : r.rows) {
    ASSERT_TRUE(row.witness.has_value());
    EXPECT_TRUE(row.witness->entangled) << "eta_ic2=" << row.coords[0];
  }
}

TEST(Sweep, FailedRowsKeepStatus) {
  SweepSpec s = one_axis("g", 1.0, 2.0, 2);
  s.base.fock_states_1 = s.base.fock_states_2 = 2;
  s.tol = 1e-300;
  const SweepResult r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 2u);
  const CsvTable t = sweep_table(r);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row[t.column("status")], "solver_failure");
    EXPECT_FALSE(row[t.column("message")].empty());
  }
}

TEST(Sweep, CorrelationAndSpectrumTables) {
  SweepSpec s = one_axis("eta_ic", 0.5, 2.0, 2);
  s.outputs.spectra = true;
  s.pairs = {{1, 2}};
  s.omega_points = 41;
  const SweepResult r = run_sweep(s, 2);
  const CsvTable g2 = correlation_table(r);
  const CsvTable f = spectrum_table(r);
  EXPECT_EQ(g2.rows.size(), 2u * 2048u);
  EXPECT_EQ(f.rows.size(), 2u * 41u);
  EXPECT_EQ(g2.columns, (std::vector<std::string>{"point", "i", "j", "tau", "g2"}));
  const auto prov = provenance(r);
  EXPECT_TRUE(prov.contains("spec_hash"));
  EXPECT_TRUE(prov["tolerances"].contains("min_eigenvalue"));
}

TEST(Sweep, VacuumPairsAreSkipped) {
  SweepSpec s = one_axis("g", 1.0, 2.0, 2);
  s.base.eta_ic2 = 0.0;
  s.base.fock_states_1 = s.base.fock_states_2 = 4;
  s.outputs.correlations = true;
  s.pairs = {{1, 1}, {1, 2}};
  s.tau = TauGrid{1.0, 11};
  const SweepResult r = run_sweep(s);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.point.status, PointStatus::ok);
    ASSERT_EQ(row.correlations.size(), 1u);
    EXPECT_EQ(row.correlations[0].j, 1);
  }
}
