#include <gtest/gtest.h>

#include <cmath>

#include "vcqed/observables.hpp"
#include "vcqed/steady.hpp"

using namespace vcqed;

namespace {

DenseMatrix pure_state(const HilbertSpace& space, const BasisState& s) { return basis_projector(space, s); }

// Independent two-level Jaynes-Cummings oracle: atom {ground, excited} times
// one mode, dense column-stacked Lindblad generator, null vector by pinning
// the trace into the first row.
struct JcSteady {
  double n = 0.0;
  double g2 = 0.0;
  double p_excited = 0.0;
};

JcSteady jc_oracle(int fock, double g, double kappa, double gamma, double eta, double delta) {
  const Index d = 2 * fock;
  auto idx = [fock](int atom, int n) { return Index(atom) * fock + n; };
  DenseMatrix a = DenseMatrix::Zero(d, d), sp = DenseMatrix::Zero(d, d), pe = DenseMatrix::Zero(d, d);
  for (int atom = 0; atom < 2; ++atom)
    for (int n = 1; n < fock; ++n) a(idx(atom, n - 1), idx(atom, n)) = std::sqrt(double(n));
  for (int n = 0; n < fock; ++n) {
    sp(idx(1, n), idx(0, n)) = 1.0;
    pe(idx(1, n), idx(1, n)) = 1.0;
  }
  const DenseMatrix sm = sp.adjoint();
  const DenseMatrix h = -delta * pe + g * (a * sp + a.adjoint() * sm);
  const DenseMatrix id = DenseMatrix::Identity(d, d);
  auto kron = [](const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Index r = 0; r < x.rows(); ++r)
      for (Index c = 0; c < x.cols(); ++c) out.block(r * y.rows(), c * y.cols(), y.rows(), y.cols()) = x(r, c) * y;
    return out;
  };
  const Complex i(0.0, 1.0);
  DenseMatrix l = -i * (kron(id, h) - kron(h.transpose(), id));
  const std::pair<double, DenseMatrix> channels[] = {{kappa, a}, {gamma, sm}, {eta, sp}};
  for (const auto& [rate, x] : channels) {
    const DenseMatrix xx = x.adjoint() * x;
    l += rate * (kron(x.conjugate(), x) - 0.5 * kron(id, xx) - 0.5 * kron(xx.transpose(), id));
  }
  DenseVector rhs = DenseVector::Zero(d * d);
  for (Index c = 0; c < d * d; ++c) l(0, c) = 0.0;
  for (Index k = 0; k < d; ++k) l(0, k * d + k) = 1.0;
  rhs(0) = 1.0;
  const DenseVector x = l.fullPivLu().solve(rhs);
  JcSteady out;
  double nn1 = 0.0;
  for (int atom = 0; atom < 2; ++atom)
    for (int n = 0; n < fock; ++n) {
      const double p = x(idx(atom, n) * d + idx(atom, n)).real();
      out.n += n * p;
      nn1 += n * (n - 1.0) * p;
      if (atom == 1) out.p_excited += p;
    }
  out.g2 = nn1 / (out.n * out.n);
  return out;
}

}  // namespace

TEST(Expectation, NumberOperatorOnFockState) {
  const HilbertSpace space(5, 5);
  const DenseMatrix rho = pure_state(space, {AtomicLevel::a, 3, 2});
  EXPECT_EQ(expectation(rho, number_op(space, 1)), Complex(3.0));
  EXPECT_EQ(expectation(rho, number_op(space, 2)), Complex(2.0));
  EXPECT_EQ(expectation(rho, identity_op(space)), Complex(1.0));
}

TEST(Expectation, DimensionMismatchThrows) {
  EXPECT_THROW(expectation(DenseMatrix::Identity(3, 3), identity_op(HilbertSpace(2, 2))), Error);
}

TEST(EqualTimeG2, SinglePhotonIsAntibunched) {
  const HilbertSpace space(4, 4);
  const DenseMatrix rho = pure_state(space, {AtomicLevel::b, 1, 1});
  EXPECT_NEAR(equal_time_g2(space, rho, 1, 1), 0.0, 1e-15);
  EXPECT_NEAR(equal_time_g2(space, rho, 1, 2), 1.0, 1e-15);
}

TEST(EqualTimeG2, PoissonDiagonalStateIsCoherent) {
  const int f = 40;
  const double mean = 2.0;
  const HilbertSpace space(f, 1);
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  double p = std::exp(-mean);
  for (int n = 0; n < f; ++n) {
    rho(space.index({AtomicLevel::a, n, 0}), space.index({AtomicLevel::a, n, 0})) = p;
    p *= mean / (n + 1);
  }
  EXPECT_NEAR(equal_time_g2(space, rho, 1, 1), 1.0, 1e-10);
}

TEST(EqualTimeG2, VacuumIsUndefined) {
  const HilbertSpace space(3, 3);
  try {
    equal_time_g2(space, pure_state(space, {AtomicLevel::a, 2, 0}), 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedCorrelation);
  }
  const ObservableRecord r = compute_observables(space, pure_state(space, {AtomicLevel::a, 2, 0}));
  EXPECT_FALSE(std::isnan(r.g2_11));
  EXPECT_TRUE(std::isnan(r.g2_22));
  EXPECT_TRUE(std::isnan(r.g2_12));
}

TEST(Observables, RecordIsConsistent) {
  const HilbertSpace space(6, 6);
  const DenseMatrix rho = steady_state(build_liouvillian(ModelParams{})).rho;
  const ObservableRecord r = compute_observables(space, rho);
  EXPECT_LE(consistency_error(r), 1e-10);
  EXPECT_EQ(r.p_n1.size(), 6u);
  EXPECT_NEAR(r.n1, expectation(rho, number_op(space, 1)).real(), 1e-12);
  EXPECT_NEAR(r.pb, expectation(rho, atomic_projector(space, AtomicLevel::b)).real(), 1e-12);
  EXPECT_NEAR(r.n_total(), r.n1 + r.n2, 0.0);
}

TEST(Observables, ModeSwapSymmetry) {
  ModelParams p;
  p.g1 = 8.0;
  p.g2 = 5.0;
  p.kappa1 = 0.6;
  p.eta_ic1 = 1.2;
  p.delta2 = 1.5;
  const HilbertSpace space(6, 6);
  const auto a = compute_observables(space, steady_state(build_liouvillian(p)).rho);
  const auto b = compute_observables(space, steady_state(build_liouvillian(swap_modes(p))).rho);
  EXPECT_NEAR(a.n1, b.n2, 1e-10);
  EXPECT_NEAR(a.n2, b.n1, 1e-10);
  EXPECT_NEAR(a.pb, b.pc, 1e-10);
  EXPECT_NEAR(a.pa, b.pa, 1e-10);
  EXPECT_NEAR(a.g2_11, b.g2_22, 1e-9);
  EXPECT_NEAR(a.g2_12, b.g2_12, 1e-9);
}

TEST(Observables, SinglePumpReducesToTwoLevelLaser) {
  for (auto [g, eta, delta] : {std::tuple{10.0, 2.0, 0.0}, {3.0, 0.5, 1.0}, {1.0, 4.0, -2.0}}) {
    ModelParams p;
    p.g1 = g;
    p.eta_ic1 = eta;
    p.eta_ic2 = 0.0;
    p.delta1 = delta;
    p.kappa1 = 0.8;
    p.gamma1 = 1.3;
    p.fock_states_1 = 8;
    p.fock_states_2 = 3;
    const auto r = compute_observables(HilbertSpace(8, 3), steady_state(build_liouvillian(p)).rho);
    const JcSteady o = jc_oracle(8, g, p.kappa1, p.gamma1, eta, delta);
    EXPECT_NEAR(r.n1, o.n, 1e-8);
    EXPECT_NEAR(r.g2_11, o.g2, 1e-8);
    EXPECT_NEAR(r.pb, o.p_excited, 1e-8);
    EXPECT_LE(r.n2, 1e-10);
    EXPECT_LE(r.pc, 1e-10);
  }
}

TEST(ScanPoint, SolverFailureIsRecorded) {
  SteadyOptions opt;
  opt.tol = 1e-300;
  ModelParams p;
  p.fock_states_1 = p.fock_states_2 = 2;
  const ScanPoint pt = solve_point(p, opt);
  EXPECT_EQ(pt.status, PointStatus::solver_failure);
  EXPECT_FALSE(pt.message.empty());
  EXPECT_EQ(to_string(pt.status), "solver_failure");
}

TEST(ScanPoint, ConfigErrorPropagates) {
  ModelParams p;
  p.eta_c2 = 1.0;
  EXPECT_THROW(solve_point(p), Error);
}

TEST(ScanPoint, ParallelScanKeepsOrderAndValues) {
  std::vector<ModelParams> grid;
  for (int k = 0; k < 6; ++k) {
    ModelParams p;
    p.g1 = p.g2 = 2.0 + k;
    p.fock_states_1 = p.fock_states_2 = 4;
    grid.push_back(p);
  }
  const auto serial = scan_observables(grid, {}, 1);
  const auto parallel = scan_observables(grid, {}, 3);
  ASSERT_EQ(serial.size(), grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(parallel[k].params, grid[k]);
    EXPECT_EQ(serial[k].obs.n1, parallel[k].obs.n1);
    EXPECT_EQ(serial[k].obs.g2_12, parallel[k].obs.g2_12);
  }
}

TEST(PeakSearch, ParabolicRefinement) {
  std::vector<double> x, y;
  for (int k = 0; k <= 20; ++k) {
    x.push_back(0.5 * k);
    y.push_back(-std::pow(0.5 * k - 4.3, 2) + 2.0);
  }
  const PeakEstimate pk = locate_peak(x, y);
  EXPECT_NEAR(pk.location, 4.3, 1e-12);
  EXPECT_NEAR(pk.value, 2.0, 1e-12);
}

TEST(PeakSearch, TwoDimensionalMaxima) {
  std::vector<double> xs, ys;
  for (int k = -10; k <= 10; ++k) xs.push_back(k);
  ys = xs;
  std::vector<std::vector<double>> z(xs.size(), std::vector<double>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      z[i][j] = std::exp(-std::hypot(xs[i] - 5, ys[j] + 3)) + 0.5 * std::exp(-std::hypot(xs[i] + 4, ys[j] - 6));
  const auto peaks = local_maxima_2d(xs, ys, z);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_EQ(peaks[0].x, 5.0);
  EXPECT_EQ(peaks[0].y, -3.0);
  EXPECT_EQ(peaks[1].x, -4.0);
  EXPECT_EQ(peaks[1].y, 6.0);
}

TEST(PeakSearch, SaturationDetection) {
  std::vector<double> x, rising, saturating;
  for (int k = 0; k <= 100; ++k) {
    x.push_back(0.2 * k);
    rising.push_back(0.2 * k);
    saturating.push_back(1.0 - std::exp(-2.0 * 0.2 * k));
  }
  EXPECT_FALSE(is_saturated(x, rising));
  EXPECT_TRUE(is_saturated(x, saturating, 0.05));
}
