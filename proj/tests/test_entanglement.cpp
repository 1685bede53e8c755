#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vcqed/entanglement.hpp"
#include "vcqed/steady.hpp"

using namespace vcqed;

namespace {

ReducedFieldState random_state(int f1, int f2, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const Index d = Index(f1) * f2;
  DenseMatrix m(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) m(r, c) = Complex(n(rng), n(rng));
  DenseMatrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return {f1, f2, rho};
}

}  // namespace

TEST(TraceOutAtom, PureJointStateGivesFockProjector) {
  const HilbertSpace space(3, 3);
  const ReducedFieldState r = trace_out_atom(space, basis_projector(space, {AtomicLevel::a, 1, 0}));
  ASSERT_EQ(r.dim(), 9);
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j)
      EXPECT_EQ(r.rho(i, j), Complex(i == r.index(1, 0) && j == i ? 1.0 : 0.0));
}

TEST(TraceOutAtom, MixtureOverAtomicLevelsSharesVacuum) {
  const HilbertSpace space(3, 3);
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  for (AtomicLevel l : {AtomicLevel::a, AtomicLevel::b, AtomicLevel::c}) rho += basis_projector(space, {l, 0, 0}) / 3.0;
  const ReducedFieldState r = trace_out_atom(space, rho);
  EXPECT_NEAR(r.rho(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(r.rho.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(TraceOutAtom, SixStatesGive36Square) {
  const HilbertSpace space(6, 6);
  const auto r = trace_out_atom(space, steady_state(build_liouvillian(ModelParams{})).rho);
  EXPECT_EQ(r.rho.rows(), 36);
  EXPECT_EQ(r.rho.cols(), 36);
  EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-10);
}

TEST(PartialTranspose, ProductStateIsPositive) {
  ReducedFieldState s{3, 4, {}};
  DenseVector u(3), v(4);
  u << 0.6, Complex(0.0, 0.8), 0.0;
  v << 0.5, 0.5, Complex(0.5, 0.0), Complex(0.0, -0.5);
  DenseVector psi(12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) psi(s.index(i, j)) = u(i) * v(j);
  s.rho = psi * psi.adjoint();
  const WitnessResult w = witness(s);
  EXPECT_GE(w.min_eigenvalue, -1e-14);
  EXPECT_FALSE(w.entangled);
}

TEST(PartialTranspose, BellStateMinimumEigenvalue) {
  ReducedFieldState s{2, 2, DenseMatrix::Zero(4, 4)};
  DenseVector psi = DenseVector::Zero(4);
  psi(s.index(0, 1)) = psi(s.index(1, 0)) = 1.0 / std::sqrt(2.0);
  s.rho = psi * psi.adjoint();
  const WitnessResult w = witness(s);
  EXPECT_NEAR(w.min_eigenvalue, -0.5, 1e-14);
  EXPECT_TRUE(w.entangled);
  EXPECT_NEAR(w.spectrum_sum, 1.0, 1e-14);
  EXPECT_TRUE(std::is_sorted(w.spectrum.begin(), w.spectrum.end()));
}

TEST(PartialTranspose, ElementMapping) {
  ReducedFieldState s{2, 3, DenseMatrix::Zero(6, 6)};
  s.rho(s.index(1, 2), s.index(0, 1)) = Complex(0.25, 0.5);
  const DenseMatrix pt2 = partial_transpose(s, 2);
  EXPECT_EQ(pt2(s.index(1, 1), s.index(0, 2)), Complex(0.25, 0.5));
  EXPECT_EQ(pt2.cwiseAbs().sum(), std::abs(Complex(0.25, 0.5)));
  const DenseMatrix pt1 = partial_transpose(s, 1);
  EXPECT_EQ(pt1(s.index(0, 2), s.index(1, 1)), Complex(0.25, 0.5));
}

TEST(PartialTranspose, InvolutionAndTracePreservation) {
  for (unsigned seed = 1; seed <= 3; ++seed) {
    ReducedFieldState s = random_state(3, 4, seed);
    for (int mode = 1; mode <= 2; ++mode) {
      ReducedFieldState once = s;
      once.rho = partial_transpose(s, mode);
      EXPECT_EQ(partial_transpose(once, mode), s.rho);
      EXPECT_NEAR(std::abs(once.rho.trace() - s.rho.trace()), 0.0, 1e-15);
    }
  }
}

TEST(PartialTranspose, ModeChoiceGivesSameSpectrum) {
  for (unsigned seed = 4; seed <= 6; ++seed) {
    const ReducedFieldState s = random_state(3, 3, seed);
    const WitnessResult w1 = witness(s, 1);
    const WitnessResult w2 = witness(s, 2);
    ASSERT_EQ(w1.spectrum.size(), w2.spectrum.size());
    for (std::size_t k = 0; k < w1.spectrum.size(); ++k) EXPECT_NEAR(w1.spectrum[k], w2.spectrum[k], 1e-12);
    EXPECT_EQ(w1.transposed_mode, 1);
  }
}

TEST(PartialTranspose, InvalidModeAndDimension) {
  ReducedFieldState s{2, 2, DenseMatrix::Identity(4, 4) / 4.0};
  EXPECT_THROW(partial_transpose(s, 3), Error);
  s.rho = DenseMatrix::Identity(3, 3);
  EXPECT_THROW(partial_transpose(s, 2), Error);
  EXPECT_THROW(trace_out_atom(HilbertSpace(2, 2), DenseMatrix::Identity(5, 5)), Error);
}

TEST(Witness, IncoherentPumpingIsSeparable) {
  for (double eta : {0.5, 2.0}) {
    ModelParams p;
    p.eta_ic1 = p.eta_ic2 = eta;
    const HilbertSpace space(6, 6);
    const WitnessResult w = witness(space, steady_state(build_liouvillian(p)).rho);
    EXPECT_GE(w.min_eigenvalue, -1e-8);
    EXPECT_FALSE(w.entangled);
  }
}

TEST(Witness, CoherentDriveEntanglesModes) {
  ModelParams p;
  p.frame = Frame::laser_frame;
  p.eta_ic1 = p.eta_ic2 = 0.0;
  p.eta_c1 = p.eta_c2 = 2.0;
  p.delta1L = p.delta2L = 5.6;
  const HilbertSpace space(6, 6);
  const WitnessResult w = witness(space, steady_state(build_liouvillian(p)).rho);
  EXPECT_LT(w.min_eigenvalue, -1e-3);
  EXPECT_TRUE(w.entangled);
}
