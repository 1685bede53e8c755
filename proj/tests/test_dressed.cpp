#include <gtest/gtest.h>

#include <cmath>

#include "vcqed/dressed.hpp"
#include "vcqed/model.hpp"

using namespace vcqed;

namespace {

const double kSqrt2 = std::sqrt(2.0);

DenseVector embed(const HilbertSpace& space, const DressedState& s) {
  DenseVector v = DenseVector::Zero(space.dim());
  for (std::size_t k = 0; k < s.basis.size(); ++k) v(space.index(s.basis[k])) = s.amplitudes(static_cast<Index>(k));
  return v;
}

const ScanFeature& feature(const std::vector<ScanFeature>& all, const std::string& name) {
  for (const auto& f : all)
    if (f.name == name) return f;
  throw std::runtime_error("missing feature " + name);
}

}  // namespace

TEST(DressedEnergies, SinglePhotonSplitting) {
  const auto e = dressed_energies({1, 0}, 10.0, 10.0, 0.0);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e[0], -10.0, 1e-12);
  EXPECT_NEAR(e[1], 10.0, 1e-12);
}

TEST(DressedEnergies, OneOneSector) {
  const auto e = dressed_energies({1, 1}, 10.0, 10.0, 0.0);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_NEAR(e[0], -kSqrt2 * 10.0, 1e-12);
  EXPECT_NEAR(e[1], 0.0, 1e-12);
  EXPECT_NEAR(e[2], kSqrt2 * 10.0, 1e-12);
}

TEST(DressedEnergies, TwoZeroSector) {
  for (PhotonSector s : {PhotonSector{2, 0}, {0, 2}}) {
    const auto e = dressed_energies(s, 10.0, 10.0, 0.0);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_NEAR(e[0], -kSqrt2 * 10.0, 1e-12);
    EXPECT_NEAR(e[1], kSqrt2 * 10.0, 1e-12);
  }
}

TEST(DressedEnergies, GroundSectorAndInvalidLabels) {
  EXPECT_EQ(dressed_energies({0, 0}, 10.0, 10.0, 0.0), std::vector<double>{0.0});
  EXPECT_THROW(dressed_energies({-1, 0}, 1.0, 1.0, 0.0), Error);
}

TEST(DressedEnergies, AgreeWithNumericHamiltonian) {
  ModelParams p;
  p.g1 = 9.0;
  p.g2 = 4.0;
  p.delta1 = p.delta2 = 1.7;
  for (int n1 = 0; n1 <= 4; ++n1)
    for (int n2 = 0; n2 <= 4; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const auto a = dressed_energies({n1, n2}, p.g1, p.g2, p.delta1);
      const auto n = numeric_sector_energies({n1, n2}, p);
      ASSERT_EQ(a.size(), n.size());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], n[k], 1e-10);
    }
}

TEST(DressedStates, DarkStateWithEqualCouplings) {
  const auto st = dressed_states({1, 1}, 10.0, 10.0, 0.0);
  ASSERT_EQ(st.size(), 3u);
  const DressedState& dark = st[1];
  EXPECT_EQ(dark.branch, Branch::zero);
  EXPECT_NEAR(std::abs(dark.amplitude({AtomicLevel::c, 1, 0}) - 1.0 / kSqrt2), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(dark.amplitude({AtomicLevel::b, 0, 1}) + 1.0 / kSqrt2), 0.0, 1e-14);
  EXPECT_EQ(dark.amplitude({AtomicLevel::a, 1, 1}), Complex(0.0));
}

TEST(DressedStates, JaynesCummingsDoublet) {
  for (int n = 1; n <= 4; ++n) {
    const auto st = dressed_states({n, 0}, 7.0, 3.0, 0.0);
    ASSERT_EQ(st.size(), 2u);
    for (const auto& s : st) {
      const double sign = s.branch == Branch::plus ? 1.0 : -1.0;
      EXPECT_NEAR(std::abs(s.amplitude({AtomicLevel::a, n, 0}) - 1.0 / kSqrt2), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(s.amplitude({AtomicLevel::b, n - 1, 0}) - sign / kSqrt2), 0.0, 1e-14);
      EXPECT_NEAR(s.energy, sign * 7.0 * std::sqrt(double(n)), 1e-12);
    }
  }
}

TEST(DressedStates, OrthonormalEigenvectors) {
  for (PhotonSector s : {PhotonSector{1, 1}, {3, 2}, {0, 4}, {2, 0}}) {
    for (double delta : {0.0, 1.3, -4.0}) {
      const auto st = dressed_states(s, 10.0, 6.0, delta);
      const auto n = static_cast<Index>(st.size());
      DenseMatrix v(n, n);
      for (Index k = 0; k < n; ++k) v.col(k) = st[static_cast<std::size_t>(k)].amplitudes;
      EXPECT_LE((v.adjoint() * v - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
      const DenseMatrix h = sector_hamiltonian(s, 10.0, 6.0, delta, delta);
      for (const auto& d : st) EXPECT_LE((h * d.amplitudes - d.energy * d.amplitudes).norm(), 1e-12);
      for (std::size_t k = 1; k < st.size(); ++k) EXPECT_LE(st[k - 1].energy, st[k].energy);
    }
  }
}

TEST(DressedStates, GeneralDetuningsMatchClosedFormAtResonance) {
  const PhotonSector s{2, 1};
  const auto closed = dressed_states(s, 10.0, 5.0, 0.8);
  const auto general = dressed_states_general(s, 10.0, 5.0, 0.8, 0.8);
  ASSERT_EQ(closed.size(), general.size());
  for (std::size_t k = 0; k < closed.size(); ++k) {
    EXPECT_EQ(closed[k].branch, general[k].branch);
    EXPECT_NEAR(closed[k].energy, general[k].energy, 1e-12);
    EXPECT_NEAR(std::abs(closed[k].amplitudes.dot(general[k].amplitudes)), 1.0, 1e-12);
  }
}

TEST(DriveAmplitude, GroundToSinglePhotonDoublet) {
  const double eta = 1.7;
  const auto ground = dressed_states({0, 0}, 10.0, 10.0, 0.0).front();
  for (const auto& s : dressed_states({1, 0}, 10.0, 10.0, 0.0)) {
    const double sign = s.branch == Branch::plus ? 1.0 : -1.0;
    EXPECT_NEAR(std::abs(drive_transition_amplitude(s, ground, eta) - sign * eta / kSqrt2), 0.0, 1e-14);
  }
}

TEST(DriveAmplitude, MatchesEmbeddedOperatorOverlap) {
  const HilbertSpace space(4, 4);
  ModelParams p;
  p.frame = Frame::laser_frame;
  p.g1 = p.g2 = 0.0;
  p.eta_c1 = 0.9;
  p.eta_c2 = 1.4;
  const DenseMatrix drive = build_hamiltonian(space, p).to_dense();
  const PhotonSector sectors[] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 1}};
  for (const auto& from_s : sectors)
    for (const auto& to_s : sectors)
      for (const auto& from : dressed_states(from_s, 10.0, 8.0, 0.5))
        for (const auto& to : dressed_states(to_s, 10.0, 8.0, 0.5)) {
          const Complex oracle = embed(space, from).dot(drive * embed(space, to));
          EXPECT_NEAR(std::abs(drive_transition_amplitude(from, to, p.eta_c1, p.eta_c2) - oracle), 0.0, 1e-13);
        }
  const auto dark = dressed_states({1, 1}, 10.0, 10.0, 0.0)[1];
  const auto plus = dressed_states({1, 0}, 10.0, 10.0, 0.0)[1];
  EXPECT_NEAR(std::abs(drive_transition_amplitude(dark, plus, 0.0, 2.0) - 1.0), 0.0, 1e-14);
}

TEST(DriveAmplitude, ZeroDriveGivesZero) {
  for (const auto& a : dressed_states({1, 1}, 10.0, 10.0, 0.0))
    for (const auto& b : dressed_states({1, 0}, 10.0, 10.0, 0.0)) EXPECT_EQ(drive_transition_amplitude(a, b, 0.0), Complex(0.0));
}

TEST(DrivenFrame, EnergiesShiftByLaserDetunings) {
  ModelParams p;
  p.frame = Frame::laser_frame;
  p.delta1 = p.delta2 = 0.6;
  p.delta1L = 3.0;
  p.delta2L = -1.0;
  p.g2 = 6.0;
  const HilbertSpace space(4, 4);
  const DenseMatrix h = build_hamiltonian(space, p).to_dense();
  for (PhotonSector s : {PhotonSector{1, 0}, {1, 1}, {2, 1}, {3, 2}}) {
    // The closed form assumes equal cavity detunings.
    const std::vector<BasisState> basis = sector_basis(s);
    const auto n = static_cast<Index>(basis.size());
    DenseMatrix sub(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        sub(r, c) = h(space.index(basis[static_cast<std::size_t>(r)]), space.index(basis[static_cast<std::size_t>(c)]));
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sub, Eigen::EigenvaluesOnly);
    const auto e = driven_frame_energies(s, p);
    for (Index k = 0; k < n; ++k) EXPECT_NEAR(e[static_cast<std::size_t>(k)], es.eigenvalues()(k), 1e-12);
  }
}

TEST(ExpectedFeatures, MultiPhotonResonances) {
  ModelParams p;
  const auto f = expected_scan_features(p);
  EXPECT_NEAR(feature(f, "one_photon_resonance_deltaL").location[0], 10.0, 1e-12);
  EXPECT_NEAR(feature(f, "two_photon_resonance_deltaL").location[0], 10.0 / kSqrt2, 1e-12);
  EXPECT_NEAR(feature(f, "three_photon_resonance_deltaL").location[0], 10.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(feature(f, "two_photon_resonance_deltaL").location[0], 7.1, 0.05);
  EXPECT_NEAR(feature(f, "three_photon_resonance_deltaL").location[0], 6.0, 0.25);
}

TEST(ExpectedFeatures, LinewidthAndPeaks) {
  const auto f = expected_scan_features(ModelParams{});
  EXPECT_NEAR(feature(f, "intensity_linewidth").location[0], 22.0, 1e-12);
  const auto& a = feature(f, "n1_peak_delta1_delta2_a").location;
  EXPECT_NEAR(a[0], 5.0, 1e-12);
  EXPECT_NEAR(a[1], -14.1, 0.05);
  const auto& b = feature(f, "n1_peak_delta1_delta2_b").location;
  EXPECT_NEAR(b[0], -5.0, 1e-12);
  EXPECT_NEAR(b[1], 10.0, 1e-12);
}
