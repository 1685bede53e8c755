#pragma once

// Dressed states of the coupled atom-cavity Hamiltonian within one photon
// sector (n1, n2), spanned by |a,n1,n2>, |b,n1-1,n2>, |c,n1,n2-1>.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vcqed/model.hpp"
#include "vcqed/params.hpp"

namespace vcqed {

struct PhotonSector {
  int n1 = 0;
  int n2 = 0;

  friend bool operator==(const PhotonSector&, const PhotonSector&) = default;
};

enum class Branch { ground, minus, zero, plus };

inline std::string to_string(Branch b) {
  switch (b) {
    case Branch::ground: return "ground";
    case Branch::minus: return "minus";
    case Branch::zero: return "zero";
    case Branch::plus: return "plus";
  }
  return "unknown";
}

struct DressedState {
  PhotonSector sector;
  Branch branch = Branch::ground;
  double energy = 0.0;
  std::vector<BasisState> basis;  // bare states of the sector
  DenseVector amplitudes;         // coefficients over `basis`

  Complex amplitude(const BasisState& s) const {
    for (std::size_t k = 0; k < basis.size(); ++k)
      if (basis[k] == s) return amplitudes(static_cast<Index>(k));
    return 0.0;
  }
};

/// Bare states of the sector: |a,n1,n2>, then |b,n1-1,n2> if n1 > 0, then
/// |c,n1,n2-1> if n2 > 0.
inline std::vector<BasisState> sector_basis(const PhotonSector& s) {
  if (s.n1 < 0 || s.n2 < 0) throw Error(ErrorKind::InvalidIndex, "photon sector labels must be non-negative");
  std::vector<BasisState> out{{AtomicLevel::a, s.n1, s.n2}};
  if (s.n1 > 0) out.push_back({AtomicLevel::b, s.n1 - 1, s.n2});
  if (s.n2 > 0) out.push_back({AtomicLevel::c, s.n1, s.n2 - 1});
  return out;
}

namespace detail {
inline double bright_coupling(const PhotonSector& s, double g1, double g2) {
  return std::sqrt(s.n1 * g1 * g1 + s.n2 * g2 * g2);
}
}  // namespace detail

/// Ascending energies at two-photon resonance delta1 = delta2 = delta:
/// E0 = -delta, E+- = -delta/2 +- sqrt(delta^2 + 4(n1 g1^2 + n2 g2^2))/2.
inline std::vector<double> dressed_energies(const PhotonSector& s, double g1, double g2, double delta) {
  sector_basis(s);
  if (s.n1 == 0 && s.n2 == 0) return {0.0};
  const double big_g = detail::bright_coupling(s, g1, g2);
  const double root = std::sqrt(delta * delta + 4.0 * big_g * big_g);
  const double em = -0.5 * delta - 0.5 * root;
  const double ep = -0.5 * delta + 0.5 * root;
  if (s.n1 == 0 || s.n2 == 0) return {em, ep};
  std::vector<double> out{em, -delta, ep};
  std::sort(out.begin(), out.end());
  return out;
}

/// Sector Hamiltonian for arbitrary detunings, in the cavity frame.
inline DenseMatrix sector_hamiltonian(const PhotonSector& s, double g1, double g2, double delta1, double delta2) {
  const std::vector<BasisState> basis = sector_basis(s);
  const auto n = static_cast<Index>(basis.size());
  DenseMatrix h = DenseMatrix::Zero(n, n);
  Index k = 1;
  if (s.n1 > 0) {
    h(k, k) = -delta1;
    h(0, k) = h(k, 0) = g1 * std::sqrt(static_cast<double>(s.n1));
    ++k;
  }
  if (s.n2 > 0) {
    h(k, k) = -delta2;
    h(0, k) = h(k, 0) = g2 * std::sqrt(static_cast<double>(s.n2));
  }
  return h;
}

/// Numeric diagonalization for delta1 != delta2. Ascending energy; ties are
/// broken by larger overlap with |a,n1,n2>.
inline std::vector<DressedState> dressed_states_general(const PhotonSector& s, double g1, double g2, double delta1,
                                                        double delta2) {
  const std::vector<BasisState> basis = sector_basis(s);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sector_hamiltonian(s, g1, g2, delta1, delta2));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Eigensolve, "sector eigensolve failed");
  const auto n = static_cast<Index>(basis.size());
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  std::sort(order.begin(), order.end(), [&](Index x, Index y) {
    const double ex = es.eigenvalues()(x), ey = es.eigenvalues()(y);
    if (std::abs(ex - ey) > 1e-12 * (1.0 + std::abs(ex))) return ex < ey;
    return std::abs(es.eigenvectors()(0, x)) > std::abs(es.eigenvectors()(0, y));
  });
  const Branch labels3[] = {Branch::minus, Branch::zero, Branch::plus};
  const Branch labels2[] = {Branch::minus, Branch::plus};
  std::vector<DressedState> out;
  for (Index r = 0; r < n; ++r) {
    const Index k = order[static_cast<std::size_t>(r)];
    const Branch b = n == 1 ? Branch::ground : (n == 2 ? labels2[r] : labels3[r]);
    out.push_back({s, b, es.eigenvalues()(k), basis, es.eigenvectors().col(k)});
  }
  return out;
}

/// Dressed states at two-photon resonance, ordered minus, zero, plus (or
/// the single ground state for sector (0,0)).
inline std::vector<DressedState> dressed_states(const PhotonSector& s, double g1, double g2, double delta) {
  const std::vector<BasisState> basis = sector_basis(s);
  const auto n = static_cast<Index>(basis.size());
  std::vector<DressedState> out;
  if (n == 1) {
    out.push_back({s, Branch::ground, 0.0, basis, DenseVector::Ones(1)});
    return out;
  }
  const double c1 = g1 * std::sqrt(static_cast<double>(s.n1));
  const double c2 = g2 * std::sqrt(static_cast<double>(s.n2));
  const double big_g = std::hypot(c1, c2);
  if (big_g == 0.0) return dressed_states_general(s, g1, g2, delta, delta);
  // Bright combination of the excited bare states.
  DenseVector bright = DenseVector::Zero(n);
  Index k = 1;
  if (s.n1 > 0) bright(k++) = c1 / big_g;
  if (s.n2 > 0) bright(k) = c2 / big_g;
  DenseVector ground = DenseVector::Zero(n);
  ground(0) = 1.0;
  for (double e : {-0.5 * delta - 0.5 * std::sqrt(delta * delta + 4.0 * big_g * big_g),
                   -0.5 * delta + 0.5 * std::sqrt(delta * delta + 4.0 * big_g * big_g)}) {
    DenseVector v = (big_g * ground + e * bright) / std::hypot(big_g, e);
    out.push_back({s, e < -0.5 * delta ? Branch::minus : Branch::plus, e, basis, v});
  }
  if (n == 3) {
    DenseVector dark = DenseVector::Zero(3);
    dark(1) = -c2 / big_g;
    dark(2) = c1 / big_g;
    out.insert(out.begin() + 1, DressedState{s, Branch::zero, -delta, basis, dark});
  }
  return out;
}

/// Sector eigenvalues of the full numeric cavity-frame Hamiltonian.
inline std::vector<double> numeric_sector_energies(const PhotonSector& s, const ModelParams& p) {
  ModelParams q = p;
  q.frame = Frame::cavity_frame;
  q.eta_c1 = q.eta_c2 = 0.0;
  q.fock_states_1 = std::max(q.fock_states_1, s.n1 + 1);
  q.fock_states_2 = std::max(q.fock_states_2, s.n2 + 1);
  const HilbertSpace space(q.fock_states_1, q.fock_states_2);
  const DenseMatrix h = build_hamiltonian(space, q).to_dense();
  const std::vector<BasisState> basis = sector_basis(s);
  const auto n = static_cast<Index>(basis.size());
  DenseMatrix sub(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      sub(r, c) = h(space.index(basis[static_cast<std::size_t>(r)]), space.index(basis[static_cast<std::size_t>(c)]));
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

/// Laser-frame sector energies: cavity-frame energies shifted by
/// n1 delta1L + n2 delta2L.
inline std::vector<double> driven_frame_energies(const PhotonSector& s, const ModelParams& p) {
  std::vector<double> e = dressed_energies(s, p.g1, p.g2, p.delta1);
  for (double& v : e) v += s.n1 * p.delta1L + s.n2 * p.delta2L;
  return e;
}

/// <from| eta_c1 (sigma1 + h.c.) + eta_c2 (sigma2 + h.c.) |to>.
inline Complex drive_transition_amplitude(const DressedState& from, const DressedState& to, double eta_c1,
                                          double eta_c2) {
  Complex acc = 0.0;
  for (std::size_t r = 0; r < from.basis.size(); ++r) {
    for (std::size_t c = 0; c < to.basis.size(); ++c) {
      const BasisState& bra = from.basis[r];
      const BasisState& ket = to.basis[c];
      if (bra.n1 != ket.n1 || bra.n2 != ket.n2) continue;
      double v = 0.0;
      const auto pair = [&](AtomicLevel x, AtomicLevel y) {
        return (bra.level == x && ket.level == y) || (bra.level == y && ket.level == x);
      };
      if (pair(AtomicLevel::a, AtomicLevel::b)) v = eta_c1;
      if (pair(AtomicLevel::a, AtomicLevel::c)) v = eta_c2;
      acc += std::conj(from.amplitudes(static_cast<Index>(r))) * v * to.amplitudes(static_cast<Index>(c));
    }
  }
  return acc;
}

inline Complex drive_transition_amplitude(const DressedState& from, const DressedState& to, double eta_c) {
  return drive_transition_amplitude(from, to, eta_c, eta_c);
}

struct ScanFeature {
  std::string name;
  std::vector<double> location;
};

/// Predicted feature locations for annotating and testing scans.
inline std::vector<ScanFeature> expected_scan_features(const ModelParams& p) {
  std::vector<ScanFeature> out;
  const double g = p.g1;
  // Multi-photon resonances |a,0,0> -> lower dressed state of the sector
  // with equal laser detunings.
  const PhotonSector sectors[] = {{1, 0}, {2, 0}, {2, 1}};
  const char* names[] = {"one_photon_resonance_deltaL", "two_photon_resonance_deltaL",
                         "three_photon_resonance_deltaL"};
  for (int k = 0; k < 3; ++k) {
    const double lower = dressed_energies(sectors[k], p.g1, p.g2, p.delta1).front();
    out.push_back({names[k], {-lower / (sectors[k].n1 + sectors[k].n2)}});
  }
  out.push_back({"n1_peak_delta1_delta2_a", {g / 2.0, -std::sqrt(2.0) * g}});
  out.push_back({"n1_peak_delta1_delta2_b", {-g / 2.0, g}});
  out.push_back({"n2_peak_delta1_delta2_a", {-std::sqrt(2.0) * g, g / 2.0}});
  out.push_back({"n2_peak_delta1_delta2_b", {g, -g / 2.0}});
  out.push_back({"intensity_linewidth", {2.0 * g + p.gamma1 + p.kappa1}});
  out.push_back({"vacuum_rabi_frequency", {2.0 * g}});
  out.push_back({"two_photon_sector_frequency", {std::sqrt(2.0) * g}});
  return out;
}

}  // namespace vcqed
