#pragma once

// Two-mode field entanglement via the Peres-Horodecki partial transpose.

#include <Eigen/Eigenvalues>
#include <vector>

#include "vcqed/hilbert.hpp"

namespace vcqed {

struct ReducedFieldState {
  int fock1 = 0;
  int fock2 = 0;
  DenseMatrix rho;  // indexed by n1 * fock2 + n2

  Index dim() const noexcept { return Index(fock1) * fock2; }
  Index index(int n1, int n2) const noexcept { return Index(n1) * fock2 + n2; }
};

inline ReducedFieldState trace_out_atom(const HilbertSpace& space, const DenseMatrix& rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "joint state dimension");
  }
  ReducedFieldState out{space.fock_states_1(), space.fock_states_2(), {}};
  const Index f = space.field_dim();
  out.rho = DenseMatrix::Zero(f, f);
  for (int level = 0; level < 3; ++level) out.rho += rho.block(level * f, level * f, f, f);
  return out;
}

/// |n1 n2><m1 m2| -> |n1 m2><m1 n2| for mode 2, |m1 n2><n1 m2| for mode 1.
inline DenseMatrix partial_transpose(const ReducedFieldState& s, int mode) {
  HilbertSpace::check_mode(mode);
  if (s.rho.rows() != s.dim() || s.rho.cols() != s.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "reduced state dimension");
  }
  DenseMatrix out(s.dim(), s.dim());
  for (int n1 = 0; n1 < s.fock1; ++n1)
    for (int n2 = 0; n2 < s.fock2; ++n2)
      for (int m1 = 0; m1 < s.fock1; ++m1)
        for (int m2 = 0; m2 < s.fock2; ++m2) {
          const Complex v = s.rho(s.index(n1, n2), s.index(m1, m2));
          if (mode == 2) {
            out(s.index(n1, m2), s.index(m1, n2)) = v;
          } else {
            out(s.index(m1, n2), s.index(n1, m2)) = v;
          }
        }
  return out;
}

struct WitnessResult {
  double min_eigenvalue = 0.0;
  int transposed_mode = 2;
  bool entangled = false;
  double tolerance = 1e-8;
  std::vector<double> spectrum;  // ascending
  double spectrum_sum = 0.0;
};

inline WitnessResult witness(const ReducedFieldState& s, int mode = 2, double tolerance = 1e-8) {
  const DenseMatrix pt = partial_transpose(s, mode);
  const DenseMatrix herm = 0.5 * (pt + pt.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Eigensolve, "partial-transpose eigensolve failed");
  WitnessResult w;
  w.transposed_mode = mode;
  w.tolerance = tolerance;
  w.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double v : w.spectrum) w.spectrum_sum += v;
  w.min_eigenvalue = w.spectrum.front();
  w.entangled = w.min_eigenvalue < -tolerance;
  return w;
}

inline WitnessResult witness(const HilbertSpace& space, const DenseMatrix& rho_joint, int mode = 2,
                             double tolerance = 1e-8) {
  return witness(trace_out_atom(space, rho_joint), mode, tolerance);
}

}  // namespace vcqed
