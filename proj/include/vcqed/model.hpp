#pragma once

// Rotating-frame Hamiltonian, Lindblad channels and the Liouvillian.
//
// Every channel (rate, X) contributes rate * (X rho X^dag - {X^dag X, rho}/2),
// which is the same generator as (rate/2) * [2 X rho X^dag - {X^dag X, rho}].
// Density matrices are vectorized by stacking columns:
// vec(A rho B) = (B^T kron A) vec(rho).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vcqed/hilbert.hpp"
#include "vcqed/params.hpp"

namespace vcqed {

inline SparseOperator build_hamiltonian(const HilbertSpace& space, const ModelParams& p) {
  validate(p);
  const auto a1 = annihilation_op(space, 1);
  const auto a2 = annihilation_op(space, 2);
  const auto s1 = atomic_lowering_op(space, 1);
  const auto s2 = atomic_lowering_op(space, 2);
  const auto pb = atomic_projector(space, AtomicLevel::b);
  const auto pc = atomic_projector(space, AtomicLevel::c);

  const SparseOperator coupling1 = mul(a1, adjoint(s1));
  const SparseOperator coupling2 = mul(a2, adjoint(s2));
  SparseOperator h = scale(coupling1 + adjoint(coupling1), p.g1) + scale(coupling2 + adjoint(coupling2), p.g2);

  if (p.frame == Frame::cavity_frame) {
    h = h + scale(pb, -p.delta1) + scale(pc, -p.delta2);
  } else {
    h = h + scale(pb, p.Delta_b()) + scale(pc, p.Delta_c()) + scale(number_op(space, 1), p.delta1L) +
        scale(number_op(space, 2), p.delta2L) + scale(s1 + adjoint(s1), p.eta_c1) +
        scale(s2 + adjoint(s2), p.eta_c2);
  }
  return h;
}

struct Channel {
  std::string name;
  double rate = 0.0;
  SparseOperator jump;
};

/// Cavity loss, atomic decay and incoherent pumping; zero-rate channels are
/// dropped.
inline std::vector<Channel> build_dissipators(const HilbertSpace& space, const ModelParams& p) {
  validate(p);
  std::vector<Channel> out;
  auto push = [&](const char* name, double rate, auto make) {
    if (rate != 0.0) out.push_back({name, rate, make()});
  };
  push("kappa1", p.kappa1, [&] { return annihilation_op(space, 1); });
  push("kappa2", p.kappa2, [&] { return annihilation_op(space, 2); });
  push("gamma1", p.gamma1, [&] { return atomic_lowering_op(space, 1); });
  push("gamma2", p.gamma2, [&] { return atomic_lowering_op(space, 2); });
  push("eta_ic1", p.eta_ic1, [&] { return atomic_raising_op(space, 1); });
  push("eta_ic2", p.eta_ic2, [&] { return atomic_raising_op(space, 2); });
  return out;
}

/// Largest superoperator side for which the explicit sparse matrix is built.
inline constexpr Index kDefaultSuperopBudget = Index(1) << 24;

namespace detail {

// Appends (B^T kron A) * factor to the triplet list, with d the side of A and B.
inline void kron_bt_a(std::vector<Eigen::Triplet<Complex>>& out, const SparseOperator& b, const SparseOperator& a,
                      Complex factor) {
  const Index d = a.dim();
  for (const auto& eb : b.entries()) {
    // B(p,q) sits at block (q,p) of B^T.
    const Index block_row = eb.col;
    const Index block_col = eb.row;
    for (const auto& ea : a.entries()) {
      out.emplace_back(block_row * d + ea.row, block_col * d + ea.col, factor * eb.value * ea.value);
    }
  }
}

}  // namespace detail

class Liouvillian {
 public:
  Liouvillian(HilbertSpace space, SparseOperator hamiltonian, std::vector<Channel> channels,
              Index superop_budget = kDefaultSuperopBudget)
      : space_(space), h_(hamiltonian.to_csr()), channels_(std::move(channels)) {
    if (hamiltonian.dim() != space.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "Hamiltonian does not match Hilbert space");
    }
    for (const auto& c : channels_) {
      if (c.jump.dim() != space.dim()) throw Error(ErrorKind::DimensionMismatch, "jump operator dimension");
      jumps_.push_back(c.jump.to_csr());
      jump_products_.push_back(mul(adjoint(c.jump), c.jump).to_csr());
    }
    const Index d = space.dim();
    if (d * d <= superop_budget) matrix_ = assemble(hamiltonian);
  }

  const HilbertSpace& space() const noexcept { return space_; }
  Index hilbert_dim() const noexcept { return space_.dim(); }
  Index dim() const noexcept { return space_.dim() * space_.dim(); }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const CsrMatrix& hamiltonian() const noexcept { return h_; }

  bool has_matrix() const noexcept { return matrix_.has_value(); }
  /// Explicit superoperator acting on column-stacked density matrices.
  const CscMatrix& matrix() const {
    if (!matrix_) throw Error(ErrorKind::Config, "superoperator exceeds memory budget; use apply()");
    return *matrix_;
  }

  /// Matrix-free L(rho).
  DenseMatrix apply(const DenseMatrix& rho) const {
    const Index d = hilbert_dim();
    if (rho.rows() != d || rho.cols() != d) {
      throw Error(ErrorKind::DimensionMismatch, "density matrix does not match Liouvillian");
    }
    const Complex minus_i(0.0, -1.0);
    DenseMatrix out = minus_i * (h_ * rho);
    out.noalias() -= minus_i * (rho * h_);
    for (std::size_t k = 0; k < channels_.size(); ++k) {
      const double r = channels_[k].rate;
      const CsrMatrix& x = jumps_[k];
      const CsrMatrix& xdx = jump_products_[k];
      DenseMatrix x_rho = x * rho;
      out.noalias() += r * (x_rho * x.adjoint());
      out.noalias() -= (0.5 * r) * (xdx * rho);
      out.noalias() -= (0.5 * r) * (rho * xdx);
    }
    return out;
  }

  DenseVector apply(const DenseVector& vec_rho) const {
    const Index d = hilbert_dim();
    if (vec_rho.size() != d * d) throw Error(ErrorKind::DimensionMismatch, "vectorized state size");
    const DenseMatrix rho = Eigen::Map<const DenseMatrix>(vec_rho.data(), d, d);
    const DenseMatrix out = apply(rho);
    return Eigen::Map<const DenseVector>(out.data(), d * d);
  }

 private:
  CscMatrix assemble(const SparseOperator& h) const {
    const Index d = hilbert_dim();
    const SparseOperator id = SparseOperator::identity(d);
    std::vector<Eigen::Triplet<Complex>> t;
    const Complex minus_i(0.0, -1.0);
    detail::kron_bt_a(t, id, h, minus_i);   // -i H rho
    detail::kron_bt_a(t, h, id, -minus_i);  // +i rho H
    for (const auto& c : channels_) {
      const SparseOperator xdx = mul(adjoint(c.jump), c.jump);
      detail::kron_bt_a(t, adjoint(c.jump), c.jump, c.rate);
      detail::kron_bt_a(t, id, xdx, -0.5 * c.rate);
      detail::kron_bt_a(t, xdx, id, -0.5 * c.rate);
    }
    CscMatrix m(d * d, d * d);
    m.setFromTriplets(t.begin(), t.end());
    m.prune(Complex(0.0, 0.0), 0.0);
    m.makeCompressed();
    return m;
  }

  HilbertSpace space_;
  CsrMatrix h_;
  std::vector<Channel> channels_;
  std::vector<CsrMatrix> jumps_;
  std::vector<CsrMatrix> jump_products_;
  std::optional<CscMatrix> matrix_;
};

inline Liouvillian build_liouvillian(const ModelParams& p, Index superop_budget = kDefaultSuperopBudget) {
  validate(p);
  const HilbertSpace space(p.fock_states_1, p.fock_states_2);
  return Liouvillian(space, build_hamiltonian(space, p), build_dissipators(space, p), superop_budget);
}

inline Index vec_index(Index d, Index row, Index col) noexcept { return col * d + row; }

inline DenseVector vectorize(const DenseMatrix& m) {
  return Eigen::Map<const DenseVector>(m.data(), m.size());
}

inline DenseMatrix unvectorize(const DenseVector& v, Index d) {
  if (v.size() != d * d) throw Error(ErrorKind::DimensionMismatch, "vector length is not d^2");
  return Eigen::Map<const DenseMatrix>(v.data(), d, d);
}

/// Indices of the smallest coordinate subspace that contains `seeds` and is
/// mapped into itself by the superoperator, found from the sparsity pattern.
inline std::vector<Index> invariant_support(const CscMatrix& m, const std::vector<Index>& seeds) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m.rows()), 0);
  std::vector<Index> stack;
  for (Index s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const Index col = stack.back();
    stack.pop_back();
    for (CscMatrix::InnerIterator it(m, col); it; ++it) {
      if (!seen[it.row()]) {
        seen[it.row()] = 1;
        stack.push_back(it.row());
      }
    }
  }
  std::vector<Index> out;
  for (Index i = 0; i < m.rows(); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

/// Rows and columns of `m` restricted to `support` (sorted ascending).
inline CscMatrix restrict_to(const CscMatrix& m, const std::vector<Index>& support) {
  std::vector<Index> position(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t k = 0; k < support.size(); ++k) position[support[k]] = static_cast<Index>(k);
  std::vector<Eigen::Triplet<Complex>> t;
  for (std::size_t k = 0; k < support.size(); ++k) {
    for (CscMatrix::InnerIterator it(m, support[k]); it; ++it) {
      const Index r = position[it.row()];
      if (r >= 0) t.emplace_back(r, static_cast<Index>(k), it.value());
    }
  }
  const auto n = static_cast<Index>(support.size());
  CscMatrix out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace vcqed
