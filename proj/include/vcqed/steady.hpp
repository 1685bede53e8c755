#pragma once

// Steady states of the Lindblad generator with physicality diagnostics.

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcqed/gmres.hpp"
#include "vcqed/model.hpp"
#include "vcqed/propagator.hpp"

namespace vcqed {

enum class SteadyMethod { linear_solve, time_marching };

inline std::string to_string(SteadyMethod m) {
  return m == SteadyMethod::linear_solve ? "linear_solve" : "time_marching";
}

/// Gates applied to every returned state.
struct PhysicalityTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
};

struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;        // |tr rho - 1|
  double min_eigenvalue = 0.0;

  bool physical(const PhysicalityTolerance& tol = {}) const {
    return hermiticity_error <= tol.hermiticity && trace_error <= tol.trace && min_eigenvalue >= tol.min_eigenvalue;
  }
};

inline StateDiagnostics diagnose(const DenseMatrix& rho) {
  StateDiagnostics d;
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  const DenseMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Eigensolve, "state spectrum did not converge");
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

struct SteadyStateResult {
  DenseMatrix rho;
  double residual = 0.0;  // Frobenius norm of L(rho)
  SteadyMethod method = SteadyMethod::linear_solve;
  std::size_t iterations = 0;   // integrator steps or GMRES iterations; 0 for sparse LU
  std::size_t subspace_dim = 0; // size of the invariant block actually solved
  double raw_hermiticity_error = 0.0;
  StateDiagnostics diagnostics;
};

inline nlohmann::ordered_json to_json(const SteadyStateResult& r) {
  nlohmann::ordered_json j;
  j["method"] = to_string(r.method);
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["subspace_dim"] = r.subspace_dim;
  j["min_eigenvalue"] = r.diagnostics.min_eigenvalue;
  j["trace_error"] = r.diagnostics.trace_error;
  j["hermiticity_error"] = r.raw_hermiticity_error;
  return j;
}

struct SteadyOptions {
  double tol = 1e-9;           // residual tolerance on ||L(rho)||_F
  bool reduce = true;          // solve only on the block reachable from the seed state
  BasisState seed{};           // |a,0,0> by default
  PhysicalityTolerance gates{};
  // Time-marching controls.
  double t_max = 2000.0;
  double check_interval = 1.0;
  PropagatorOptions propagator{};
  // Blocks larger than this are solved iteratively instead of by sparse LU.
  Index direct_limit = 4096;
  GmresOptions gmres{};
};

namespace detail {

inline DenseMatrix finish_state(DenseMatrix rho, double& raw_herm) {
  raw_herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return rho;
}

inline void enforce_gates(const SteadyStateResult& r, const SteadyOptions& opt) {
  if (!r.diagnostics.physical(opt.gates)) {
    throw Error(ErrorKind::Physicality,
                "steady state failed physicality gates (trace error " + std::to_string(r.diagnostics.trace_error) +
                    ", min eigenvalue " + std::to_string(r.diagnostics.min_eigenvalue) + ")");
  }
}

}  // namespace detail

/// Generator restricted to an invariant coordinate block of vec(rho); the
/// full space when no explicit matrix is available or reduction is off.
class BlockGenerator {
 public:
  BlockGenerator(const Liouvillian& l, const DenseVector& seed, bool reduce) : l_(&l) {
    const Index n = l.dim();
    if (l.has_matrix()) {
      if (reduce) {
        std::vector<Index> seeds;
        for (Index i = 0; i < n; ++i)
          if (seed(i) != Complex(0.0, 0.0)) seeds.push_back(i);
        support_ = invariant_support(l.matrix(), seeds);
      } else {
        support_.resize(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) support_[static_cast<std::size_t>(i)] = i;
      }
      block_ = restrict_to(l.matrix(), support_);
      block_csr_ = block_;
    }
  }

  bool matrix_free() const noexcept { return !l_->has_matrix(); }
  Index size() const noexcept { return matrix_free() ? l_->dim() : static_cast<Index>(support_.size()); }
  const std::vector<Index>& support() const noexcept { return support_; }
  const CscMatrix& block() const noexcept { return block_; }

  DenseVector gather(const DenseVector& full) const {
    if (matrix_free()) return full;
    DenseVector out(size());
    for (std::size_t k = 0; k < support_.size(); ++k) out(static_cast<Index>(k)) = full(support_[k]);
    return out;
  }

  DenseVector scatter(const DenseVector& part) const {
    if (matrix_free()) return part;
    DenseVector out = DenseVector::Zero(l_->dim());
    for (std::size_t k = 0; k < support_.size(); ++k) out(support_[k]) = part(static_cast<Index>(k));
    return out;
  }

  void apply(const DenseVector& in, DenseVector& out) const {
    if (matrix_free()) {
      out = l_->apply(in);
    } else {
      out.noalias() = block_csr_ * in;
    }
  }

  LinearAction action() const {
    return [this](const DenseVector& in, DenseVector& out) { apply(in, out); };
  }

 private:
  const Liouvillian* l_;
  std::vector<Index> support_;
  CscMatrix block_;
  CsrMatrix block_csr_;
};

inline DenseMatrix basis_projector(const HilbertSpace& space, const BasisState& s) {
  DenseMatrix rho = DenseMatrix::Zero(space.dim(), space.dim());
  const Index i = space.index(s);
  rho(i, i) = 1.0;
  return rho;
}

inline double residual_norm(const Liouvillian& l, const DenseMatrix& rho) { return l.apply(rho).norm(); }

/// Exact inverse of the no-jump part rho -> -i(H_eff rho - rho H_eff^dag) - shift*rho,
/// with H_eff = H - (i/2) sum_k r_k X_k^dag X_k, applied in the eigenbasis of H_eff.
class NoJumpInverse {
 public:
  NoJumpInverse(const Liouvillian& l, double shift) {
    DenseMatrix h_eff = DenseMatrix(l.hamiltonian());
    for (const auto& c : l.channels()) {
      h_eff -= Complex(0.0, 0.5 * c.rate) * mul(adjoint(c.jump), c.jump).to_dense();
    }
    Eigen::ComplexEigenSolver<DenseMatrix> es(h_eff);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::Eigensolve, "effective Hamiltonian eigensolve failed");
    v_ = es.eigenvectors();
    v_inv_ = v_.inverse();
    const DenseVector lambda = es.eigenvalues();
    const Index d = lambda.size();
    inv_denominator_.resize(d, d);
    for (Index k = 0; k < d; ++k)
      for (Index q = 0; q < d; ++q)
        inv_denominator_(k, q) = 1.0 / (Complex(0.0, -1.0) * (lambda(k) - std::conj(lambda(q))) - shift);
  }

  DenseMatrix apply(const DenseMatrix& r) const {
    DenseMatrix y = v_inv_ * r * v_inv_.adjoint();
    y = y.cwiseProduct(inv_denominator_);
    return v_ * y * v_.adjoint();
  }

 private:
  DenseMatrix v_;
  DenseMatrix v_inv_;
  DenseMatrix inv_denominator_;
};

/// Propagates `rho0` until ||L(rho)|| <= tol or t_max is reached.
inline SteadyStateResult time_march_to_steady(const Liouvillian& l, const DenseMatrix& rho0,
                                              const SteadyOptions& opt = {}) {
  const Index d = l.hilbert_dim();
  if (rho0.rows() != d || rho0.cols() != d) throw Error(ErrorKind::DimensionMismatch, "initial state dimension");
  const DenseVector x0 = vectorize(rho0);
  const BlockGenerator gen(l, x0, opt.reduce);
  DenseVector y = gen.gather(x0);
  DenseVector dy(y.size());
  PropagatorStats stats;
  double t = 0.0;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    gen.apply(y, dy);
    const double res = dy.norm();
    best = std::min(best, res);
    if (res <= opt.tol) break;
    if (t >= opt.t_max) {
      throw SolverError(ErrorKind::Timeout, "time marching reached t_max without convergence", best);
    }
    const double step = std::min(opt.check_interval, opt.t_max - t);
    y = integrate(gen.action(), y, {step}, nullptr, opt.propagator, &stats);
    t += step;
  }
  SteadyStateResult r;
  r.method = SteadyMethod::time_marching;
  r.iterations = stats.accepted;
  r.subspace_dim = static_cast<std::size_t>(gen.size());
  r.rho = detail::finish_state(unvectorize(gen.scatter(y), d), r.raw_hermiticity_error);
  r.residual = residual_norm(l, r.rho);
  r.diagnostics = diagnose(r.rho);
  detail::enforce_gates(r, opt);
  return r;
}

namespace detail {

// Sparse LU of the block with its last equation replaced by tr(rho) = 1.
inline DenseVector trace_pinned_direct_solve(const BlockGenerator& gen, Index d) {
  const std::vector<Index>& support = gen.support();
  const Index n = gen.size();
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(gen.block().nonZeros()) + static_cast<std::size_t>(d));
  for (Index k = 0; k < gen.block().outerSize(); ++k) {
    for (CscMatrix::InnerIterator it(gen.block(), k); it; ++it) {
      if (it.row() != n - 1) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index k = 0; k < n; ++k) {
    const Index full = support[static_cast<std::size_t>(k)];
    if (full % d == full / d) t.emplace_back(n - 1, k, Complex(1.0, 0.0));
  }
  CscMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();

  Eigen::SparseLU<CscMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorKind::AmbiguousSteadyState,
                "trace-pinned generator is singular: steady state is not unique (" + lu.lastErrorMessage() + ")");
  }
  DenseVector rhs = DenseVector::Zero(n);
  rhs(n - 1) = 1.0;
  DenseVector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorKind::AmbiguousSteadyState, "steady-state solve produced a non-finite state");
  }
  return gen.scatter(x);
}

// Solves L(rho) + tr(rho) W = W with W = 1/d, whose unique solution is the
// normalized steady state whenever that is unique. Right-preconditioned by
// the inverse of the no-jump evolution, shifted by 1e-6 times the largest rate.
inline DenseVector iterative_solve(const Liouvillian& l, const GmresOptions& opt, std::size_t& iterations) {
  const Index d = l.hilbert_dim();
  double max_rate = 0.0;
  for (const auto& c : l.channels()) max_rate = std::max(max_rate, c.rate);
  const NoJumpInverse pre(l, 1e-6 * std::max(max_rate, 1.0));
  const DenseMatrix w = DenseMatrix::Identity(d, d) / static_cast<double>(d);
  auto apply_a = [&](const DenseVector& v) {
    const DenseMatrix rho = unvectorize(v, d);
    return vectorize(l.apply(rho) + rho.trace() * w);
  };
  auto precond = [&](const DenseVector& v) { return vectorize(pre.apply(unvectorize(v, d))); };
  const GmresResult res = gmres(apply_a, precond, vectorize(w), opt);
  iterations = res.iterations;
  if (!res.converged || !res.x.allFinite()) {
    throw SolverError(ErrorKind::NonConvergence, "preconditioned GMRES did not converge", res.relative_residual);
  }
  return res.x;
}

}  // namespace detail

/// Steady state reached from the seed state. Small invariant blocks are
/// solved directly by sparse LU with the trace condition pinned into the last
/// row; large blocks, or generators too large to hold explicitly, use
/// preconditioned GMRES.
inline SteadyStateResult steady_state(const Liouvillian& l, const SteadyOptions& opt = {}) {
  const Index d = l.hilbert_dim();
  const DenseMatrix rho0 = basis_projector(l.space(), opt.seed);

  SteadyStateResult r;
  r.method = SteadyMethod::linear_solve;
  DenseVector x;
  std::optional<BlockGenerator> gen;
  if (l.has_matrix()) gen.emplace(l, vectorize(rho0), opt.reduce);
  if (gen && gen->size() <= opt.direct_limit) {
    r.subspace_dim = static_cast<std::size_t>(gen->size());
    x = detail::trace_pinned_direct_solve(*gen, d);
  } else {
    r.subspace_dim = static_cast<std::size_t>(l.dim());
    x = detail::iterative_solve(l, opt.gmres, r.iterations);
  }
  r.rho = detail::finish_state(unvectorize(x, d), r.raw_hermiticity_error);
  r.residual = residual_norm(l, r.rho);
  if (!(r.residual <= opt.tol)) {
    throw SolverError(ErrorKind::NonConvergence, "steady-state residual above tolerance", r.residual);
  }
  r.diagnostics = diagnose(r.rho);
  detail::enforce_gates(r, opt);
  return r;
}

/// Trace distance (1/2) ||a - b||_1 between Hermitian matrices.
inline double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix diff = 0.5 * ((a - b) + (a - b).adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace vcqed
