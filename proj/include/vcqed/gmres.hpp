#pragma once

// Restarted GMRES with right preconditioning for complex vectors.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "vcqed/hilbert.hpp"

namespace vcqed {

struct GmresOptions {
  double rel_tol = 1e-13;
  std::size_t restart = 120;
  std::size_t max_iterations = 4000;
};

struct GmresResult {
  DenseVector x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

using VectorMap = std::function<DenseVector(const DenseVector&)>;

/// Solves A x = b where A is given as an action; `precond` approximates A^{-1}.
inline GmresResult gmres(const VectorMap& apply_a, const VectorMap& precond, const DenseVector& b,
                         const GmresOptions& opt = {}) {
  const Index n = b.size();
  const double b_norm = b.norm();
  GmresResult out;
  out.x = DenseVector::Zero(n);
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }
  const auto m = static_cast<Index>(opt.restart);
  while (out.iterations < opt.max_iterations) {
    DenseVector r = b - apply_a(out.x);
    double beta = r.norm();
    out.relative_residual = beta / b_norm;
    if (out.relative_residual <= opt.rel_tol) {
      out.converged = true;
      return out;
    }
    std::vector<DenseVector> basis;
    basis.reserve(static_cast<std::size_t>(m) + 1);
    basis.push_back(r / beta);
    DenseMatrix hess = DenseMatrix::Zero(m + 1, m);
    std::vector<Complex> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
    DenseVector g = DenseVector::Zero(m + 1);
    g(0) = beta;
    Index j = 0;
    for (; j < m && out.iterations < opt.max_iterations; ++j) {
      ++out.iterations;
      DenseVector w = apply_a(precond(basis[static_cast<std::size_t>(j)]));
      // Modified Gram-Schmidt, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i <= j; ++i) {
          const Complex h = basis[static_cast<std::size_t>(i)].dot(w);
          hess(i, j) += h;
          w -= h * basis[static_cast<std::size_t>(i)];
        }
      }
      const double h_next = w.norm();
      hess(j + 1, j) = h_next;
      for (Index i = 0; i < j; ++i) {
        const Complex c = cs[static_cast<std::size_t>(i)];
        const Complex s = sn[static_cast<std::size_t>(i)];
        const Complex t = std::conj(c) * hess(i, j) + std::conj(s) * hess(i + 1, j);
        hess(i + 1, j) = -s * hess(i, j) + c * hess(i + 1, j);
        hess(i, j) = t;
      }
      const Complex x0 = hess(j, j);
      const Complex x1 = hess(j + 1, j);
      const double den = std::sqrt(std::norm(x0) + std::norm(x1));
      const Complex c = den == 0.0 ? Complex(1.0) : x0 / den;
      const Complex s = den == 0.0 ? Complex(0.0) : x1 / den;
      cs[static_cast<std::size_t>(j)] = c;
      sn[static_cast<std::size_t>(j)] = s;
      hess(j, j) = den;
      hess(j + 1, j) = 0.0;
      g(j + 1) = -s * g(j);
      g(j) = std::conj(c) * g(j);
      out.relative_residual = std::abs(g(j + 1)) / b_norm;
      if (h_next == 0.0 || out.relative_residual <= opt.rel_tol) {
        ++j;
        break;
      }
      basis.push_back(w / h_next);
    }
    // Back substitution on the leading j x j triangle.
    DenseVector y = hess.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    DenseVector update = DenseVector::Zero(n);
    for (Index i = 0; i < j; ++i) update += y(i) * basis[static_cast<std::size_t>(i)];
    out.x += precond(update);
  }
  const DenseVector r = b - apply_a(out.x);
  out.relative_residual = r.norm() / b_norm;
  out.converged = out.relative_residual <= opt.rel_tol;
  return out;
}

}  // namespace vcqed
