#pragma once

// Truncated joint Hilbert space of a V-type three-level atom and two cavity
// modes, plus a small exact sparse operator type.
//
// Basis ordering: flat = level * (F1 * F2) + n1 * F2 + n2, with level a=0,
// b=1, c=2 and F_i the number of Fock states kept for mode i.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "vcqed/error.hpp"

namespace vcqed {

using Complex = std::complex<double>;
using Index = std::ptrdiff_t;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using CsrMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using CscMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

enum class AtomicLevel : int { a = 0, b = 1, c = 2 };

inline constexpr int kAtomicLevels = 3;

inline char level_name(AtomicLevel level) {
  return static_cast<char>('a' + static_cast<int>(level));
}

struct BasisState {
  AtomicLevel level = AtomicLevel::a;
  int n1 = 0;
  int n2 = 0;

  friend bool operator==(const BasisState&, const BasisState&) = default;
};

class HilbertSpace {
 public:
  HilbertSpace(int fock_states_1, int fock_states_2)
      : fock1_(fock_states_1), fock2_(fock_states_2) {
    if (fock_states_1 < 1 || fock_states_2 < 1) {
      throw Error(ErrorKind::InvalidTruncation,
                  "need at least one Fock state per mode, got (" +
                      std::to_string(fock_states_1) + ", " + std::to_string(fock_states_2) + ")");
    }
  }

  int fock_states_1() const noexcept { return fock1_; }
  int fock_states_2() const noexcept { return fock2_; }
  int fock_states(int mode) const {
    check_mode(mode);
    return mode == 1 ? fock1_ : fock2_;
  }
  /// Dimension of the two-mode field space left after tracing out the atom.
  Index field_dim() const noexcept { return Index(fock1_) * fock2_; }
  Index dim() const noexcept { return kAtomicLevels * field_dim(); }

  bool contains(const BasisState& s) const noexcept {
    return s.n1 >= 0 && s.n1 < fock1_ && s.n2 >= 0 && s.n2 < fock2_ &&
           static_cast<int>(s.level) >= 0 && static_cast<int>(s.level) < kAtomicLevels;
  }

  Index index(const BasisState& s) const {
    if (!contains(s)) {
      throw Error(ErrorKind::InvalidIndex, "basis state outside truncated space");
    }
    return static_cast<int>(s.level) * field_dim() + Index(s.n1) * fock2_ + s.n2;
  }

  BasisState state(Index flat) const {
    if (flat < 0 || flat >= dim()) {
      throw Error(ErrorKind::InvalidIndex, "flat index " + std::to_string(flat) + " out of range");
    }
    const Index field = flat % field_dim();
    return {static_cast<AtomicLevel>(flat / field_dim()), static_cast<int>(field / fock2_),
            static_cast<int>(field % fock2_)};
  }

  static void check_mode(int mode) {
    if (mode != 1 && mode != 2) {
      throw Error(ErrorKind::InvalidIndex, "mode index must be 1 or 2, got " + std::to_string(mode));
    }
  }

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  int fock1_;
  int fock2_;
};

inline HilbertSpace build_space(int fock_states_1, int fock_states_2) {
  return HilbertSpace(fock_states_1, fock_states_2);
}

struct Entry {
  Index row = 0;
  Index col = 0;
  Complex value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Square complex matrix stored as row-major sorted, duplicate-free triples
/// with no explicit zeros.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(Index dim) : dim_(dim) {}

  static SparseOperator from_entries(Index dim, std::vector<Entry> entries) {
    SparseOperator op(dim);
    for (const auto& e : entries) {
      if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim) {
        throw Error(ErrorKind::InvalidIndex, "entry index outside operator dimension");
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    for (const auto& e : entries) {
      if (!op.entries_.empty() && op.entries_.back().row == e.row && op.entries_.back().col == e.col) {
        op.entries_.back().value += e.value;
      } else {
        op.entries_.push_back(e);
      }
    }
    std::erase_if(op.entries_, [](const Entry& e) { return e.value == Complex(0.0, 0.0); });
    return op;
  }

  template <typename SparseMat>
  static SparseOperator from_eigen(const SparseMat& m) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (Index k = 0; k < m.outerSize(); ++k) {
      for (typename SparseMat::InnerIterator it(m, k); it; ++it) {
        entries.push_back({it.row(), it.col(), it.value()});
      }
    }
    return from_entries(m.rows(), std::move(entries));
  }

  static SparseOperator identity(Index dim) {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) entries.push_back({i, i, 1.0});
    return from_entries(dim, std::move(entries));
  }

  Index dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  Complex coeff(Index row, Index col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{row, col, {}},
                               [](const Entry& x, const Entry& y) {
                                 return x.row != y.row ? x.row < y.row : x.col < y.col;
                               });
    return (it != entries_.end() && it->row == row && it->col == col) ? it->value : Complex{};
  }

  CsrMatrix to_csr() const {
    CsrMatrix m(dim_, dim_);
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(entries_.size());
    for (const auto& e : entries_) t.emplace_back(e.row, e.col, e.value);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
  }

  DenseMatrix to_dense() const {
    DenseMatrix m = DenseMatrix::Zero(dim_, dim_);
    for (const auto& e : entries_) m(e.row, e.col) = e.value;
    return m;
  }

  DenseVector apply(const DenseVector& v) const {
    if (v.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "vector size does not match operator");
    DenseVector out = DenseVector::Zero(dim_);
    for (const auto& e : entries_) out(e.row) += e.value * v(e.col);
    return out;
  }

  friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

 private:
  Index dim_ = 0;
  std::vector<Entry> entries_;
};

namespace detail {
inline void require_same_dim(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}
}  // namespace detail

inline SparseOperator add(const SparseOperator& a, const SparseOperator& b) {
  detail::require_same_dim(a, b);
  std::vector<Entry> entries(a.entries());
  entries.insert(entries.end(), b.entries().begin(), b.entries().end());
  return SparseOperator::from_entries(a.dim(), std::move(entries));
}

inline SparseOperator scale(const SparseOperator& a, Complex z) {
  std::vector<Entry> entries(a.entries());
  for (auto& e : entries) e.value *= z;
  return SparseOperator::from_entries(a.dim(), std::move(entries));
}

inline SparseOperator mul(const SparseOperator& a, const SparseOperator& b) {
  detail::require_same_dim(a, b);
  const CsrMatrix prod = a.to_csr() * b.to_csr();
  return SparseOperator::from_eigen(prod);
}

inline SparseOperator adjoint(const SparseOperator& a) {
  std::vector<Entry> entries;
  entries.reserve(a.nnz());
  for (const auto& e : a.entries()) entries.push_back({e.col, e.row, std::conj(e.value)});
  return SparseOperator::from_entries(a.dim(), std::move(entries));
}

inline SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  return add(mul(a, b), scale(mul(b, a), -1.0));
}

inline SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return add(a, b); }
inline SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return add(a, scale(b, -1.0));
}
inline SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) { return mul(a, b); }
inline SparseOperator operator*(Complex z, const SparseOperator& a) { return scale(a, z); }

/// Cavity-mode annihilation operator a_mode; the top Fock state only maps down.
inline SparseOperator annihilation_op(const HilbertSpace& space, int mode) {
  HilbertSpace::check_mode(mode);
  std::vector<Entry> entries;
  for (Index col = 0; col < space.dim(); ++col) {
    BasisState s = space.state(col);
    int& n = mode == 1 ? s.n1 : s.n2;
    if (n == 0) continue;
    const double amp = std::sqrt(static_cast<double>(n));
    --n;
    entries.push_back({space.index(s), col, amp});
  }
  return SparseOperator::from_entries(space.dim(), std::move(entries));
}

inline SparseOperator creation_op(const HilbertSpace& space, int mode) {
  return adjoint(annihilation_op(space, mode));
}

inline SparseOperator number_op(const HilbertSpace& space, int mode) {
  HilbertSpace::check_mode(mode);
  std::vector<Entry> entries;
  for (Index i = 0; i < space.dim(); ++i) {
    const BasisState s = space.state(i);
    entries.push_back({i, i, static_cast<double>(mode == 1 ? s.n1 : s.n2)});
  }
  return SparseOperator::from_entries(space.dim(), std::move(entries));
}

/// |to><from| on the atom, identity on both modes.
inline SparseOperator atomic_transition(const HilbertSpace& space, AtomicLevel to, AtomicLevel from) {
  std::vector<Entry> entries;
  for (int n1 = 0; n1 < space.fock_states_1(); ++n1) {
    for (int n2 = 0; n2 < space.fock_states_2(); ++n2) {
      entries.push_back({space.index({to, n1, n2}), space.index({from, n1, n2}), 1.0});
    }
  }
  return SparseOperator::from_entries(space.dim(), std::move(entries));
}

inline SparseOperator atomic_projector(const HilbertSpace& space, AtomicLevel level) {
  return atomic_transition(space, level, level);
}

/// sigma_1 = |a><b|, sigma_2 = |a><c|.
inline SparseOperator atomic_lowering_op(const HilbertSpace& space, int transition) {
  if (transition != 1 && transition != 2) {
    throw Error(ErrorKind::InvalidIndex,
                "atomic transition index must be 1 or 2, got " + std::to_string(transition));
  }
  return atomic_transition(space, AtomicLevel::a, transition == 1 ? AtomicLevel::b : AtomicLevel::c);
}

inline SparseOperator atomic_raising_op(const HilbertSpace& space, int transition) {
  return adjoint(atomic_lowering_op(space, transition));
}

inline SparseOperator identity_op(const HilbertSpace& space) { return SparseOperator::identity(space.dim()); }

/// Text dump: "dim nnz" header, then one "row col re im" line per entry with
/// 1-based indices and round-trip precision.
inline void write_matrix_market(std::ostream& os, const SparseOperator& op) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%td %zu\n", op.dim(), op.nnz());
  os << buf;
  for (const auto& e : op.entries()) {
    std::snprintf(buf, sizeof buf, "%td %td %.17g %.17g\n", e.row + 1, e.col + 1, e.value.real(),
                  e.value.imag());
    os << buf;
  }
}

inline SparseOperator read_matrix_market(std::istream& is) {
  Index dim = 0;
  std::size_t nnz = 0;
  if (!(is >> dim >> nnz)) throw Error(ErrorKind::Config, "malformed operator dump header");
  std::vector<Entry> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    Index r = 0, c = 0;
    double re = 0, im = 0;
    if (!(is >> r >> c >> re >> im)) throw Error(ErrorKind::Config, "truncated operator dump");
    entries.push_back({r - 1, c - 1, {re, im}});
  }
  return SparseOperator::from_entries(dim, std::move(entries));
}

}  // namespace vcqed
