#pragma once

// Steady-state scalar observables.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vcqed/dynamics.hpp"
#include "vcqed/steady.hpp"

namespace vcqed {

/// Tr[O rho].
inline Complex expectation(const DenseMatrix& rho, const SparseOperator& op) {
  if (rho.rows() != op.dim() || rho.cols() != op.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "operator and state dimensions differ");
  }
  Complex acc = 0.0;
  for (const auto& e : op.entries()) acc += e.value * rho(e.col, e.row);
  return acc;
}

/// <a_i^dag a_j^dag a_j a_i> / (<n_i><n_j>); for i == j this is <n(n-1)>/<n>^2.
inline double equal_time_g2(const HilbertSpace& space, const DenseMatrix& rho, int i, int j) {
  HilbertSpace::check_mode(i);
  HilbertSpace::check_mode(j);
  if (rho.rows() != space.dim()) throw Error(ErrorKind::DimensionMismatch, "state dimension");
  return fourth_moment_ratio(space, rho, i, j);
}

struct ObservableRecord {
  double n1 = 0.0;
  double n2 = 0.0;
  double pa = 0.0;
  double pb = 0.0;
  double pc = 0.0;
  // NaN when the corresponding mode is in vacuum.
  double g2_11 = std::numeric_limits<double>::quiet_NaN();
  double g2_22 = std::numeric_limits<double>::quiet_NaN();
  double g2_12 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> p_n1;
  std::vector<double> p_n2;

  double n_total() const { return n1 + n2; }
};

inline ObservableRecord compute_observables(const HilbertSpace& space, const DenseMatrix& rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "state dimension");
  }
  ObservableRecord r;
  r.p_n1.assign(static_cast<std::size_t>(space.fock_states_1()), 0.0);
  r.p_n2.assign(static_cast<std::size_t>(space.fock_states_2()), 0.0);
  for (Index k = 0; k < space.dim(); ++k) {
    const BasisState s = space.state(k);
    const double p = rho(k, k).real();
    r.n1 += s.n1 * p;
    r.n2 += s.n2 * p;
    r.p_n1[static_cast<std::size_t>(s.n1)] += p;
    r.p_n2[static_cast<std::size_t>(s.n2)] += p;
    switch (s.level) {
      case AtomicLevel::a: r.pa += p; break;
      case AtomicLevel::b: r.pb += p; break;
      case AtomicLevel::c: r.pc += p; break;
    }
  }
  const double vac = 1e-12;
  if (r.n1 > vac) r.g2_11 = fourth_moment_ratio(space, rho, 1, 1);
  if (r.n2 > vac) r.g2_22 = fourth_moment_ratio(space, rho, 2, 2);
  if (r.n1 > vac && r.n2 > vac) r.g2_12 = fourth_moment_ratio(space, rho, 1, 2);
  return r;
}

/// Largest violation of the record's internal consistency relations.
inline double consistency_error(const ObservableRecord& r) {
  double err = std::abs(r.pa + r.pb + r.pc - 1.0);
  double s1 = 0.0, s2 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < r.p_n1.size(); ++n) {
    s1 += r.p_n1[n];
    m1 += static_cast<double>(n) * r.p_n1[n];
  }
  for (std::size_t n = 0; n < r.p_n2.size(); ++n) {
    s2 += r.p_n2[n];
    m2 += static_cast<double>(n) * r.p_n2[n];
  }
  err = std::max({err, std::abs(s1 - 1.0), std::abs(s2 - 1.0), std::abs(m1 - r.n1), std::abs(m2 - r.n2)});
  return err;
}

enum class PointStatus { ok, solver_failure, physicality_failure };

inline std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::solver_failure: return "solver_failure";
    case PointStatus::physicality_failure: return "physicality_failure";
  }
  return "unknown";
}

struct ScanPoint {
  ModelParams params;
  PointStatus status = PointStatus::ok;
  std::string message;
  ObservableRecord obs;
  StateDiagnostics diagnostics;
  double residual = 0.0;
  std::string method;
  std::size_t subspace_dim = 0;
};

/// Solves one parameter point. Solver failures are recorded, configuration
/// errors propagate.
inline ScanPoint solve_point(const ModelParams& p, const SteadyOptions& opt = {}, DenseMatrix* rho_out = nullptr) {
  validate(p);
  ScanPoint pt;
  pt.params = p;
  try {
    const Liouvillian l = build_liouvillian(p);
    const SteadyStateResult r = steady_state(l, opt);
    pt.obs = compute_observables(l.space(), r.rho);
    pt.diagnostics = r.diagnostics;
    pt.residual = r.residual;
    pt.method = to_string(r.method);
    pt.subspace_dim = r.subspace_dim;
    if (rho_out) *rho_out = r.rho;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidTruncation) throw;
    pt.status = e.kind() == ErrorKind::Physicality ? PointStatus::physicality_failure : PointStatus::solver_failure;
    pt.message = e.what();
  }
  return pt;
}

/// Bounded worker pool over independent indices; results keep input order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& fn) {
  std::vector<T> out(n);
  if (threads <= 1 || n <= 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = fn(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        out[k] = fn(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(n));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline std::vector<ScanPoint> scan_observables(const std::vector<ModelParams>& grid, const SteadyOptions& opt = {},
                                               unsigned threads = 1) {
  for (const auto& p : grid) validate(p);
  return parallel_map<ScanPoint>(grid.size(), threads, [&](std::size_t k) { return solve_point(grid[k], opt); });
}

/// Discrete argmax with three-point parabolic refinement.
struct PeakEstimate {
  std::size_t index = 0;
  double location = 0.0;
  double value = 0.0;
  double uncertainty = 0.0;
};

inline PeakEstimate refine_peak(const std::vector<double>& x, const std::vector<double>& y, std::size_t k) {
  PeakEstimate pk{k, x[k], y[k], 0.0};
  if (x.size() >= 2) pk.uncertainty = std::abs(x[std::min<std::size_t>(1, x.size() - 1)] - x[0]);
  if (k == 0 || k + 1 >= y.size()) return pk;
  const double h = x[k + 1] - x[k];
  const double den = y[k - 1] - 2.0 * y[k] + y[k + 1];
  if (den >= 0.0) return pk;
  const double off = 0.5 * (y[k - 1] - y[k + 1]) / den;
  pk.location = x[k] + off * h;
  pk.value = y[k] - 0.25 * (y[k - 1] - y[k + 1]) * off;
  return pk;
}

inline PeakEstimate locate_peak(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorKind::Config, "peak search needs matching non-empty arrays");
  const auto it = std::max_element(y.begin(), y.end());
  return refine_peak(x, y, static_cast<std::size_t>(it - y.begin()));
}

/// Local maxima of z[i][j] over its 8-neighbourhood (i along x, j along y),
/// sorted by value. Plateaus report their first point.
struct GridPeak {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

inline std::vector<GridPeak> local_maxima_2d(const std::vector<double>& xs, const std::vector<double>& ys,
                                             const std::vector<std::vector<double>>& z) {
  std::vector<GridPeak> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(xs.size()) ||
              jj >= static_cast<std::ptrdiff_t>(ys.size()))
            continue;
          const double nb = z[static_cast<std::size_t>(ii)][static_cast<std::size_t>(jj)];
          if (nb > z[i][j] || (nb == z[i][j] && (ii < static_cast<std::ptrdiff_t>(i) ||
                                                  (ii == static_cast<std::ptrdiff_t>(i) && jj < static_cast<std::ptrdiff_t>(j))))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) out.push_back({xs[i], ys[j], z[i][j]});
    }
  }
  std::sort(out.begin(), out.end(), [](const GridPeak& a, const GridPeak& b) { return a.value > b.value; });
  return out;
}

/// Plateau test for a monotone curve y(x): the mean slope over the last
/// decade of x is below `fraction` of the initial slope.
inline bool is_saturated(const std::vector<double>& x, const std::vector<double>& y, double fraction = 0.01) {
  if (x.size() < 3 || x.size() != y.size()) return false;
  const double x_end = x.back();
  std::size_t k0 = 0;
  while (k0 + 1 < x.size() && x[k0] < x_end / 10.0) ++k0;
  if (k0 + 1 >= x.size()) return false;
  const double slope0 = (y[1] - y[0]) / (x[1] - x[0]);
  const double slope_end = (y.back() - y[k0]) / (x_end - x[k0]);
  return slope0 > 0.0 && std::abs(slope_end) < fraction * slope0;
}

}  // namespace vcqed
