#pragma once

// Adaptive Dormand-Prince 5(4) integrator for linear complex systems
// dy/dt = f(y), with the 4th-order continuous extension used to sample the
// solution on an arbitrary increasing time grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "vcqed/error.hpp"
#include "vcqed/hilbert.hpp"

namespace vcqed {

struct PropagatorOptions {
  double rtol = 1e-10;
  double atol = 1e-14;
  std::size_t max_steps = 50'000'000;
  double initial_step = 0.0;  // 0 picks one from the initial derivative
};

struct PropagatorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

using LinearAction = std::function<void(const DenseVector& in, DenseVector& out)>;
using SampleCallback = std::function<void(std::size_t sample, double t, const DenseVector& y)>;

namespace detail::dopri {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace detail::dopri

/// Integrates from t = 0 and reports y at each of `times` (non-decreasing,
/// all >= 0) through `on_sample`. Returns the state at the last time.
inline DenseVector integrate(const LinearAction& f, DenseVector y, const std::vector<double>& times,
                             const SampleCallback& on_sample, const PropagatorOptions& opt = {},
                             PropagatorStats* stats = nullptr) {
  using namespace detail::dopri;
  PropagatorStats local;
  PropagatorStats& st = stats ? *stats : local;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw Error(ErrorKind::Config, "sample times must be non-negative and non-decreasing");
    }
  }
  const Index n = y.size();
  std::size_t next = 0;
  while (next < times.size() && times[next] == 0.0) {
    if (on_sample) on_sample(next, 0.0, y);
    ++next;
  }
  if (next == times.size()) return y;
  const double t_end = times.back();

  auto weighted_norm = [&](const DenseVector& v, const DenseVector& y0, const DenseVector& y1) {
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      const double q = std::abs(v(i)) / sc;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Index>(n, 1)));
  };

  DenseVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);
  f(y, k1);
  ++st.evaluations;

  double h = opt.initial_step;
  if (h <= 0.0) {
    const double d0 = weighted_norm(y, y, y);
    const double d1n = weighted_norm(k1, y, y);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, t_end);
  }
  const double h_min = 1e-14 * std::max(1.0, t_end);

  double t = 0.0;
  std::size_t steps = 0;
  while (next < times.size()) {
    if (++steps > opt.max_steps) {
      throw Error(ErrorKind::Stiffness, "step budget exhausted at t = " + std::to_string(t));
    }
    h = std::min(h, t_end - t);
    if (h < h_min && t_end - t > h_min) {
      throw Error(ErrorKind::Stiffness, "step size underflow at t = " + std::to_string(t));
    }
    tmp = y + h * a21 * k1;
    f(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(tmp, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(y_new, k7);
    st.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double e = weighted_norm(err, y, y_new);

    if (e <= 1.0) {
      ++st.accepted;
      const double t_new = (t_end - t - h <= h_min) ? t_end : t + h;
      if (next < times.size() && times[next] <= t_new) {
        // Continuous extension coefficients.
        const DenseVector ydiff = y_new - y;
        const DenseVector bspl = h * k1 - ydiff;
        const DenseVector r4 = ydiff - h * k7 - bspl;
        const DenseVector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        DenseVector sample(n);
        while (next < times.size() && times[next] <= t_new) {
          if (times[next] >= t_new) {
            if (on_sample) on_sample(next, times[next], y_new);
          } else {
            const double theta = (times[next] - t) / h;
            const double theta1 = 1.0 - theta;
            sample = y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
            if (on_sample) on_sample(next, times[next], sample);
          }
          ++next;
        }
      }
      y.swap(y_new);
      k1.swap(k7);
      t = t_new;
    } else {
      ++st.rejected;
    }
    const double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
    h *= (e <= 1.0) ? fac : std::min(fac, 1.0);
  }
  return y;
}

}  // namespace vcqed
