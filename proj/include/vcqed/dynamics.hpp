#pragma once

// Propagation under the Liouvillian and two-time intensity correlations by
// the quantum regression theorem:
//
//   g2_ij(tau) = Tr[ a_j^dag a_j  exp(L tau)(a_i rho_ss a_i^dag) ] / (<n_i> <n_j>)

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vcqed/model.hpp"
#include "vcqed/propagator.hpp"
#include "vcqed/steady.hpp"

namespace vcqed {

/// exp(L t) applied to an arbitrary (not necessarily positive) operator.
inline DenseMatrix propagate(const Liouvillian& l, const DenseMatrix& x0, double t, const PropagatorOptions& opt = {},
                             PropagatorStats* stats = nullptr) {
  if (t < 0.0) throw Error(ErrorKind::Config, "propagation time must be non-negative");
  const Index d = l.hilbert_dim();
  if (x0.rows() != d || x0.cols() != d) throw Error(ErrorKind::DimensionMismatch, "operator dimension");
  const DenseVector v0 = vectorize(x0);
  const BlockGenerator gen(l, v0, true);
  const DenseVector y = integrate(gen.action(), gen.gather(v0), {t}, nullptr, opt, stats);
  return unvectorize(gen.scatter(y), d);
}

struct TauGrid {
  double t_max = 10.0;
  std::size_t n_points = 2048;

  double spacing() const { return t_max / static_cast<double>(n_points - 1); }
  std::vector<double> samples() const {
    if (n_points < 2 || !(t_max > 0.0)) throw Error(ErrorKind::Config, "tau grid needs t_max > 0 and >= 2 points");
    std::vector<double> out(n_points);
    for (std::size_t k = 0; k < n_points; ++k) out[k] = t_max * static_cast<double>(k) / static_cast<double>(n_points - 1);
    out.back() = t_max;
    return out;
  }
};

/// Mean of kappa + gamma over the two modes; sets the correlation decay time.
inline double correlation_decay_rate(const ModelParams& p) {
  return 0.5 * (p.kappa1 + p.kappa2 + p.gamma1 + p.gamma2);
}

/// Default grid: t_max = 20 / (kappa + gamma), 2048 samples.
inline TauGrid default_tau_grid(const ModelParams& p) { return {20.0 / correlation_decay_rate(p), 2048}; }

struct CorrelationSeries {
  int i = 1;
  int j = 1;
  std::vector<double> tau;
  std::vector<double> g2;
  double g_inf = 1.0;             // mean over the last 10% of the grid
  double direct_zero = 0.0;       // <a_i^dag a_j^dag a_j a_i>/(<n_i><n_j>) from the steady state
  double max_imag = 0.0;          // largest dropped imaginary part
  double decay_rate = 0.0;        // kappa + gamma used for window checks
  std::size_t block_dim = 0;      // size of the invariant block propagated
};

namespace detail {
inline double mean_photon_number(const HilbertSpace& space, const DenseMatrix& rho, int mode) {
  double n = 0.0;
  for (Index k = 0; k < space.dim(); ++k) {
    const BasisState s = space.state(k);
    n += (mode == 1 ? s.n1 : s.n2) * rho(k, k).real();
  }
  return n;
}
}  // namespace detail

inline double fourth_moment_ratio(const HilbertSpace& space, const DenseMatrix& rho, int i, int j) {
  const auto ai = annihilation_op(space, i).to_csr();
  const auto aj = annihilation_op(space, j).to_csr();
  const double ni = detail::mean_photon_number(space, rho, i);
  const double nj = detail::mean_photon_number(space, rho, j);
  if (ni <= 1e-12 || nj <= 1e-12) {
    throw Error(ErrorKind::UndefinedCorrelation, "mean photon number of a correlated mode is zero");
  }
  // <a_i^dag a_j^dag a_j a_i> = Tr[(a_j a_i) rho (a_j a_i)^dag]
  const CsrMatrix k = aj * ai;
  const DenseMatrix m = k * rho;
  const DenseMatrix full = m * k.adjoint();
  return full.trace().real() / (ni * nj);
}

inline CorrelationSeries g2_correlation(const Liouvillian& l, const DenseMatrix& rho_ss, int i, int j,
                                        const TauGrid& grid, double decay_rate,
                                        const PropagatorOptions& opt = {}) {
  HilbertSpace::check_mode(i);
  HilbertSpace::check_mode(j);
  const HilbertSpace& space = l.space();
  const Index d = space.dim();
  if (rho_ss.rows() != d || rho_ss.cols() != d) throw Error(ErrorKind::DimensionMismatch, "state dimension");
  const double ni = detail::mean_photon_number(space, rho_ss, i);
  const double nj = detail::mean_photon_number(space, rho_ss, j);
  if (ni <= 1e-12 || nj <= 1e-12) {
    throw Error(ErrorKind::UndefinedCorrelation,
                "mode " + std::to_string(ni <= 1e-12 ? i : j) + " is in vacuum; g2 is undefined");
  }

  CorrelationSeries out;
  out.i = i;
  out.j = j;
  out.decay_rate = decay_rate;
  out.direct_zero = fourth_moment_ratio(space, rho_ss, i, j);

  const CsrMatrix ai = annihilation_op(space, i).to_csr();
  const DenseMatrix tmp = ai * rho_ss;
  const DenseMatrix x0 = tmp * ai.adjoint();
  const DenseVector v0 = vectorize(x0);
  const BlockGenerator gen(l, v0, true);
  out.block_dim = static_cast<std::size_t>(gen.size());

  // Tr[n_j X] only needs diagonal entries of X.
  std::vector<std::pair<Index, double>> weights;
  for (Index k = 0; k < gen.size(); ++k) {
    const Index full = gen.matrix_free() ? k : gen.support()[static_cast<std::size_t>(k)];
    if (full % d == full / d) {
      const BasisState s = space.state(full % d);
      const int n = j == 1 ? s.n1 : s.n2;
      if (n != 0) weights.emplace_back(k, static_cast<double>(n));
    }
  }

  out.tau = grid.samples();
  out.g2.assign(out.tau.size(), 0.0);
  const double norm = ni * nj;
  integrate(
      gen.action(), gen.gather(v0), out.tau,
      [&](std::size_t k, double, const DenseVector& y) {
        Complex acc = 0.0;
        for (const auto& [idx, w] : weights) acc += w * y(idx);
        acc /= norm;
        out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
        out.g2[k] = acc.real();
      },
      opt);
  if (out.max_imag > 1e-10) {
    throw Error(ErrorKind::Physicality, "correlation has imaginary residue " + std::to_string(out.max_imag));
  }
  const std::size_t tail = std::max<std::size_t>(1, out.g2.size() / 10);
  double sum = 0.0;
  for (std::size_t k = out.g2.size() - tail; k < out.g2.size(); ++k) sum += out.g2[k];
  out.g_inf = sum / static_cast<double>(tail);
  return out;
}

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> value;      // F(omega)
  std::vector<double> curvature;  // d^2 F / d omega^2
  double resolution = 0.0;        // one spectral bin, 2 pi / t_max
  double integrated_deviation = 0.0;  // int_0^tmax (g - g_inf) dtau
};

inline std::vector<double> default_omega_grid(double omega_max = 40.0, std::size_t n = 801) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = omega_max * static_cast<double>(k) / static_cast<double>(n - 1);
  return w;
}

/// F(omega) = 2 int_0^tmax [g(tau) - g_inf] cos(omega tau) dtau by the
/// composite trapezoid rule. Negative delays are taken as the mirror image
/// g(-tau) = g(tau).
inline Spectrum hbt_spectrum(const CorrelationSeries& s, const std::vector<double>& omega) {
  if (s.tau.size() < 2) throw Error(ErrorKind::InsufficientWindow, "correlation series is too short");
  const double t_max = s.tau.back();
  if (s.decay_rate > 0.0 && t_max < 10.0 / s.decay_rate * (1.0 - 1e-12)) {
    throw Error(ErrorKind::InsufficientWindow, "t_max = " + std::to_string(t_max) + " is below 10/(kappa+gamma)");
  }
  Spectrum out;
  out.omega = omega;
  out.resolution = 2.0 * std::numbers::pi / t_max;
  const std::size_t n = s.tau.size();
  std::vector<double> wdev(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double h_left = k > 0 ? s.tau[k] - s.tau[k - 1] : 0.0;
    const double h_right = k + 1 < n ? s.tau[k + 1] - s.tau[k] : 0.0;
    wdev[k] = 0.5 * (h_left + h_right) * (s.g2[k] - s.g_inf);
  }
  for (double v : wdev) out.integrated_deviation += v;
  out.value.resize(omega.size());
  out.curvature.resize(omega.size());
  for (std::size_t m = 0; m < omega.size(); ++m) {
    double f = 0.0, c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double cw = std::cos(omega[m] * s.tau[k]);
      f += wdev[k] * cw;
      c -= wdev[k] * s.tau[k] * s.tau[k] * cw;
    }
    out.value[m] = 2.0 * f;
    out.curvature[m] = 2.0 * c;
  }
  return out;
}

enum class FeatureKind { peak, dip, peak_shoulder, dip_shoulder };

inline std::string to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::peak: return "peak";
    case FeatureKind::dip: return "dip";
    case FeatureKind::peak_shoulder: return "peak_shoulder";
    case FeatureKind::dip_shoulder: return "dip_shoulder";
  }
  return "unknown";
}

struct SpectralFeature {
  double omega = 0.0;
  double value = 0.0;
  FeatureKind kind = FeatureKind::peak;

  bool is_dip() const { return kind == FeatureKind::dip || kind == FeatureKind::dip_shoulder; }
};

/// Interior local extrema of F, plus shoulders: local extrema of the
/// curvature whose magnitude is at least `shoulder_fraction` of the largest
/// same-signed curvature extremum. A dip shoulder has positive curvature.
inline std::vector<SpectralFeature> spectral_features(const Spectrum& s, double omega_min = 0.0,
                                                      double shoulder_fraction = 0.25) {
  std::vector<SpectralFeature> out;
  const auto& f = s.value;
  const auto& c = s.curvature;
  const std::size_t n = f.size();
  if (n < 3) return out;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (s.omega[k] < omega_min) continue;
    if (f[k] > f[k - 1] && f[k] >= f[k + 1]) out.push_back({s.omega[k], f[k], FeatureKind::peak});
    if (f[k] < f[k - 1] && f[k] <= f[k + 1]) out.push_back({s.omega[k], f[k], FeatureKind::dip});
  }
  double max_pos = 0.0, max_neg = 0.0;
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (s.omega[k] < omega_min) continue;
    if (c[k] > 0.0 && c[k] > c[k - 1] && c[k] >= c[k + 1]) {
      pos.push_back(k);
      max_pos = std::max(max_pos, c[k]);
    }
    if (c[k] < 0.0 && c[k] < c[k - 1] && c[k] <= c[k + 1]) {
      neg.push_back(k);
      max_neg = std::max(max_neg, -c[k]);
    }
  }
  for (std::size_t k : pos)
    if (c[k] >= shoulder_fraction * max_pos) out.push_back({s.omega[k], f[k], FeatureKind::dip_shoulder});
  for (std::size_t k : neg)
    if (-c[k] >= shoulder_fraction * max_neg) out.push_back({s.omega[k], f[k], FeatureKind::peak_shoulder});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
  return out;
}

/// Interior extremum of largest |F| at or above omega_min.
inline std::optional<SpectralFeature> dominant_feature(const Spectrum& s, double omega_min = 0.0) {
  std::optional<SpectralFeature> best;
  for (const auto& f : spectral_features(s, omega_min)) {
    if (f.kind != FeatureKind::peak && f.kind != FeatureKind::dip) continue;
    if (!best || std::abs(f.value) > std::abs(best->value)) best = f;
  }
  return best;
}

}  // namespace vcqed
