#pragma once

// Built-in oracle checks with measured values and tolerances.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcqed/dressed.hpp"
#include "vcqed/dynamics.hpp"
#include "vcqed/entanglement.hpp"
#include "vcqed/observables.hpp"
#include "vcqed/steady.hpp"

namespace vcqed {

struct SelftestOptions {
  // Multiplies every dissipative rate; anything but 1 corrupts the rate
  // convention and must be caught by the decay check.
  double rate_factor = 1.0;
};

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

inline nlohmann::ordered_json to_json(const SelftestReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"measured", c.measured},
                           {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  }
  return j;
}

namespace detail {

inline void record(SelftestReport& r, std::string name, double measured, double tol, std::string detail = {}) {
  r.checks.push_back({std::move(name), measured, tol, measured <= tol, std::move(detail)});
}

/// d<O>/dt at t = 0 for a pure basis state under a single channel.
inline double initial_rate(const HilbertSpace& space, const Channel& ch, const BasisState& s,
                           const SparseOperator& observable) {
  const Liouvillian l(space, SparseOperator(space.dim()), {ch});
  const DenseMatrix drho = l.apply(basis_projector(space, s));
  Complex acc = 0.0;
  for (const auto& e : observable.entries()) acc += e.value * drho(e.col, e.row);
  return acc.real();
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opt = {}) {
  SelftestReport rep;

  {  // Dressed energies against the numeric Hamiltonian.
    ModelParams p;
    double err = 0.0;
    for (PhotonSector s : {PhotonSector{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}}) {
      const auto a = dressed_energies(s, p.g1, p.g2, 0.0);
      const auto n = numeric_sector_energies(s, p);
      for (std::size_t k = 0; k < a.size(); ++k) err = std::max(err, std::abs(a[k] - n[k]));
    }
    detail::record(rep, "dressed_energies_vs_numeric", err, 1e-10);
  }

  {  // Dark state has no ground component and is an eigenvector.
    const PhotonSector s{1, 1};
    double err = 0.0;
    for (const auto& st : dressed_states(s, 10.0, 7.0, 0.3)) {
      const DenseVector r = sector_hamiltonian(s, 10.0, 7.0, 0.3, 0.3) * st.amplitudes - st.energy * st.amplitudes;
      err = std::max(err, r.norm());
      if (st.branch == Branch::zero) err = std::max(err, std::abs(st.amplitudes(0)));
    }
    detail::record(rep, "dressed_eigenvectors", err, 1e-12);
  }

  {  // Dissipator convention: rate gamma gives d<n>/dt = -gamma <n>.
    const HilbertSpace space(3, 3);
    const double kappa = 1.3, gamma = 0.7;
    const Channel c1{"kappa1", opt.rate_factor * kappa, annihilation_op(space, 1)};
    const Channel c2{"gamma1", opt.rate_factor * gamma, atomic_lowering_op(space, 1)};
    const double r1 = detail::initial_rate(space, c1, {AtomicLevel::a, 2, 0}, number_op(space, 1));
    const double r2 = detail::initial_rate(space, c2, {AtomicLevel::b, 0, 0}, atomic_projector(space, AtomicLevel::b));
    const double err = std::max(std::abs(r1 + 2.0 * kappa) / (2.0 * kappa), std::abs(r2 + gamma) / gamma);
    detail::record(rep, "dissipator_decay_rate", err, 1e-12,
                   "d<n1>/dt=" + std::to_string(r1) + " d<Pb>/dt=" + std::to_string(r2));
  }

  // Parameter sets shared by the solver checks.
  std::vector<ModelParams> sets(3);
  sets[1].eta_ic1 = sets[1].eta_ic2 = 0.5;
  sets[1].g1 = sets[1].g2 = 5.0;
  sets[2].delta1 = 3.0;
  sets[2].delta2 = -2.0;
  sets[2].g2 = 7.0;
  for (auto& p : sets) {
    p.gamma1 *= opt.rate_factor;
    p.gamma2 *= opt.rate_factor;
    p.kappa1 *= opt.rate_factor;
    p.kappa2 *= opt.rate_factor;
    p.eta_ic1 *= opt.rate_factor;
    p.eta_ic2 *= opt.rate_factor;
  }

  {  // Linear solve against time marching.
    double worst = 0.0;
    for (const auto& p : sets) {
      const Liouvillian l = build_liouvillian(p);
      const auto lin = steady_state(l);
      SteadyOptions so;
      so.tol = 1e-10;
      const auto tm = time_march_to_steady(l, basis_projector(l.space(), so.seed), so);
      worst = std::max(worst, trace_distance(lin.rho, tm.rho));
    }
    detail::record(rep, "steady_linear_vs_time_marching", worst, 1e-6);
  }

  {  // Regression at tau = 0 against the fourth moment.
    double worst = 0.0;
    for (const auto& p : sets) {
      const Liouvillian l = build_liouvillian(p);
      const auto ss = steady_state(l);
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
          const auto s = g2_correlation(l, ss.rho, i, j, {1.0, 3}, 0.0);
          worst = std::max(worst, std::abs(s.g2[0] - s.direct_zero) / std::abs(s.direct_zero));
        }
    }
    detail::record(rep, "regression_vs_direct_tau0", worst, 1e-8);
  }

  {  // Physicality of the default steady state.
    const auto ss = steady_state(build_liouvillian(sets[0]));
    const auto& d = ss.diagnostics;
    detail::record(rep, "steady_hermiticity", d.hermiticity_error, 1e-12);
    detail::record(rep, "steady_trace", d.trace_error, 1e-10);
    detail::record(rep, "steady_positivity", std::max(0.0, -d.min_eigenvalue), 1e-8);
    const ObservableRecord o = compute_observables(HilbertSpace(6, 6), ss.rho);
    detail::record(rep, "observable_consistency", consistency_error(o), 1e-10);

    const ReducedFieldState rf = trace_out_atom(HilbertSpace(6, 6), ss.rho);
    detail::record(rep, "reduced_dimension_36", std::abs(static_cast<double>(rf.rho.rows()) - 36.0) +
                                                    std::abs(static_cast<double>(rf.rho.cols()) - 36.0), 0.0);
    const WitnessResult w = witness(rf);
    detail::record(rep, "pt_trace_preserved", std::abs(w.spectrum_sum - 1.0), 1e-10);
    detail::record(rep, "incoherent_state_separable", std::max(0.0, -w.min_eigenvalue), 1e-8);
  }

  {  // Partial transpose of an embedded Bell state.
    ReducedFieldState bell{3, 3, DenseMatrix::Zero(9, 9)};
    DenseVector v = DenseVector::Zero(9);
    v(bell.index(0, 1)) = v(bell.index(1, 0)) = 1.0 / std::sqrt(2.0);
    bell.rho = v * v.adjoint();
    const WitnessResult w = witness(bell);
    detail::record(rep, "pt_bell_min_eigenvalue", std::abs(w.min_eigenvalue + 0.5), 1e-12);
    ReducedFieldState twice = bell;
    twice.rho = partial_transpose(bell, 2);
    detail::record(rep, "pt_involution", (partial_transpose(twice, 2) - bell.rho).cwiseAbs().maxCoeff(), 0.0);
  }
  return rep;
}

}  // namespace vcqed
