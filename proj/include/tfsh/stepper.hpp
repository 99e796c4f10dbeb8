#pragma once

// Time loop for the variable-step L1 scheme:
//
//   D_tau^alpha u^n = -mu^n,   mu^n = (1+Lap_h)^2 u^n + f(u^n),
//
// on a prebuilt mesh (graded / two-part / warm-up + uniform) or with the
// adaptive controller extending the mesh as it goes. Keeps the difference
// history in memory, tracks the original and modified energies, and monitors
// the dissipation law.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tfsh/energy.hpp"
#include "tfsh/field.hpp"
#include "tfsh/kernels.hpp"
#include "tfsh/nonlinear.hpp"
#include "tfsh/operators.hpp"
#include "tfsh/spectral.hpp"
#include "tfsh/time_mesh.hpp"

namespace tfsh {

struct EnergyRecord {
  int n = 0;
  double t = 0.0;
  double tau = 0.0;
  double E = 0.0;
  double E_mod = 0.0;
  double mu_norm_sq = 0.0;
  int fp_iters = 0;
  double u_linf = 0.0;
};

struct SolverState {
  Grid2D grid;
  TimeMesh mesh;
  NonlinearParams params;
  double alpha = 0.5;
  Field2D u_prev;                           // u^{n-1}
  std::vector<Field2D> diff_history;        // diff_history[k-1] = u^k - u^{k-1}
  std::vector<double> mu_norm_sq_history;   // ||mu^j||^2, j = 1..n-1
  std::vector<EnergyRecord> energy_log;
};

// Spec-shaped overload: history term of level n from the solver state.
inline Field2D history_rhs(const SolverState& st, const L1KernelRow& row, int n) {
  if (row.n != n) throw std::invalid_argument("history_rhs: row/level mismatch");
  return history_rhs(st.u_prev, std::span<const Field2D>(st.diff_history.data(),
                                                         static_cast<std::size_t>(n) - 1),
                     row);
}

struct MonitorViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepperOptions {
  double alpha = 0.5;
  NonlinearParams nl;

  bool adaptive = false;   // extend the mesh with the step controller until t >= T
  double T = 0.0;          // horizon, required when adaptive
  double eta = 10.0;
  double tau_max = 1e-1;
  double tau_min = 1e-3;

  std::vector<double> snapshot_times;
  bool strict = false;                  // monitor violations / tau > tau* become errors
  bool monitor_energy = true;           // off for forced (manufactured) runs
  double dissipation_tol = 1e-8;        // relative slack absorbing solver + rounding error
  std::size_t history_budget_bytes = std::size_t{3} << 30;

  // Optional manufactured forcing g(., t), added to the history term.
  std::function<Field2D(double)> forcing;
};

struct RunResult {
  Field2D u_final;
  std::vector<EnergyRecord> log;
  std::vector<std::pair<double, Field2D>> snapshots;
  TimeMesh mesh;          // mesh as executed (equals the input unless adaptive)
  double tau_star = 0.0;
  std::vector<std::string> warnings;
};

inline RunResult run_simulation(const Field2D& u0, TimeMesh mesh, const StepperOptions& opt) {
  if (opt.adaptive && !(opt.T > mesh.nodes.back()))
    throw std::invalid_argument("run_simulation: adaptive mode needs T beyond the warm-up mesh");

  const Grid2D grid = u0.grid();
  RunResult res;
  res.tau_star = max_step_bound(opt.alpha, opt.nl.g, opt.nl.epsilon);

  SolverState st;
  st.grid = grid;
  st.mesh = std::move(mesh);
  st.params = opt.nl;
  st.alpha = opt.alpha;
  st.u_prev = u0;

  auto warn = [&](const std::string& msg) {
    if (opt.strict) throw MonitorViolation(msg);
    res.warnings.push_back(msg);
  };

  if (!opt.adaptive && st.mesh.tau_max > res.tau_star)
    warn("mesh violates the step bound: tau_max " + std::to_string(st.mesh.tau_max) +
         " > tau* " + std::to_string(res.tau_star));

  SpectralSolver solver(grid);
  DccHistorySum mu_weighted;

  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;

  const double E0 = energy(u0, opt.nl);
  {
    EnergyRecord r0;
    r0.E = E0;
    r0.E_mod = E0;
    r0.mu_norm_sq = [&] {
      const double m = norm_l2(chemical_potential(u0, opt.nl));
      return m * m;
    }();
    r0.u_linf = norm_linf(u0);
    st.energy_log.push_back(r0);
  }

  double E_mod_prev = E0;
  int n = 0;
  while (true) {
    if (opt.adaptive) {
      if (st.mesh.t(st.mesh.levels()) >= opt.T - 1e-14) {
        if (n >= st.mesh.levels()) break;
      } else if (n >= st.mesh.levels()) {
        // choose the next step from the last accepted difference
        double tau;
        if (st.diff_history.empty()) {
          tau = opt.tau_min;
        } else {
          const double rate = norm_l2(st.diff_history.back()) / st.mesh.tau(st.mesh.levels());
          tau = adaptive_next_step(rate, opt.eta, opt.tau_max, opt.tau_min);
        }
        if (opt.strict) tau = std::min(tau, res.tau_star);
        const double t_now = st.mesh.t(st.mesh.levels());
        double t_next = t_now + tau;
        if (next_snap < snaps.size() && snaps[next_snap] > t_now && snaps[next_snap] < t_next)
          t_next = snaps[next_snap];  // land exactly on the snapshot time
        if (t_next > opt.T) t_next = opt.T;
        st.mesh.append(t_next - t_now);
      }
    } else if (n >= st.mesh.levels()) {
      break;
    }
    ++n;

    const std::size_t need =
        (static_cast<std::size_t>(n)) * st.u_prev.size() * sizeof(double);
    if (need > opt.history_budget_bytes)
      throw std::runtime_error(
          "run_simulation: difference history would exceed the memory budget (" +
          std::to_string(need) + " > " + std::to_string(opt.history_budget_bytes) +
          " bytes) at level " + std::to_string(n) +
          "; raise history_budget_bytes or coarsen the run");

    const L1KernelRow row = l1_row(st.mesh, n, opt.alpha);
    Field2D rhs = history_rhs(st, row, n);
    if (opt.forcing) {
      const Field2D g = opt.forcing(st.mesh.t(n));
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += g[k];
    }

    StepResult step = implicit_step(st.u_prev, rhs, row.a0(), n, opt.nl, solver);

    st.diff_history.push_back(sub(step.u, st.u_prev));
    st.u_prev = std::move(step.u);

    const double mu_sq = [&] {
      const double m = norm_l2(chemical_potential(st.u_prev, opt.nl));
      return m * m;
    }();
    st.mu_norm_sq_history.push_back(mu_sq);
    mu_weighted.push(mu_sq, row);

    EnergyRecord rec;
    rec.n = n;
    rec.t = st.mesh.t(n);
    rec.tau = st.mesh.tau(n);
    rec.E = energy(st.u_prev, opt.nl);
    rec.E_mod = rec.E + 0.5 * mu_weighted.value();
    rec.mu_norm_sq = mu_sq;
    rec.fp_iters = step.iterations;
    rec.u_linf = norm_linf(st.u_prev);
    st.energy_log.push_back(rec);

    if (opt.monitor_energy) {
      if (rec.E_mod > E_mod_prev + opt.dissipation_tol * (1.0 + std::abs(E_mod_prev)))
        warn("modified energy increased at level " + std::to_string(n) + ": " +
             std::to_string(E_mod_prev) + " -> " + std::to_string(rec.E_mod));
      if (rec.E > E0 + opt.dissipation_tol * (1.0 + std::abs(E0)))
        warn("energy exceeded E[u0] at level " + std::to_string(n));
    }
    E_mod_prev = rec.E_mod;

    while (next_snap < snaps.size() && rec.t >= snaps[next_snap] - 1e-14) {
      res.snapshots.emplace_back(rec.t, st.u_prev);
      ++next_snap;
    }
  }

  res.u_final = std::move(st.u_prev);
  res.log = std::move(st.energy_log);
  res.mesh = std::move(st.mesh);
  return res;
}

}  // namespace tfsh
