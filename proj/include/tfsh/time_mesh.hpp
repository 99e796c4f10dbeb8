#pragma once

// Nonuniform time meshes: graded t_k = T0*(k/N0)^gamma, the two-part
// graded+random mesh used by the accuracy experiments, and the adaptive
// step controller. Nodes are the single source of truth; steps and ratios
// are derived on construction and kept in sync by append().

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfsh/math.hpp"
#include "tfsh/rng.hpp"

namespace tfsh {

struct TimeMesh {
  std::vector<double> nodes;   // t_0 .. t_N, t_0 = 0
  std::vector<double> steps;   // steps[k-1] = tau_k = t_k - t_{k-1}, k = 1..N
  std::vector<double> ratios;  // ratios[k-2] = tau_k / tau_{k-1}, k = 2..N
  double tau_max = 0.0;
  double r_star = 1.0;         // min{1, min_k r_k}

  int levels() const { return static_cast<int>(nodes.size()) - 1; }
  double t(int n) const { return nodes.at(static_cast<std::size_t>(n)); }
  double tau(int k) const { return steps.at(static_cast<std::size_t>(k) - 1); }

  void append(double step) {
    if (!(step > 0.0)) throw std::invalid_argument("TimeMesh::append: step must be positive");
    if (!steps.empty()) {
      const double r = step / steps.back();
      ratios.push_back(r);
      if (r < r_star) r_star = r;
    }
    nodes.push_back(nodes.back() + step);
    steps.push_back(step);
    if (step > tau_max) tau_max = step;
  }

  static TimeMesh from_nodes(std::vector<double> ts) {
    if (ts.size() < 2) throw std::invalid_argument("TimeMesh: need at least two nodes");
    if (ts.front() != 0.0) throw std::invalid_argument("TimeMesh: t_0 must be 0");
    TimeMesh m;
    m.nodes = std::move(ts);
    m.steps.resize(m.nodes.size() - 1);
    for (std::size_t k = 1; k < m.nodes.size(); ++k) {
      if (!(m.nodes[k] > m.nodes[k - 1]))
        throw std::invalid_argument("TimeMesh: nodes must be strictly increasing at index " +
                                    std::to_string(k));
      m.steps[k - 1] = m.nodes[k] - m.nodes[k - 1];
      if (m.steps[k - 1] > m.tau_max) m.tau_max = m.steps[k - 1];
    }
    m.ratios.resize(m.steps.size() > 1 ? m.steps.size() - 1 : 0);
    for (std::size_t k = 1; k < m.steps.size(); ++k) {
      m.ratios[k - 1] = m.steps[k] / m.steps[k - 1];
      if (m.ratios[k - 1] < m.r_star) m.r_star = m.ratios[k - 1];
    }
    return m;
  }
};

inline TimeMesh graded_mesh(double T0, int N0, double gamma) {
  if (!(T0 > 0.0)) throw std::invalid_argument("graded_mesh: T0 must be positive");
  if (N0 < 1) throw std::invalid_argument("graded_mesh: N0 must be >= 1");
  if (!(gamma >= 1.0)) throw std::invalid_argument("graded_mesh: gamma must be >= 1");
  std::vector<double> ts(static_cast<std::size_t>(N0) + 1);
  for (int k = 0; k <= N0; ++k)
    ts[static_cast<std::size_t>(k)] = T0 * std::pow(static_cast<double>(k) / N0, gamma);
  ts.back() = T0;
  return TimeMesh::from_nodes(std::move(ts));
}

// Two-part mesh of the accuracy experiments: graded on [0, T0] with
// T0 = min{1/gamma, T} and N0 = floor(N / (T + 1 - 1/gamma)) intervals,
// then N1 = N - N0 random steps proportional to seeded uniform(0,1) draws,
// normalised so the last node is exactly T.
inline TimeMesh two_part_mesh(double T, int N, double gamma, std::uint64_t seed) {
  if (!(T > 0.0)) throw std::invalid_argument("two_part_mesh: T must be positive");
  if (!(gamma >= 1.0)) throw std::invalid_argument("two_part_mesh: gamma must be >= 1");
  const double T0 = std::min(1.0 / gamma, T);
  const int N0 = static_cast<int>(std::floor(N / (T + 1.0 - 1.0 / gamma)));
  const int N1 = N - N0;
  if (N0 < 1 || N1 < 1)
    throw std::invalid_argument("two_part_mesh: N=" + std::to_string(N) +
                                " splits into N0=" + std::to_string(N0) +
                                ", N1=" + std::to_string(N1) + "; both parts need >= 1 steps");

  std::vector<double> ts(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N0; ++k)
    ts[static_cast<std::size_t>(k)] = T0 * std::pow(static_cast<double>(k) / N0, gamma);

  UniformOpen01 rng(seed);
  std::vector<double> eps(static_cast<std::size_t>(N1));
  double sum = 0.0;
  for (double& e : eps) {
    e = rng.next();
    sum += e;
  }
  double t = T0;
  for (int k = 1; k < N1; ++k) {
    t += (T - T0) * eps[static_cast<std::size_t>(k) - 1] / sum;
    ts[static_cast<std::size_t>(N0 + k)] = t;
  }
  ts.back() = T;
  return TimeMesh::from_nodes(std::move(ts));
}

// Graded warm-up used before uniform or adaptive stepping. The interval
// count makes the last graded step match the reference step size:
// tau_{N0} ~ gamma*T0/N0 = tau_ref. This reproduces the accuracy
// experiments' N0 split in the uniform case.
inline int warmup_interval_count(double T0, double gamma, double tau_ref) {
  if (!(tau_ref > 0.0)) throw std::invalid_argument("warmup_interval_count: tau_ref must be positive");
  const int n = static_cast<int>(std::ceil(gamma * T0 / tau_ref));
  return n < 2 ? 2 : n;
}

// tau_ada = max{tau_min, tau_max / sqrt(1 + eta * ||du/tau||^2)}
inline double adaptive_next_step(double du_rate_norm, double eta, double tau_max, double tau_min) {
  if (!(tau_min <= tau_max)) throw std::invalid_argument("adaptive_next_step: tau_min > tau_max");
  if (eta < 0.0) throw std::invalid_argument("adaptive_next_step: eta must be >= 0");
  if (du_rate_norm < 0.0) throw std::invalid_argument("adaptive_next_step: negative norm");
  return std::max(tau_min, tau_max / std::sqrt(1.0 + eta * du_rate_norm * du_rate_norm));
}

// Solvability/dissipation step bound tau* = (3 / (Gamma(2-alpha)*(4g^2+3eps)))^(1/alpha).
inline double max_step_bound(double alpha, double g, double epsilon) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("max_step_bound: alpha must be in (0,1]");
  if (g < 0.0) throw std::domain_error("max_step_bound: g must be >= 0");
  if (!(epsilon > 0.0)) throw std::domain_error("max_step_bound: epsilon must be positive");
  const double denom = gamma_fn(2.0 - alpha) * (4.0 * g * g + 3.0 * epsilon);
  return std::pow(3.0 / denom, 1.0 / alpha);
}

}  // namespace tfsh
