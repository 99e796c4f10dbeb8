#pragma once

// Discrete Swift-Hohenberg energy and chemical potential.
//
//   E[v]   = 1/2 ||(1+Lap_h)v||^2 + 1/4 ||v||_4^4 - g/3 <v^2,v> - eps/2 ||v||^2
//   mu(v)  = (1+Lap_h)^2 v + f(v)
//   Emod_n = E[u^n] + 1/2 sum_{j=1}^{n} p_{n-j}^{(n)} ||mu^j||^2,  Emod_0 = E[u^0]
//
// mu is recomputed by direct operator application rather than read off the
// scheme identity mu^n = -D_tau^alpha u^n; the two agree up to the
// fixed-point tolerance.

#include <span>
#include <stdexcept>

#include "tfsh/field.hpp"
#include "tfsh/kernels.hpp"
#include "tfsh/nonlinear.hpp"
#include "tfsh/operators.hpp"

namespace tfsh {

inline double energy(const Field2D& v, const NonlinearParams& np) {
  const double h2 = v.grid().h * v.grid().h;
  Field2D lv = laplacian(v);
  double quad = 0.0, quart = 0.0, cubic = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double x = v[k];
    const double w = x + lv[k];  // (1+Lap_h)v
    quad += w * w;
    const double x2 = x * x;
    quart += x2 * x2;
    cubic += x2 * x;
    sq += x2;
  }
  return h2 * (0.5 * quad + 0.25 * quart - np.g / 3.0 * cubic - 0.5 * np.epsilon * sq);
}

inline Field2D chemical_potential(const Field2D& v, const NonlinearParams& np) {
  Field2D lin = sh_operator(v);
  Field2D fv = f_bulk(v, np);
  for (std::size_t k = 0; k < lin.size(); ++k) lin[k] += fv[k];
  return lin;
}

// mu_norm_sq[j-1] = ||mu^j||^2 for j = 1..n with n = dcc.n.
inline double modified_energy(double energy_n, const DccKernelRow& dcc,
                              std::span<const double> mu_norm_sq) {
  const int n = dcc.n;
  if (static_cast<int>(mu_norm_sq.size()) < n)
    throw std::invalid_argument("modified_energy: mu history shorter than level");
  double s = 0.0;
  for (int j = 1; j <= n; ++j)
    s += dcc.p[static_cast<std::size_t>(n - j)] * mu_norm_sq[static_cast<std::size_t>(j) - 1];
  return energy_n + 0.5 * s;
}

}  // namespace tfsh
