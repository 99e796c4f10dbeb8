#pragma once

// Scalar special-function helpers shared by the kernel and mesh code.
// All fractional orders in this library live in (0,1), so every gamma
// argument stays inside (0,3) where std::tgamma is accurate to ~1 ulp.

#include <cmath>
#include <stdexcept>
#include <string>

namespace tfsh {

inline double gamma_fn(double x) {
  if (!(x > 0.0))
    throw std::domain_error("gamma_fn: argument must be positive, got " + std::to_string(x));
  return std::tgamma(x);
}

// omega_beta(t) = t^(beta-1) / Gamma(beta)
inline double omega(double beta, double t) {
  if (!(beta > 0.0))
    throw std::domain_error("omega: beta must be positive, got " + std::to_string(beta));
  if (!(t > 0.0))
    throw std::domain_error("omega: t must be positive, got " + std::to_string(t));
  return std::pow(t, beta - 1.0) / gamma_fn(beta);
}

// omega_beta(d1) - omega_beta(d0) for d1 > d0 >= 0, without cancellation.
// For d0 > 0 use d1^(b-1) - d0^(b-1) = d0^(b-1) * expm1((b-1) * log1p((d1-d0)/d0)),
// which stays accurate when d1-d0 is tiny relative to d0 (step ratios >> 1).
inline double omega_diff(double beta, double d1, double d0) {
  if (d0 == 0.0) return omega(beta, d1);
  const double e = beta - 1.0;
  return std::pow(d0, e) * std::expm1(e * std::log1p((d1 - d0) / d0)) / gamma_fn(beta);
}

}  // namespace tfsh
