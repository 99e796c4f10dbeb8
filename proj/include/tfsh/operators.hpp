#pragma once

// Discrete spatial operators and inner products on periodic grids.

#include <cmath>
#include <cstddef>

#include "tfsh/field.hpp"

namespace tfsh {

// Five-point Laplacian with periodic wraparound.
inline Field2D laplacian(const Field2D& v) {
  const int M = v.M();
  const double ih2 = 1.0 / (v.grid().h * v.grid().h);
  Field2D out(v.grid());
  for (int i = 0; i < M; ++i) {
    const int im = (i == 0) ? M - 1 : i - 1;
    const int ip = (i == M - 1) ? 0 : i + 1;
    for (int j = 0; j < M; ++j) {
      const int jm = (j == 0) ? M - 1 : j - 1;
      const int jp = (j == M - 1) ? 0 : j + 1;
      out(i, j) = (v(ip, j) + v(im, j) + v(i, jp) + v(i, jm) - 4.0 * v(i, j)) * ih2;
    }
  }
  return out;
}

// (1 + Lap_h)^2 v = v + 2 Lap v + Lap(Lap v), by two Laplacian sweeps.
inline Field2D sh_operator(const Field2D& v) {
  Field2D lv = laplacian(v);
  Field2D llv = laplacian(lv);
  Field2D out(v.grid());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] + 2.0 * lv[k] + llv[k];
  return out;
}

inline double inner(const Field2D& v, const Field2D& w) {
  require_same_grid(v, w, "inner");
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * w[k];
  return v.grid().h * v.grid().h * s;
}

inline double norm_l2(const Field2D& v) { return std::sqrt(inner(v, v)); }

inline double norm_l4(const Field2D& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double x2 = v[k] * v[k];
    s += x2 * x2;
  }
  return std::pow(v.grid().h * v.grid().h * s, 0.25);
}

inline double norm_linf(const Field2D& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s = std::max(s, std::abs(v[k]));
  return s;
}

inline double max_abs_diff(const Field2D& a, const Field2D& b) {
  require_same_grid(a, b, "max_abs_diff");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

// out = a + c*b
inline Field2D axpy(const Field2D& a, double c, const Field2D& b) {
  require_same_grid(a, b, "axpy");
  Field2D out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + c * b[k];
  return out;
}

inline Field2D sub(const Field2D& a, const Field2D& b) { return axpy(a, -1.0, b); }

}  // namespace tfsh
