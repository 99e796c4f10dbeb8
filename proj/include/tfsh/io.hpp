#pragma once

// Deterministic text/bitmap writers. Floating-point values are printed with
// 17 significant digits so CSV output round-trips exactly and can be diffed.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tfsh/field.hpp"
#include "tfsh/kernels.hpp"
#include "tfsh/mms.hpp"
#include "tfsh/stepper.hpp"
#include "tfsh/time_mesh.hpp"

namespace tfsh {

inline std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

inline void write_energy_csv(const std::string& path, const std::vector<EnergyRecord>& log) {
  auto f = open_out(path);
  f << "n,t,tau,E,E_mod,mu_norm_sq,fp_iters,u_linf\n";
  for (const auto& r : log)
    f << r.n << ',' << fmt_full(r.t) << ',' << fmt_full(r.tau) << ',' << fmt_full(r.E) << ','
      << fmt_full(r.E_mod) << ',' << fmt_full(r.mu_norm_sq) << ',' << r.fp_iters << ','
      << fmt_full(r.u_linf) << '\n';
}

inline void write_mesh_csv(const std::string& path, const TimeMesh& mesh) {
  auto f = open_out(path);
  f << "k,t_k,tau_k,r_k\n";
  f << "0,0,,\n";
  for (int k = 1; k <= mesh.levels(); ++k) {
    f << k << ',' << fmt_full(mesh.t(k)) << ',' << fmt_full(mesh.tau(k)) << ',';
    if (k >= 2) f << fmt_full(mesh.ratios[static_cast<std::size_t>(k) - 2]);
    f << '\n';
  }
}

// One row per (n,k): L1 weight a_{n-k}^{(n)} and DCC weight p_{n-k}^{(n)}.
inline void write_kernel_csv(const std::string& path, const TimeMesh& mesh, double alpha) {
  auto f = open_out(path);
  f << "n,k,a,p\n";
  std::vector<L1KernelRow> rows;
  rows.reserve(static_cast<std::size_t>(mesh.levels()));
  for (int n = 1; n <= mesh.levels(); ++n) rows.push_back(l1_row(mesh, n, alpha));
  for (int n = 1; n <= mesh.levels(); ++n) {
    const DccKernelRow p = dcc_row(std::span<const L1KernelRow>(rows.data(),
                                                                static_cast<std::size_t>(n)));
    for (int k = 1; k <= n; ++k)
      f << n << ',' << k << ','
        << fmt_full(rows[static_cast<std::size_t>(n) - 1].a[static_cast<std::size_t>(n - k)])
        << ',' << fmt_full(p.p[static_cast<std::size_t>(n - k)]) << '\n';
  }
}

inline void write_errors_csv(const std::string& path, const MmsConfig& cfg,
                             const std::vector<ConvergenceRow>& rows) {
  auto f = open_out(path);
  f << "alpha,sigma,gamma,N,M,tau_max,e_N,order_pairwise,order_lsq,seed\n";
  for (const auto& r : rows)
    f << fmt_full(cfg.alpha) << ',' << fmt_full(cfg.sigma) << ',' << fmt_full(cfg.gamma) << ','
      << r.N << ',' << r.M << ',' << fmt_full(r.tau_max) << ',' << fmt_full(r.err) << ','
      << fmt_full(r.order_pair) << ',' << fmt_full(r.order_lsq) << ',' << r.seed << '\n';
}

// Plain-text matrix, M rows by M columns; row i is the line of constant x_i.
inline void write_field_csv(const std::string& path, const Field2D& v) {
  auto f = open_out(path);
  const int M = v.M();
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      if (j) f << ',';
      f << fmt_full(v(i, j));
    }
    f << '\n';
  }
}

// 8-bit binary PGM. Values map linearly from [min,max] to [0,255]; the
// mapping is recorded in the header comment. Raster row r is grid row i
// (constant x), column c is the y index j.
inline void write_field_pgm(const std::string& path, const Field2D& v) {
  const int M = v.M();
  double lo = v[0], hi = v[0];
  for (std::size_t k = 0; k < v.size(); ++k) {
    lo = std::min(lo, v[k]);
    hi = std::max(hi, v[k]);
  }
  auto f = open_out(path);
  f << "P5\n# linear map [" << fmt_full(lo) << ", " << fmt_full(hi) << "] -> [0, 255]\n"
    << M << ' ' << M << "\n255\n";
  const double scale = (hi > lo) ? 255.0 / (hi - lo) : 0.0;
  std::vector<unsigned char> raster(v.size());
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      raster[static_cast<std::size_t>(i) * M + j] =
          static_cast<unsigned char>(scale * (v(i, j) - lo) + 0.5);
  f.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

inline void write_sidecar(const std::string& path,
                          const std::vector<std::pair<std::string, std::string>>& kv) {
  auto f = open_out(path);
  for (const auto& [k, v] : kv) f << k << " = " << v << '\n';
}

}  // namespace tfsh
