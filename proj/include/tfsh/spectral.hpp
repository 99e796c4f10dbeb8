#pragma once

// Modal solve of (a0*I + (1 + Lap_h)^2) w = rhs on the periodic grid.
//
// The five-point Laplacian is diagonal in the discrete Fourier basis with
// eigenvalues lambda_pq = -(4/h^2)(sin^2(pi p/M) + sin^2(pi q/M)), so the
// solve is one forward r2c transform, a pointwise division by
// a0 + (1 + lambda_pq)^2, and an inverse transform. The denominator is
// >= a0 > 0 for every mode, so the solve is well posed for any rhs.
//
// Plans are created with FFTW_ESTIMATE: planning is then deterministic and
// does not touch the input arrays. FFTW plan creation/destruction is not
// thread safe, so those calls are serialised on a global mutex; execution
// uses per-instance buffers and needs no locking.

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "tfsh/field.hpp"

namespace tfsh {

namespace detail {
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class SpectralSolver {
 public:
  explicit SpectralSolver(const Grid2D& g) : grid_(g) {
    const int M = g.M;
    const int K = M / 2 + 1;
    real_ = fftw_alloc_real(static_cast<std::size_t>(M) * M);
    cplx_ = fftw_alloc_complex(static_cast<std::size_t>(M) * K);
    if (!real_ || !cplx_) throw std::bad_alloc();
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fwd_ = fftw_plan_dft_r2c_2d(M, M, real_, cplx_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(M, M, cplx_, real_, FFTW_ESTIMATE);
    }
    if (!fwd_ || !bwd_) throw std::runtime_error("SpectralSolver: FFTW planning failed");

    // (1 + lambda_pq)^2 for the r2c layout: p full range, q = 0..M/2
    sym_.resize(static_cast<std::size_t>(M) * K);
    const double pi = std::acos(-1.0);
    const double c = 4.0 / (g.h * g.h);
    std::vector<double> s2(static_cast<std::size_t>(M));
    for (int p = 0; p < M; ++p) {
      const double s = std::sin(pi * p / M);
      s2[static_cast<std::size_t>(p)] = s * s;
    }
    for (int p = 0; p < M; ++p)
      for (int q = 0; q < K; ++q) {
        const double lam = -c * (s2[static_cast<std::size_t>(p)] + s2[static_cast<std::size_t>(q)]);
        const double onep = 1.0 + lam;
        sym_[static_cast<std::size_t>(p) * K + q] = onep * onep;
      }
  }

  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  ~SpectralSolver() {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  const Grid2D& grid() const { return grid_; }

  Field2D solve(double a0, const Field2D& rhs) {
    if (!(a0 > 0.0)) throw std::domain_error("SpectralSolver::solve: a0 must be positive");
    if (!(rhs.grid() == grid_))
      throw std::invalid_argument("SpectralSolver::solve: rhs grid mismatch");
    const int M = grid_.M;
    const int K = M / 2 + 1;
    const std::size_t sz = rhs.size();
    for (std::size_t k = 0; k < sz; ++k) real_[k] = rhs[k];
    fftw_execute(fwd_);
    const double scale = 1.0 / (static_cast<double>(M) * M);
    for (std::size_t m = 0; m < static_cast<std::size_t>(M) * K; ++m) {
      const double inv = scale / (a0 + sym_[m]);
      cplx_[m][0] *= inv;
      cplx_[m][1] *= inv;
    }
    fftw_execute(bwd_);
    Field2D out(grid_);
    for (std::size_t k = 0; k < sz; ++k) out[k] = real_[k];
    return out;
  }

 private:
  Grid2D grid_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
  std::vector<double> sym_;  // (1 + lambda_pq)^2
};

}  // namespace tfsh
