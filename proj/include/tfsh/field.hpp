#pragma once

// Doubly periodic M x M grid functions on the square (0,L)^2.
//
// Storage convention, fixed here and nowhere else: values are row-major with
// index i selecting the x coordinate and j the y coordinate,
// v(i,j) = data[i*M + j], i,j = 0..M-1, grid points x_i = i*h, y_j = j*h.
// Snapshot writers emit row i of the matrix as the line of constant x_i.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfsh {

struct Grid2D {
  double L = 0.0;
  int M = 0;
  double h = 0.0;

  static Grid2D square(double L, int M) {
    if (!(L > 0.0)) throw std::invalid_argument("Grid2D: L must be positive");
    if (M < 2) throw std::invalid_argument("Grid2D: M must be >= 2");
    return Grid2D{L, M, L / M};
  }

  double x(int i) const { return h * i; }
  double y(int j) const { return h * j; }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.L == b.L && a.M == b.M;
  }
};

class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid2D& g, double fill = 0.0)
      : grid_(g), v_(static_cast<std::size_t>(g.M) * g.M, fill) {}

  const Grid2D& grid() const { return grid_; }
  int M() const { return grid_.M; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.M + j]; }
  double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * grid_.M + j]; }
  double& operator[](std::size_t k) { return v_[k]; }
  double operator[](std::size_t k) const { return v_[k]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  Grid2D grid_;
  std::vector<double> v_;
};

inline void require_same_grid(const Field2D& a, const Field2D& b, const char* who) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(who) + ": fields live on different grids");
}

}  // namespace tfsh
