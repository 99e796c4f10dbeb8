#pragma once

// Variable-step L1 convolution kernels for the Caputo derivative and the
// discrete complementary convolution (DCC) kernels.
//
// The L1 weights come from the exact antiderivative of the kernel
// omega_{1-alpha}: integrating over the cell [t_{k-1}, t_k] gives
//
//   a_{n-k}^{(n)} = (omega_{2-alpha}(t_n - t_{k-1}) - omega_{2-alpha}(t_n - t_k)) / tau_k,
//
// evaluated through omega_diff() so nearly-equal arguments do not cancel.
// Rows are immutable once built. Coefficients are stored by history
// distance d = n - k, i.e. a[0] is the weight of the newest difference.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfsh/field.hpp"
#include "tfsh/math.hpp"
#include "tfsh/operators.hpp"
#include "tfsh/time_mesh.hpp"

namespace tfsh {

struct L1KernelRow {
  int n = 0;               // time level, 1-based
  std::vector<double> a;   // a[d] = a_d^{(n)}, d = 0..n-1

  double a0() const { return a[0]; }
};

struct DccKernelRow {
  int n = 0;
  std::vector<double> p;   // p[d] = p_d^{(n)}, d = 0..n-1
};

inline L1KernelRow l1_row(const TimeMesh& mesh, int n, double alpha) {
  if (n < 1 || n > mesh.levels())
    throw std::out_of_range("l1_row: level " + std::to_string(n) + " outside 1.." +
                            std::to_string(mesh.levels()));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("l1_row: alpha must lie in (0,1)");
  const double beta = 2.0 - alpha;
  const double tn = mesh.t(n);
  L1KernelRow row;
  row.n = n;
  row.a.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double d1 = tn - mesh.t(k - 1);
    const double d0 = tn - mesh.t(k);
    row.a[static_cast<std::size_t>(n - k)] = omega_diff(beta, d1, k == n ? 0.0 : d0) / mesh.tau(k);
  }
  return row;
}

// DCC recursion: p_0^{(n)} = 1/a_0^{(n)} and
// p_{n-k}^{(n)} = (1/a_0^{(k)}) sum_{j=k+1}^{n} (a_{j-k-1}^{(j)} - a_{j-k}^{(j)}) p_{n-j}^{(n)}.
// The resulting row is complementary to the L1 kernels:
// sum_{j=k}^{n} p_{n-j}^{(n)} a_{j-k}^{(j)} = 1 for every 1 <= k <= n.
inline DccKernelRow dcc_row(std::span<const L1KernelRow> rows) {
  const int n = static_cast<int>(rows.size());
  if (n < 1) throw std::invalid_argument("dcc_row: need at least one L1 row");
  for (int j = 1; j <= n; ++j)
    if (rows[static_cast<std::size_t>(j) - 1].n != j ||
        rows[static_cast<std::size_t>(j) - 1].a.size() != static_cast<std::size_t>(j))
      throw std::invalid_argument("dcc_row: rows[" + std::to_string(j - 1) +
                                  "] is not the L1 row of level " + std::to_string(j));
  DccKernelRow out;
  out.n = n;
  out.p.resize(static_cast<std::size_t>(n));
  out.p[0] = 1.0 / rows[static_cast<std::size_t>(n) - 1].a[0];
  for (int k = n - 1; k >= 1; --k) {
    double s = 0.0;
    for (int j = k + 1; j <= n; ++j) {
      const auto& aj = rows[static_cast<std::size_t>(j) - 1].a;
      s += (aj[static_cast<std::size_t>(j - k) - 1] - aj[static_cast<std::size_t>(j - k)]) *
           out.p[static_cast<std::size_t>(n - j)];
    }
    out.p[static_cast<std::size_t>(n - k)] = s / rows[static_cast<std::size_t>(k) - 1].a[0];
  }
  return out;
}

// Same row computed with O(n) memory: stream the L1 rows once, from level n
// down to 1. When row j is visited, every contribution to p_{n-j}^{(n)} from
// rows j+1..n has already been accumulated, so p_{n-j} can be finalised
// before row j's own contributions are scattered to lower levels.
inline DccKernelRow dcc_row_streaming(const TimeMesh& mesh, double alpha, int n) {
  if (n < 1 || n > mesh.levels()) throw std::out_of_range("dcc_row_streaming: bad level");
  DccKernelRow out;
  out.n = n;
  out.p.resize(static_cast<std::size_t>(n));
  std::vector<double> acc(static_cast<std::size_t>(n) + 1, 0.0);
  for (int j = n; j >= 1; --j) {
    const L1KernelRow row = l1_row(mesh, j, alpha);
    const double pj = (j == n) ? 1.0 / row.a[0] : acc[static_cast<std::size_t>(j)] / row.a[0];
    out.p[static_cast<std::size_t>(n - j)] = pj;
    for (int k = 1; k < j; ++k)
      acc[static_cast<std::size_t>(k)] +=
          (row.a[static_cast<std::size_t>(j - k) - 1] - row.a[static_cast<std::size_t>(j - k)]) * pj;
  }
  return out;
}

// max_k |sum_{j=k}^{n} p_{n-j} a_{j-k}^{(j)} - 1| over 1 <= k <= n
inline double complementarity_defect(std::span<const L1KernelRow> rows, const DccKernelRow& p) {
  const int n = p.n;
  double worst = 0.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = k; j <= n; ++j)
      s += p.p[static_cast<std::size_t>(n - j)] *
           rows[static_cast<std::size_t>(j) - 1].a[static_cast<std::size_t>(j - k)];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

// Incremental evaluation of the DCC-weighted history sum
//
//   S_n = sum_{j=1}^{n} p_{n-j}^{(n)} c_j ,   c_j >= 0,
//
// in O(n) work per level instead of rebuilding the O(n^2) DCC row each step.
// Writing the complementarity identity as the triangular system A^T p = 1
// with A[j][k] = a_{j-k}^{(j)} gives S_n = p.c = 1.q where A q = c. Rows of
// A never change once written, so q grows by one entry per level using only
// the current L1 row:
//
//   q_n = (c_n - sum_{k<n} a_{n-k}^{(n)} q_k) / a_0^{(n)},   S_n = S_{n-1} + q_n.
//
// Individual q_k are signed; only the running sum is meaningful.
class DccHistorySum {
 public:
  // row_n must be the L1 row of level size()+1.
  void push(double c_n, const L1KernelRow& row_n) {
    const int n = static_cast<int>(q_.size()) + 1;
    if (row_n.n != n)
      throw std::invalid_argument("DccHistorySum::push: expected L1 row of level " +
                                  std::to_string(n) + ", got " + std::to_string(row_n.n));
    double acc = c_n;
    for (int k = 1; k < n; ++k)
      acc -= row_n.a[static_cast<std::size_t>(n - k)] * q_[static_cast<std::size_t>(k) - 1];
    q_.push_back(acc / row_n.a[0]);
    sum_ += q_.back();
  }

  double value() const { return sum_; }
  int level() const { return static_cast<int>(q_.size()); }

 private:
  std::vector<double> q_;
  double sum_ = 0.0;
};

// D_tau^alpha v^n = sum_{k=1}^{n} a_{n-k}^{(n)} (v^k - v^{k-1}), pointwise.
// diff_history[k-1] holds the difference of level k.
inline Field2D caputo_apply(std::span<const Field2D> diff_history, const L1KernelRow& row) {
  const int n = row.n;
  if (static_cast<int>(diff_history.size()) != n)
    throw std::invalid_argument("caputo_apply: history length " +
                                std::to_string(diff_history.size()) + " != level " +
                                std::to_string(n));
  Field2D out(diff_history[0].grid());
  const std::size_t sz = out.size();
  for (int k = 1; k <= n; ++k) {
    const double w = row.a[static_cast<std::size_t>(n - k)];
    const double* d = diff_history[static_cast<std::size_t>(k) - 1].data();
    double* o = out.data();
    for (std::size_t m = 0; m < sz; ++m) o[m] += w * d[m];
  }
  return out;
}

// Approximate caputo_apply with a guaranteed per-point bound: history terms
// are dropped from the oldest end while the accumulated bound
// sum_k a_{n-k} * max|diff^k| stays within tol. Terms are summed oldest to
// newest, matching caputo_apply's order, so with tol = 0 the result is
// bit-identical to the direct sum. Worst case nothing is dropped, so the
// tolerance is always achievable.
inline Field2D fast_history_apply(std::span<const Field2D> diff_history, const L1KernelRow& row,
                                  double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("fast_history_apply: tol must be >= 0");
  const int n = row.n;
  if (static_cast<int>(diff_history.size()) != n)
    throw std::invalid_argument("fast_history_apply: history length mismatch");
  int first = 1;  // first retained level
  double budget = tol;
  for (int k = 1; k < n; ++k) {  // never drop the newest difference
    const double term =
        row.a[static_cast<std::size_t>(n - k)] * norm_linf(diff_history[static_cast<std::size_t>(k) - 1]);
    if (term > budget) break;
    budget -= term;
    first = k + 1;
  }
  Field2D out(diff_history[0].grid());
  const std::size_t sz = out.size();
  for (int k = first; k <= n; ++k) {
    const double w = row.a[static_cast<std::size_t>(n - k)];
    const double* d = diff_history[static_cast<std::size_t>(k) - 1].data();
    double* o = out.data();
    for (std::size_t m = 0; m < sz; ++m) o[m] += w * d[m];
  }
  return out;
}

}  // namespace tfsh
