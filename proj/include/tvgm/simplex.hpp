#ifndef TVGM_SIMPLEX_HPP
#define TVGM_SIMPLEX_HPP

#include "tvgm/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace tvgm {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  VectorX<Scalar> x;
  Scalar objective = 0;
  int iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  // Consecutive degenerate pivots tolerated under largest-coefficient
  // pricing before switching to Bland's rule.
  int degenerate_limit = 20;
};

// Dense two-phase primal simplex for
//   minimize c^T x  subject to  A x <= b,  x >= 0.
// Rows with negative right-hand side receive one artificial each. Pricing
// is largest-coefficient with a fall back to Bland's smallest-index rule on
// degenerate stretches; the ratio test breaks ties by smallest basic index.
template <typename Scalar>
LpResult<Scalar> solve_lp(const MatrixX<Scalar>& A, const VectorX<Scalar>& b,
                          const VectorX<Scalar>& c, const LpOptions& options = {}) {
  using Index = Eigen::Index;
  const Index m = A.rows();
  const Index n = A.cols();
  const Scalar tol = static_cast<Scalar>(options.tolerance);

  std::vector<Index> artificial_rows;
  for (Index i = 0; i < m; ++i)
    if (b(i) < 0) artificial_rows.push_back(i);
  const Index n_art = static_cast<Index>(artificial_rows.size());
  const Index cols = n + m + n_art;
  const Index rhs = cols;

  // Rows 0..m-1 constraints, row m objective.
  MatrixX<Scalar> T = MatrixX<Scalar>::Zero(m + 1, cols + 1);
  std::vector<Index> basis(m);
  for (Index i = 0; i < m; ++i) {
    T.row(i).head(n) = A.row(i);
    T(i, n + i) = 1;
    T(i, rhs) = b(i);
    basis[i] = n + i;
  }
  for (Index a = 0; a < n_art; ++a) {
    const Index i = artificial_rows[a];
    T.row(i).head(n + m) *= -1;
    T(i, rhs) = -T(i, rhs);
    T(i, n + m + a) = 1;
    basis[i] = n + m + a;
  }

  LpResult<Scalar> result;
  int iterations = 0;

  auto pivot = [&](Index p, Index q) {
    T.row(p) /= T(p, q);
    const VectorX<Scalar> column = T.col(q);
    for (Index i = 0; i <= m; ++i)
      if (i != p && column(i) != Scalar(0)) T.row(i) -= column(i) * T.row(p);
    basis[p] = q;
  };

  // Returns false when unbounded; throws nothing, reports via status.
  auto run = [&](Index eligible_cols) -> LpStatus {
    int degenerate = 0;
    while (true) {
      if (iterations >= options.max_iterations) return LpStatus::iteration_limit;
      const bool bland = degenerate >= options.degenerate_limit;
      Index q = -1;
      Scalar best = -tol;
      for (Index j = 0; j < eligible_cols; ++j) {
        const Scalar r = T(m, j);
        if (bland) {
          if (r < -tol) {
            q = j;
            break;
          }
        } else if (r < best) {
          best = r;
          q = j;
        }
      }
      if (q < 0) return LpStatus::optimal;

      Index p = -1;
      Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
      for (Index i = 0; i < m; ++i) {
        const Scalar a = T(i, q);
        if (a <= tol) continue;
        const Scalar ratio = T(i, rhs) / a;
        if (p < 0 || ratio < best_ratio - tol) {
          p = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + tol && basis[i] < basis[p]) {
          p = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (p < 0) return LpStatus::unbounded;
      degenerate = best_ratio <= tol ? degenerate + 1 : 0;
      pivot(p, q);
      ++iterations;
    }
  };

  if (n_art > 0) {
    for (Index a = 0; a < n_art; ++a) T.row(m) -= T.row(artificial_rows[a]);
    const LpStatus phase1 = run(n + m);
    if (phase1 == LpStatus::iteration_limit) {
      result.status = phase1;
      result.iterations = iterations;
      return result;
    }
    const Scalar scale = std::max<Scalar>(Scalar(1), b.cwiseAbs().maxCoeff());
    if (-T(m, rhs) > Scalar(1e-8) * scale) {
      result.status = LpStatus::infeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive artificials at zero level out of the basis where possible.
    for (Index i = 0; i < m; ++i) {
      if (basis[i] < n + m) continue;
      Index q = -1;
      for (Index j = 0; j < n + m; ++j)
        if (std::abs(T(i, j)) > Scalar(1e-9)) {
          q = j;
          break;
        }
      if (q >= 0) pivot(i, q);
    }
  }

  T.row(m).setZero();
  T.row(m).head(n) = c.transpose();
  for (Index i = 0; i < m; ++i)
    if (basis[i] < n && c(basis[i]) != Scalar(0)) T.row(m) -= c(basis[i]) * T.row(i);

  result.status = run(n + m);
  result.iterations = iterations;
  if (result.status != LpStatus::optimal) return result;

  // Recover the vertex from the original data so that tableau drift does not
  // leak into the solution.
  MatrixX<Scalar> B = MatrixX<Scalar>::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    const Index j = basis[i];
    if (j < n)
      B.col(i) = A.col(j);
    else if (j < n + m)
      B(j - n, i) = 1;
    else
      B(artificial_rows[j - n - m], i) = 1;
  }
  Eigen::FullPivLU<MatrixX<Scalar>> lu(B);
  VectorX<Scalar> xb;
  if (lu.isInvertible())
    xb = lu.solve(b);
  else
    xb = T.col(rhs).head(m);
  result.x = VectorX<Scalar>::Zero(n);
  for (Index i = 0; i < m; ++i)
    if (basis[i] < n) result.x(basis[i]) = std::max<Scalar>(xb(i), Scalar(0));
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace tvgm

#endif  // TVGM_SIMPLEX_HPP
