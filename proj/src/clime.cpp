#include "tvgm/clime.hpp"

#include "tvgm/parallel.hpp"
#include "tvgm/random.hpp"
#include "tvgm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tvgm {

Vector clime_column(const Matrix& sigma_hat, int j, double lambda, double tol) {
  const auto d = sigma_hat.rows();
  if (sigma_hat.cols() != d) throw DataError("clime_column: covariance is not square");
  if (j < 0 || j >= d) throw DataError("clime_column: column index out of range");
  if (!(lambda >= 0.0)) throw DataError("clime_column: lambda must be nonnegative");

  Matrix A(2 * d, 2 * d);
  A << sigma_hat, -sigma_hat, -sigma_hat, sigma_hat;
  Vector b(2 * d);
  b.head(d).setConstant(lambda);
  b.tail(d).setConstant(lambda);
  b(j) += 1.0;
  b(d + j) -= 1.0;
  const Vector c = Vector::Ones(2 * d);

  LpOptions options;
  options.max_iterations = static_cast<int>(std::max<Eigen::Index>(50 * d * d, 100));
  options.tolerance = std::min(1e-10, tol);
  const LpResult<double> lp = solve_lp<double>(A, b, c, options);

  if (lp.status == LpStatus::infeasible)
    throw InfeasibleError(j, lambda,
                          "CLIME column " + std::to_string(j + 1) +
                              " is infeasible at lambda = " + std::to_string(lambda));
  if (lp.status != LpStatus::optimal) {
    std::ostringstream msg;
    msg << "CLIME column " << j + 1 << " did not converge within "
        << options.max_iterations << " simplex iterations (lambda = " << lambda << ")";
    throw SolverStallError(j, std::numeric_limits<double>::quiet_NaN(), msg.str());
  }
  Vector theta = lp.x.head(d) - lp.x.tail(d);
  Vector residual = sigma_hat * theta;
  residual(j) -= 1.0;
  const double violation = residual.cwiseAbs().maxCoeff() - lambda;
  if (violation > tol * std::max(1.0, sigma_hat.cwiseAbs().maxCoeff()) + 1e-12)
    throw SolverStallError(j, violation,
                           "CLIME column " + std::to_string(j + 1) +
                               " violates its constraint by " + std::to_string(violation));
  return theta;
}

Matrix clime_input(const Matrix& sigma_hat, const ClimeConfig& config) {
  if (config.symmetrize_input) return 0.5 * (sigma_hat + sigma_hat.transpose());
  return sigma_hat;
}

PrecisionEstimate clime_full(const Matrix& sigma_hat, const ClimeConfig& config) {
  if (!(config.lambda > 0.0)) throw UsageError("CLIME lambda must be positive");
  if (!(config.lp_tolerance > 0.0 && config.lp_tolerance <= 1e-4))
    throw UsageError("CLIME lp_tolerance must lie in (0, 1e-4]");
  if (!sigma_hat.allFinite()) throw DataError("CLIME input contains non-finite entries");

  const Matrix sigma = clime_input(sigma_hat, config);
  const auto d = sigma.rows();
  PrecisionEstimate est;
  est.matrix.resize(d, d);
  est.column_feasibility.resize(d);

  std::vector<std::string> failures;
  int first_failure = -1;
  bool infeasible = false;
  for (Eigen::Index j = 0; j < d; ++j) {
    try {
      est.matrix.col(j) = clime_column(sigma, static_cast<int>(j), config.lambda,
                                       config.lp_tolerance);
      Vector r = sigma * est.matrix.col(j);
      r(j) -= 1.0;
      est.column_feasibility(j) = r.cwiseAbs().maxCoeff();
    } catch (const NumericalError& e) {
      if (first_failure < 0) {
        first_failure = static_cast<int>(j);
        infeasible = dynamic_cast<const InfeasibleError*>(&e) != nullptr;
      }
      failures.push_back(e.what());
    }
  }
  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) + " CLIME column(s) failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    if (infeasible) throw InfeasibleError(first_failure, config.lambda, msg);
    throw SolverStallError(first_failure, std::numeric_limits<double>::quiet_NaN(), msg);
  }

  est.columns = est.matrix;
  if (config.symmetrize_output == OutputSymmetrization::min_magnitude) {
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = j + 1; k < d; ++k) {
        const double a = est.matrix(j, k);
        const double b = est.matrix(k, j);
        const double keep = std::abs(a) <= std::abs(b) ? a : b;
        est.matrix(j, k) = est.matrix(k, j) = keep;
      }
  }
  return est;
}

double lambda_rate(int n, int d, double h) {
  return h * h + std::sqrt(std::log(d / h) / (n * h));
}

CvResult cross_validate_lambda(const PairedDataset& ds, const KernelSpec& kernel,
                               const std::vector<double>& lambda_grid, int folds,
                               std::uint64_t seed, const ClimeConfig& base, int jobs) {
  if (lambda_grid.empty()) throw UsageError("cross-validation needs a nonempty lambda grid");
  if (folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  const auto n = ds.n();
  if (folds > n) throw UsageError("more folds than observations");
  for (double l : lambda_grid)
    if (!(l > 0.0)) throw UsageError("lambda grid entries must be positive");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, "cv_folds");
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(n);
  for (Eigen::Index r = 0; r < n; ++r) fold_of[order[r]] = static_cast<int>(r % folds);

  struct FoldData {
    PairedDataset held_out;
    PairedDataset training;
  };
  std::vector<FoldData> parts(folds);
  for (int l = 0; l < folds; ++l) {
    std::vector<Eigen::Index> in, out;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[i] == l ? in : out).push_back(i);
    auto take = [&](const std::vector<Eigen::Index>& idx) {
      return PairedDataset{ds.z(idx), ds.x(idx, Eigen::all), ds.y(idx, Eigen::all)};
    };
    parts[l] = {take(in), take(out)};
  }

  const std::size_t n_lambda = lambda_grid.size();
  // scores[i * n_lambda + a]: contribution of observation i at lambda a.
  std::vector<double> scores(static_cast<std::size_t>(n) * n_lambda, 0.0);
  const Matrix eye = Matrix::Identity(ds.d(), ds.d());
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    const int l = fold_of[i];
    const double zi = ds.z(static_cast<Eigen::Index>(i));
    try {
      const Matrix s_in =
          clime_input(smoothed_cov_inter(parts[l].held_out, zi, kernel).matrix, base);
      const Matrix s_out = smoothed_cov_inter(parts[l].training, zi, kernel).matrix;
      for (std::size_t a = 0; a < n_lambda; ++a) {
        ClimeConfig cfg = base;
        cfg.lambda = lambda_grid[a];
        const PrecisionEstimate fit = clime_full(s_out, cfg);
        scores[i * n_lambda + a] = (s_in * fit.matrix - eye).cwiseAbs().maxCoeff();
      }
    } catch (const NoSupportError& e) {
      throw NoSupportError(e.z, e.h,
                           "cross-validation fold " + std::to_string(l + 1) +
                               " has no kernel support at z = " + std::to_string(zi) +
                               " (h = " + std::to_string(e.h) + ")");
    }
  });

  CvResult result;
  result.table.resize(n_lambda);
  for (std::size_t a = 0; a < n_lambda; ++a) {
    std::vector<double> fold_sum(folds, 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
      fold_sum[fold_of[i]] += scores[static_cast<std::size_t>(i) * n_lambda + a];
    const double mean = std::accumulate(fold_sum.begin(), fold_sum.end(), 0.0) / folds;
    double ss = 0.0;
    for (double s : fold_sum) ss += (s - mean) * (s - mean);
    result.table[a] = {lambda_grid[a], mean, std::sqrt(ss / (folds - 1))};
  }

  std::size_t best = 0;
  for (std::size_t a = 1; a < n_lambda; ++a)
    if (result.table[a].cv < result.table[best].cv) best = a;
  const double threshold = result.table[best].cv + 2.0 * result.table[best].sd;

  std::vector<std::size_t> by_lambda(n_lambda);
  std::iota(by_lambda.begin(), by_lambda.end(), 0);
  std::stable_sort(by_lambda.begin(), by_lambda.end(), [&](std::size_t a, std::size_t b) {
    return lambda_grid[a] < lambda_grid[b];
  });
  for (std::size_t a : by_lambda)
    if (result.table[a].cv <= threshold) {
      result.index = a;
      result.lambda_star = lambda_grid[a];
      break;
    }
  return result;
}

}  // namespace tvgm
