#include "tvgm/kernel_cov.hpp"

#include <cmath>

namespace tvgm {

namespace {

// Rows of the observations carrying positive weight, with those weights.
struct ActiveRows {
  std::vector<Eigen::Index> rows;
  Vector weights;
  double weight_sum = 0;
};

ActiveRows active_rows(const KernelWeights& kw) {
  ActiveRows active;
  for (Eigen::Index i = 0; i < kw.weights.size(); ++i)
    if (kw.weights(i) > 0.0) active.rows.push_back(i);
  active.weights.resize(static_cast<Eigen::Index>(active.rows.size()));
  for (std::size_t r = 0; r < active.rows.size(); ++r)
    active.weights(static_cast<Eigen::Index>(r)) = kw.weights(active.rows[r]);
  active.weight_sum = active.weights.sum();
  return active;
}

}  // namespace

KernelWeights kernel_weights(const Vector& z_obs, double z, const KernelSpec& kernel) {
  const double h = kernel.bandwidth;
  if (!(h > 0.0)) throw DataError("kernel bandwidth must be positive");
  KernelWeights kw;
  const auto n = z_obs.size();
  kw.weights.resize(n);
  Eigen::Index positive = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    kw.weights(i) = kernel_value(kernel, (z_obs(i) - z) / h) / h;
    positive += kw.weights(i) > 0.0;
  }
  kw.kernel_mass = n > 0 ? kw.weights.mean() : 0.0;
  kw.support_fraction = n > 0 ? static_cast<double>(positive) / static_cast<double>(n) : 0.0;
  if (!(kw.kernel_mass > 0.0))
    throw NoSupportError(z, h,
                         "no observation has positive kernel weight at z = " +
                             std::to_string(z) + " with h = " + std::to_string(h));
  return kw;
}

SmoothedCovariance smoothed_cov_inter(const Vector& z_obs, const Matrix& x, const Matrix& y,
                                      double z, const KernelSpec& kernel) {
  const KernelWeights kw = kernel_weights(z_obs, z, kernel);
  const ActiveRows active = active_rows(kw);
  const auto rows = Eigen::Map<const Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>>(
      active.rows.data(), static_cast<Eigen::Index>(active.rows.size()));
  const Matrix xs = x(rows, Eigen::all);
  const Matrix ys = y(rows, Eigen::all);
  SmoothedCovariance out;
  out.z = z;
  out.matrix = xs.transpose() * active.weights.asDiagonal() * ys / active.weight_sum;
  out.kernel_mass = kw.kernel_mass;
  out.support_fraction = kw.support_fraction;
  return out;
}

SmoothedCovariance smoothed_cov_inter(const PairedDataset& ds, double z,
                                      const KernelSpec& kernel) {
  return smoothed_cov_inter(ds.z, ds.x, ds.y, z, kernel);
}

SmoothedCovariance smoothed_cov_within(const Matrix& obs, const Vector& z_obs, double z,
                                       const KernelSpec& kernel) {
  SmoothedCovariance out = smoothed_cov_inter(z_obs, obs, obs, z, kernel);
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

SmoothedCovariance smoothed_cov_ustat(const MultiSubjectDataset& ds, double z,
                                      const KernelSpec& kernel) {
  if (ds.subjects.size() < 2) throw DataError("U-statistic estimator needs N >= 2 subjects");
  SmoothedCovariance out;
  out.z = z;
  out.matrix = Matrix::Zero(ds.d(), ds.d());
  int pairs = 0;
  for (std::size_t a = 0; a < ds.subjects.size(); ++a)
    for (std::size_t b = a + 1; b < ds.subjects.size(); ++b) {
      const SmoothedCovariance pair =
          smoothed_cov_inter(ds.z, ds.subjects[a], ds.subjects[b], z, kernel);
      out.matrix += pair.matrix;
      out.kernel_mass = pair.kernel_mass;
      out.support_fraction = pair.support_fraction;
      ++pairs;
    }
  out.matrix /= static_cast<double>(pairs);
  return out;
}

double choose_bandwidth(int n, double c) {
  if (n < 2) throw UsageError("bandwidth rule needs n >= 2");
  if (!(c > 0.0)) throw UsageError("bandwidth constant must be positive");
  return c * std::pow(static_cast<double>(n), -0.2);
}

double min_support_fraction(const Vector& z_obs, const Vector& grid, double h) {
  double worst = 1.0;
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    Eigen::Index inside = 0;
    for (Eigen::Index i = 0; i < z_obs.size(); ++i) inside += std::abs(z_obs(i) - grid(g)) < h;
    worst = std::min(worst, static_cast<double>(inside) / static_cast<double>(z_obs.size()));
  }
  return worst;
}

Vector evaluation_grid(const Vector& z_obs, int size) {
  if (size < 2) throw UsageError("evaluation grid needs at least 2 points");
  return Vector::LinSpaced(size, z_obs.minCoeff(), z_obs.maxCoeff());
}

}  // namespace tvgm
