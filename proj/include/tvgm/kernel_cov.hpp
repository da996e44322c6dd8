#ifndef TVGM_KERNEL_COV_HPP
#define TVGM_KERNEL_COV_HPP

#include "tvgm/data_model.hpp"

namespace tvgm {

enum class KernelFamily { epanechnikov };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double bandwidth = 0.3;
};

template <typename Scalar>
constexpr Scalar epanechnikov(Scalar u) {
  return (u <= Scalar(1) && u >= Scalar(-1)) ? Scalar(0.75) * (Scalar(1) - u * u) : Scalar(0);
}

inline double kernel_value(const KernelSpec& kernel, double u) {
  switch (kernel.family) {
    case KernelFamily::epanechnikov: return epanechnikov(u);
  }
  return 0.0;
}

struct KernelWeights {
  Vector weights;          // K_h(Z_i - z) = K((Z_i - z) / h) / h
  double kernel_mass = 0;  // (1/n) sum_i K_h(Z_i - z)
  double support_fraction = 0;
};

KernelWeights kernel_weights(const Vector& z_obs, double z, const KernelSpec& kernel);

struct SmoothedCovariance {
  double z = 0;
  Matrix matrix;
  double kernel_mass = 0;
  double support_fraction = 0;
};

// sum_i K_h(Z_i - z) X_i Y_i^T / sum_i K_h(Z_i - z). Not symmetrized.
SmoothedCovariance smoothed_cov_inter(const Vector& z_obs, const Matrix& x, const Matrix& y,
                                      double z, const KernelSpec& kernel);
SmoothedCovariance smoothed_cov_inter(const PairedDataset& ds, double z,
                                      const KernelSpec& kernel);

SmoothedCovariance smoothed_cov_within(const Matrix& obs, const Vector& z_obs, double z,
                                       const KernelSpec& kernel);

// Average of the inter-subject estimate over all unordered subject pairs.
SmoothedCovariance smoothed_cov_ustat(const MultiSubjectDataset& ds, double z,
                                      const KernelSpec& kernel);

// c * n^(-1/5).
double choose_bandwidth(int n, double c = 1.2);

// Smallest fraction of observations with nonzero weight over the grid.
double min_support_fraction(const Vector& z_obs, const Vector& grid, double h);

// `size` evenly spaced points on [min Z_i, max Z_i].
Vector evaluation_grid(const Vector& z_obs, int size = 50);

}  // namespace tvgm

#endif  // TVGM_KERNEL_COV_HPP
