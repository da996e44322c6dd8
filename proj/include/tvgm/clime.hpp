#ifndef TVGM_CLIME_HPP
#define TVGM_CLIME_HPP

#include "tvgm/kernel_cov.hpp"

#include <cstdint>
#include <vector>

namespace tvgm {

enum class OutputSymmetrization { none, min_magnitude };

struct ClimeConfig {
  double lambda = 0.1;
  // Replace the smoothed covariance by (S + S^T) / 2 before solving.
  bool symmetrize_input = true;
  OutputSymmetrization symmetrize_output = OutputSymmetrization::min_magnitude;
  double lp_tolerance = 1e-9;
};

struct PrecisionEstimate {
  double z = 0;
  Matrix matrix;
  // Column solutions before output symmetrization. Each satisfies the CLIME
  // constraint, so (S theta_j)_j >= 1 - lambda; de-biasing uses these.
  Matrix columns;
  // ||S theta_j - e_j||_inf per column, measured before output symmetrization.
  Vector column_feasibility;
};

// argmin ||theta||_1 subject to ||S theta - e_j||_inf <= lambda, solved as an
// LP over (theta+, theta-) >= 0.
Vector clime_column(const Matrix& sigma_hat, int j, double lambda, double tol = 1e-9);

PrecisionEstimate clime_full(const Matrix& sigma_hat, const ClimeConfig& config);

// The matrix CLIME actually sees under this config.
Matrix clime_input(const Matrix& sigma_hat, const ClimeConfig& config);

// lambda = c * (h^2 + sqrt(log(d / h) / (n h))).
double lambda_rate(int n, int d, double h);

struct CvRow {
  double lambda = 0;
  double cv = 0;
  double sd = 0;
};

struct CvResult {
  double lambda_star = 0;
  std::size_t index = 0;
  std::vector<CvRow> table;
};

// L-fold cross-validation over a random partition of the time points. For
// fold l and each held-out Z_i, the held-out smoothed covariance is paired
// with the CLIME fit on the remaining folds and scored by
// ||S^(l)(Z_i) Theta^(-l)(Z_i) - I||_max. Returns the smallest lambda whose
// score is within two fold-level standard deviations of the minimum.
CvResult cross_validate_lambda(const PairedDataset& ds, const KernelSpec& kernel,
                               const std::vector<double>& lambda_grid, int folds,
                               std::uint64_t seed, const ClimeConfig& base = {},
                               int jobs = 1);

}  // namespace tvgm

#endif  // TVGM_CLIME_HPP
