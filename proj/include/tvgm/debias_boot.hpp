#ifndef TVGM_DEBIAS_BOOT_HPP
#define TVGM_DEBIAS_BOOT_HPP

#include "tvgm/clime.hpp"
#include "tvgm/graph_props.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace tvgm {

// Denominators with magnitude below this make the one-step correction
// undefined.
inline constexpr double kDenominatorGuard = 1e-6;

// theta_jk - theta_j^T (S theta_k - e_k) / (theta_j^T S_j), entrywise.
// `sigma` must be the matrix the precision estimate was fitted to.
Matrix debias(const Matrix& theta, const Matrix& sigma, double z = 0.0);

// theta_j^T S_j for every column j.
Vector debias_denominators(const Matrix& theta, const Matrix& sigma);

struct DebiasedField {
  Vector grid;
  std::vector<Matrix> theta_de;
  Vector kernel_mass;
  std::vector<Vector> denom;
};

// Everything the tests need on the evaluation grid.
struct FieldEstimate {
  KernelSpec kernel;
  ClimeConfig clime;
  std::vector<SmoothedCovariance> sigma;  // raw smoothed estimates
  std::vector<Matrix> clime_sigma;        // the matrices CLIME was fitted to
  // De-biasing and the bootstrap use theta[g].columns.
  std::vector<PrecisionEstimate> theta;
  DebiasedField field;
  // Use (X_i Y_i^T + Y_i X_i^T) / 2 in the bootstrap summands; mirrors
  // clime.symmetrize_input.
  bool symmetric_summands = true;
  bool within = false;
};

// Smoothed covariance, CLIME and the de-biased statistics on every grid
// point. `within` swaps in the within-subject covariance of x.
FieldEstimate estimate_field(const PairedDataset& ds, const KernelSpec& kernel,
                             const Vector& grid, const ClimeConfig& clime, int jobs = 1,
                             bool within = false);

struct EdgeSelector {
  enum class Mode { all_pairs, per_time_sets };
  Mode mode = Mode::all_pairs;
  std::vector<EdgeSet> sets;

  static EdgeSelector all_pairs() { return {}; }
  static EdgeSelector per_time(std::vector<EdgeSet> sets) {
    return {Mode::per_time_sets, std::move(sets)};
  }

  friend bool operator==(const EdgeSelector&, const EdgeSelector&) = default;
};

// sqrt(nh) * kernel_mass(z) * max(|de_jk - ref_jk|, |de_kj - ref_kj|) for
// every unordered pair at grid point g. Symmetric with zero diagonal.
Matrix edge_statistics(const DebiasedField& field, std::size_t g, Eigen::Index n, double h,
                       const Matrix* reference = nullptr);

// Grid maximum of the sup-max statistic over the selected edges. An empty
// `reference` means Theta = 0 (the plug-in rejection statistic).
double test_statistic(const DebiasedField& field, const EdgeSelector& selector,
                      const std::vector<Matrix>& reference, Eigen::Index n, double h);

struct BootstrapResult {
  std::vector<double> samples;
  std::map<double, double> quantile_cache;
  int B = 0;
  std::uint64_t seed = 0;

  double cached_quantile(double alpha);
};

// ceil((1 - alpha) B)-th smallest sample.
double quantile(const BootstrapResult& result, double alpha);

// B x n standard normal multipliers, one independent stream per draw.
Matrix draw_multipliers(int B, Eigen::Index n, std::uint64_t seed);

BootstrapResult bootstrap_draws(const PairedDataset& ds, const FieldEstimate& est,
                                const EdgeSelector& selector, int B, std::uint64_t seed,
                                int jobs = 1);

// Same statistic with caller-supplied multipliers (rows are draws).
BootstrapResult bootstrap_with_multipliers(const PairedDataset& ds, const FieldEstimate& est,
                                           const EdgeSelector& selector,
                                           const Matrix& multipliers, int jobs = 1);

}  // namespace tvgm

#endif  // TVGM_DEBIAS_BOOT_HPP
