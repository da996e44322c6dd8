#ifndef TVGM_STUDIES_HPP
#define TVGM_STUDIES_HPP

#include "tvgm/stepdown.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tvgm {

struct Scenario {
  int d = 20;
  int k = 3;
  int n = 1000;
  double nuisance_scale = 0.1;
  bool alternative = true;
};

struct SimulatedData {
  PrecisionPath path;
  NuisanceCovariance lx;
  NuisanceCovariance ly;
  PairedDataset data;
};

// Path, nuisance covariances and sample, each from its own labeled stream.
SimulatedData simulate(const Scenario& scenario, std::uint64_t seed);

struct CalibrationOptions {
  double nuisance_scale = 0.1;
  bool run_null = true;
  bool run_alternative = true;
  std::string checkpoint;  // empty: no checkpointing
  bool resume = false;
  std::ostream* progress = nullptr;
};

struct CalibrationRow {
  int n = 0;
  double type_I = 0;
  double power = 0;
  double lambda = 0;
  int reps = 0;
};

// Lambda at each n: cfg.lambda if set; with cfg.cross_validate, chosen by
// cross-validation over cfg.cv_constants * rate on one null pilot
// replication and frozen; otherwise cfg.lambda_const * rate.
std::vector<CalibrationRow> calibration_study(int d, int k, const std::vector<int>& n_list,
                                              int reps, const TestConfig& cfg,
                                              const CalibrationOptions& options = {});

struct RocRow {
  std::string method;  // "inter" or "within"
  double z = 0;
  double lambda = 0;
  double tpr = 0;
  double fpr = 0;
};

struct SupportScore {
  double tpr = 0;
  double fpr = 0;
};

// Off-diagonal support of the estimate (|entry| > 1e-8) against the truth.
SupportScore score_support(const Matrix& estimate, const Eigen::MatrixXi& truth);

std::vector<RocRow> roc_study(const Scenario& scenario, const std::vector<double>& lambda_grid,
                              int reps, std::uint64_t seed,
                              const std::vector<double>& z_points = {0.25, 0.5, 0.75},
                              double h_const = 1.2, int jobs = 1,
                              std::ostream* progress = nullptr);

// Trapezoidal area under the (fpr, tpr) curve of one method at one z,
// anchored at (0, 0) and (1, 1).
double roc_auc(const std::vector<RocRow>& rows, const std::string& method, double z);

// Mean over replications of max_z ||Sigma_hat(z) - Sigma(z)||_max on the
// evaluation grid, with h = h_const * n^(-1/5).
double estimation_error_study(const Scenario& scenario, int reps, std::uint64_t seed,
                              int grid_size = 50, double h_const = 1.2);

void write_calibration_table(std::ostream& out, const std::vector<CalibrationRow>& rows);
void write_roc_table(std::ostream& out, const std::vector<RocRow>& rows);

}  // namespace tvgm

#endif  // TVGM_STUDIES_HPP
