#ifndef TVGM_STEPDOWN_HPP
#define TVGM_STEPDOWN_HPP

#include "tvgm/debias_boot.hpp"

#include <cstdint>
#include <vector>

namespace tvgm {

enum class DegreeAggregation {
  per_time,  // max over z of max_degree(R(z))
  union_all  // max_degree of the union of R(z) over z
};

enum class CriticalSets {
  exact,     // critical_set(E_{t-1}(z), P)
  all_pairs  // every pair at every iteration (conservative)
};

struct TestConfig {
  double alpha = 0.05;
  int B = 500;
  int grid_size = 50;
  // Bandwidth; <= 0 selects h_const * n^(-1/5).
  double h = 0.0;
  double h_const = 1.2;
  // Sparsity level; <= 0 selects lambda_const * (h^2 + sqrt(log(d/h)/(nh))),
  // or cross-validation over cv_constants when cross_validate is set.
  double lambda = 0.0;
  double lambda_const = 0.9;
  bool cross_validate = false;
  std::vector<double> cv_constants = {0.5, 0.7, 0.9, 1.1, 1.4, 1.7, 2.0};
  int cv_folds = 5;
  bool symmetrize_input = true;
  OutputSymmetrization symmetrize_output = OutputSymmetrization::min_magnitude;
  DegreeAggregation aggregation = DegreeAggregation::per_time;
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;
};

struct QuantileStep {
  int iteration = 0;
  std::size_t edge_count = 0;  // selected edges summed over the grid
  double c = 0;
};

struct TestOutcome {
  bool reject = false;
  std::vector<EdgeSet> rejected_edges;  // R(z) (max-degree test) or E_t(z) (step-down)
  int d_rej = 0;
  std::vector<QuantileStep> quantile_trace;
  int iterations = 0;
  double h = 0;
  double lambda = 0;
  Vector grid;
};

// Bandwidth, lambda and grid resolved from the config, then the full
// estimation pipeline on the grid.
FieldEstimate prepare_field(const PairedDataset& ds, const TestConfig& cfg);

// Seed of the bootstrap used at step-down iteration t (t = 1 is shared with
// the max-degree test).
std::uint64_t bootstrap_seed(std::uint64_t seed, int iteration);

// {e in selector(z) : statistic_e(z) > c} per grid point.
std::vector<EdgeSet> rejected_sets(const PairedDataset& ds, const FieldEstimate& est,
                                   const EdgeSelector& selector, double c);

int rejected_degree(const std::vector<EdgeSet>& rejected, DegreeAggregation aggregation);

TestOutcome test_max_degree(const PairedDataset& ds, int k, const TestConfig& cfg);
TestOutcome test_max_degree(const PairedDataset& ds, const FieldEstimate& est, int k,
                            const TestConfig& cfg);
// Decision from a precomputed bootstrap.
TestOutcome test_max_degree(const PairedDataset& ds, const FieldEstimate& est, int k,
                            const TestConfig& cfg, const BootstrapResult& bootstrap);

TestOutcome stepdown_test(const PairedDataset& ds, const GraphProperty& p,
                          const TestConfig& cfg, CriticalSets mode = CriticalSets::exact);
TestOutcome stepdown_test(const PairedDataset& ds, const FieldEstimate& est,
                          const GraphProperty& p, const TestConfig& cfg,
                          CriticalSets mode = CriticalSets::exact);

}  // namespace tvgm

#endif  // TVGM_STEPDOWN_HPP
