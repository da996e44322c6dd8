#include "tvgm/stepdown.hpp"

#include "tvgm/random.hpp"

#include <algorithm>

namespace tvgm {

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (B < 1) throw UsageError("bootstrap draw count must be at least 1");
  if (grid_size < 2) throw UsageError("grid size must be at least 2");
  if (h <= 0.0 && !(h_const > 0.0)) throw UsageError("bandwidth constant must be positive");
  if (lambda <= 0.0 && !cross_validate && !(lambda_const > 0.0))
    throw UsageError("lambda constant must be positive");
  if (cross_validate && (cv_constants.empty() || cv_folds < 2))
    throw UsageError("cross-validation needs constants and at least 2 folds");
  if (jobs < 1) throw UsageError("jobs must be at least 1");
}

FieldEstimate prepare_field(const PairedDataset& ds, const TestConfig& cfg) {
  cfg.validate();
  ds.validate();
  const int n = static_cast<int>(ds.n());
  const int d = static_cast<int>(ds.d());
  KernelSpec kernel;
  kernel.bandwidth = cfg.h > 0.0 ? cfg.h : choose_bandwidth(n, cfg.h_const);

  ClimeConfig clime;
  clime.symmetrize_input = cfg.symmetrize_input;
  clime.symmetrize_output = cfg.symmetrize_output;
  const double rate = lambda_rate(n, d, kernel.bandwidth);
  if (cfg.lambda > 0.0) {
    clime.lambda = cfg.lambda;
  } else if (cfg.cross_validate) {
    std::vector<double> grid;
    for (double c : cfg.cv_constants) grid.push_back(c * rate);
    clime.lambda = cross_validate_lambda(ds, kernel, grid, cfg.cv_folds,
                                         derive_seed(cfg.seed, "cv"), clime, cfg.jobs)
                       .lambda_star;
  } else {
    clime.lambda = cfg.lambda_const * rate;
  }
  return estimate_field(ds, kernel, evaluation_grid(ds.z, cfg.grid_size), clime, cfg.jobs);
}

std::uint64_t bootstrap_seed(std::uint64_t seed, int iteration) {
  return derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(iteration));
}

std::vector<EdgeSet> rejected_sets(const PairedDataset& ds, const FieldEstimate& est,
                                   const EdgeSelector& selector, double c) {
  const std::size_t G = est.field.theta_de.size();
  const int d = static_cast<int>(ds.d());
  std::vector<EdgeSet> out(G, EdgeSet(d));
  for (std::size_t g = 0; g < G; ++g) {
    const Matrix stat = edge_statistics(est.field, g, ds.n(), est.kernel.bandwidth);
    if (selector.mode == EdgeSelector::Mode::all_pairs) {
      for (int u = 0; u < d; ++u)
        for (int v = u + 1; v < d; ++v)
          if (stat(u, v) > c) out[g].insert({u, v});
    } else {
      for (const Edge& e : selector.sets[g])
        if (stat(e.u, e.v) > c) out[g].insert(e);
    }
  }
  return out;
}

int rejected_degree(const std::vector<EdgeSet>& rejected, DegreeAggregation aggregation) {
  if (rejected.empty()) return 0;
  if (aggregation == DegreeAggregation::union_all) {
    EdgeSet all(rejected.front().d());
    for (const auto& r : rejected) all = all.united(r);
    return max_degree(all);
  }
  int best = 0;
  for (const auto& r : rejected) best = std::max(best, max_degree(r));
  return best;
}

TestOutcome test_max_degree(const PairedDataset& ds, const FieldEstimate& est, int k,
                            const TestConfig& cfg, const BootstrapResult& bootstrap) {
  if (k < 0) throw UsageError("degree threshold k must be nonnegative");
  TestOutcome out;
  const double c = quantile(bootstrap, cfg.alpha);
  out.rejected_edges = rejected_sets(ds, est, EdgeSelector::all_pairs(), c);
  out.d_rej = rejected_degree(out.rejected_edges, cfg.aggregation);
  out.reject = out.d_rej > k;
  const auto d = static_cast<std::size_t>(ds.d());
  out.quantile_trace.push_back({1, est.field.grid.size() * d * (d - 1) / 2, c});
  out.iterations = 1;
  out.h = est.kernel.bandwidth;
  out.lambda = est.clime.lambda;
  out.grid = est.field.grid;
  return out;
}

TestOutcome test_max_degree(const PairedDataset& ds, const FieldEstimate& est, int k,
                            const TestConfig& cfg) {
  cfg.validate();
  const BootstrapResult boot = bootstrap_draws(ds, est, EdgeSelector::all_pairs(), cfg.B,
                                               bootstrap_seed(cfg.seed, 1), cfg.jobs);
  return test_max_degree(ds, est, k, cfg, boot);
}

TestOutcome test_max_degree(const PairedDataset& ds, int k, const TestConfig& cfg) {
  return test_max_degree(ds, prepare_field(ds, cfg), k, cfg);
}

TestOutcome stepdown_test(const PairedDataset& ds, const FieldEstimate& est,
                          const GraphProperty& p, const TestConfig& cfg, CriticalSets mode) {
  cfg.validate();
  const int d = static_cast<int>(ds.d());
  const std::size_t G = est.field.theta_de.size();
  TestOutcome out;
  out.h = est.kernel.bandwidth;
  out.lambda = est.clime.lambda;
  out.grid = est.field.grid;

  std::vector<EdgeSet> current(G, EdgeSet(d));
  EdgeSelector previous_selector;
  double previous_c = 0.0;
  bool have_previous = false;
  const int cap = std::max(1, d * d);

  for (int t = 1;; ++t) {
    if (t > cap)
      throw StallError("step-down did not halt within " + std::to_string(cap) + " iterations");
    std::vector<EdgeSet> critical(G);
    std::size_t selected = 0;
    for (std::size_t g = 0; g < G; ++g) {
      critical[g] = mode == CriticalSets::all_pairs ? EdgeSet::complete(d)
                                                    : critical_set(current[g], p);
      selected += critical[g].size();
    }
    out.iterations = t;

    std::vector<EdgeSet> next = current;
    bool grew = false;
    if (selected > 0) {
      EdgeSelector selector = EdgeSelector::per_time(std::move(critical));
      double c = previous_c;
      // The quantile depends only on the selector; an unchanged selector
      // reuses it.
      if (!have_previous || !(selector == previous_selector)) {
        const BootstrapResult boot =
            bootstrap_draws(ds, est, selector, cfg.B, bootstrap_seed(cfg.seed, t), cfg.jobs);
        c = quantile(boot, cfg.alpha);
      }
      out.quantile_trace.push_back({t, selected, c});
      const auto rejected = rejected_sets(ds, est, selector, c);
      for (std::size_t g = 0; g < G; ++g) {
        const EdgeSet merged = current[g].united(rejected[g]);
        if (merged.size() != current[g].size()) grew = true;
        next[g] = merged;
      }
      previous_selector = std::move(selector);
      previous_c = c;
      have_previous = true;
    }

    bool satisfied = false;
    for (std::size_t g = 0; g < G && !satisfied; ++g) satisfied = eval_property(p, next[g]);
    current = std::move(next);
    if (satisfied) {
      out.reject = true;
      break;
    }
    if (!grew) {
      out.reject = false;
      break;
    }
  }
  out.rejected_edges = current;
  out.d_rej = rejected_degree(current, cfg.aggregation);
  return out;
}

TestOutcome stepdown_test(const PairedDataset& ds, const GraphProperty& p,
                          const TestConfig& cfg, CriticalSets mode) {
  return stepdown_test(ds, prepare_field(ds, cfg), p, cfg, mode);
}

}  // namespace tvgm
