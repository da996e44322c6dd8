#include "tvgm/debias_boot.hpp"

#include "tvgm/parallel.hpp"
#include "tvgm/random.hpp"

#include <algorithm>
#include <cmath>

namespace tvgm {

Vector debias_denominators(const Matrix& theta, const Matrix& sigma) {
  return (theta.transpose() * sigma).diagonal();
}

Matrix debias(const Matrix& theta, const Matrix& sigma, double z) {
  const auto d = theta.rows();
  if (theta.cols() != d || sigma.rows() != d || sigma.cols() != d)
    throw DataError("debias: theta and sigma must be square with equal size");
  const Vector denom = debias_denominators(theta, sigma);
  for (Eigen::Index j = 0; j < d; ++j)
    if (!(std::abs(denom(j)) >= kDenominatorGuard))
      throw DegenerateDenominatorError(
          z, static_cast<int>(j),
          "de-biasing denominator for column " + std::to_string(j + 1) + " at z = " +
              std::to_string(z) + " is " + std::to_string(denom(j)));
  // correction(j, k) = theta_j^T (S theta_k - e_k)
  const Matrix correction = theta.transpose() * (sigma * theta - Matrix::Identity(d, d));
  return theta - denom.cwiseInverse().asDiagonal() * correction;
}

FieldEstimate estimate_field(const PairedDataset& ds, const KernelSpec& kernel,
                             const Vector& grid, const ClimeConfig& clime, int jobs,
                             bool within) {
  const std::size_t G = static_cast<std::size_t>(grid.size());
  FieldEstimate est;
  est.kernel = kernel;
  est.clime = clime;
  est.within = within;
  est.symmetric_summands = clime.symmetrize_input;
  est.sigma.resize(G);
  est.clime_sigma.resize(G);
  est.theta.resize(G);
  est.field.grid = grid;
  est.field.theta_de.resize(G);
  est.field.kernel_mass.resize(static_cast<Eigen::Index>(G));
  est.field.denom.resize(G);

  parallel_for(G, jobs, [&](std::size_t g) {
    const double z = grid(static_cast<Eigen::Index>(g));
    est.sigma[g] = within ? smoothed_cov_within(ds.x, ds.z, z, kernel)
                          : smoothed_cov_inter(ds, z, kernel);
    est.clime_sigma[g] = clime_input(est.sigma[g].matrix, clime);
    est.theta[g] = clime_full(est.sigma[g].matrix, clime);
    est.theta[g].z = z;
    est.field.theta_de[g] = debias(est.theta[g].columns, est.clime_sigma[g], z);
    est.field.denom[g] = debias_denominators(est.theta[g].columns, est.clime_sigma[g]);
  });
  for (std::size_t g = 0; g < G; ++g)
    est.field.kernel_mass(static_cast<Eigen::Index>(g)) = est.sigma[g].kernel_mass;
  return est;
}

Matrix edge_statistics(const DebiasedField& field, std::size_t g, Eigen::Index n, double h,
                       const Matrix* reference) {
  Matrix diff = field.theta_de[g];
  if (reference) diff -= *reference;
  Matrix stat = diff.cwiseAbs().cwiseMax(diff.transpose().cwiseAbs());
  stat *= std::sqrt(static_cast<double>(n) * h) * field.kernel_mass(static_cast<Eigen::Index>(g));
  stat.diagonal().setZero();
  return stat;
}

double test_statistic(const DebiasedField& field, const EdgeSelector& selector,
                      const std::vector<Matrix>& reference, Eigen::Index n, double h) {
  const std::size_t G = field.theta_de.size();
  if (!reference.empty() && reference.size() != G)
    throw DataError("reference precision grid does not match the field grid");
  if (selector.mode == EdgeSelector::Mode::per_time_sets && selector.sets.size() != G)
    throw DataError("edge selector length does not match the grid");

  double best = 0.0;
  bool any = false;
  for (std::size_t g = 0; g < G; ++g) {
    const Matrix stat = edge_statistics(field, g, n, h, reference.empty() ? nullptr : &reference[g]);
    if (selector.mode == EdgeSelector::Mode::all_pairs) {
      if (stat.rows() < 2) continue;
      any = true;
      best = std::max(best, stat.maxCoeff());
    } else {
      for (const Edge& e : selector.sets[g]) {
        any = true;
        best = std::max(best, stat(e.u, e.v));
      }
    }
  }
  if (!any) throw EmptySelectorError("edge selector is empty at every grid point");
  return best;
}

double quantile(const BootstrapResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("quantile level alpha must lie in (0, 1)");
  if (result.samples.empty()) throw DataError("bootstrap result has no samples");
  std::vector<double> sorted = result.samples;
  std::sort(sorted.begin(), sorted.end());
  const double B = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * B - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double BootstrapResult::cached_quantile(double alpha) {
  auto it = quantile_cache.find(alpha);
  if (it != quantile_cache.end()) return it->second;
  const double c = quantile(*this, alpha);
  quantile_cache.emplace(alpha, c);
  return c;
}

Matrix draw_multipliers(int B, Eigen::Index n, std::uint64_t seed) {
  Matrix xi(B, n);
  for (int b = 0; b < B; ++b) {
    Rng rng = make_rng(seed, "multiplier", static_cast<std::uint64_t>(b));
    xi.row(b) = standard_normal(rng, n).transpose();
  }
  return xi;
}

namespace {

constexpr Eigen::Index kPairBlock = 1024;

struct OrderedPair {
  int j;
  int k;
};

std::vector<OrderedPair> selected_pairs(const EdgeSelector& selector, std::size_t g, int d) {
  std::vector<OrderedPair> pairs;
  if (selector.mode == EdgeSelector::Mode::all_pairs) {
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k) pairs.push_back({j, k});
  } else {
    for (const Edge& e : selector.sets[g]) {
      pairs.push_back({e.u, e.v});
      pairs.push_back({e.v, e.u});
    }
  }
  return pairs;
}

}  // namespace

BootstrapResult bootstrap_with_multipliers(const PairedDataset& ds, const FieldEstimate& est,
                                           const EdgeSelector& selector,
                                           const Matrix& multipliers, int jobs) {
  const std::size_t G = est.theta.size();
  const Eigen::Index n = ds.n();
  const int d = static_cast<int>(ds.d());
  const int B = static_cast<int>(multipliers.rows());
  if (B < 1) throw UsageError("bootstrap needs B >= 1");
  if (multipliers.cols() != n) throw DataError("multiplier matrix must have one column per observation");
  if (selector.mode == EdgeSelector::Mode::per_time_sets && selector.sets.size() != G)
    throw DataError("edge selector length does not match the grid");

  const double h = est.kernel.bandwidth;
  const double scale = std::sqrt(static_cast<double>(n) * h) / static_cast<double>(n);
  const Matrix& other = est.within ? ds.x : ds.y;

  std::vector<Vector> per_grid(G);
  std::vector<char> used(G, 0);
  parallel_for(G, jobs, [&](std::size_t g) {
    const auto pairs = selected_pairs(selector, g, d);
    if (pairs.empty()) return;
    used[g] = 1;
    const double z = est.field.grid(static_cast<Eigen::Index>(g));
    const KernelWeights kw = kernel_weights(ds.z, z, est.kernel);
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i)
      if (kw.weights(i) > 0.0) rows.push_back(i);
    const auto ns = static_cast<Eigen::Index>(rows.size());
    const Vector w = kw.weights(rows);
    const Matrix& theta = est.theta[g].columns;
    const Matrix A = ds.x(rows, Eigen::all) * theta;  // X_i^T theta_j
    const Matrix C = other(rows, Eigen::all) * theta;  // Y_i^T theta_k
    const Matrix xi = multipliers(Eigen::all, rows);
    const Vector xi_w = xi * w;  // sum_i xi_i K_h(Z_i - z)

    const Vector& denom = est.field.denom[g];
    for (int j = 0; j < d; ++j)
      if (!(std::abs(denom(j)) >= kDenominatorGuard))
        throw DegenerateDenominatorError(z, j,
                                         "bootstrap denominator for column " +
                                             std::to_string(j + 1) + " at z = " +
                                             std::to_string(z) + " is degenerate");

    Vector best = Vector::Zero(B);
    const auto total = static_cast<Eigen::Index>(pairs.size());
    for (Eigen::Index start = 0; start < total; start += kPairBlock) {
      const Eigen::Index count = std::min(kPairBlock, total - start);
      Matrix P(ns, count);
      for (Eigen::Index p = 0; p < count; ++p) {
        const auto [j, k] = pairs[start + p];
        if (est.symmetric_summands)
          P.col(p) = 0.5 * (A.col(j).cwiseProduct(C.col(k)) + C.col(j).cwiseProduct(A.col(k)));
        else
          P.col(p) = A.col(j).cwiseProduct(C.col(k));
        P.col(p).array() *= w.array();
      }
      const Matrix R = xi * P;
      for (Eigen::Index p = 0; p < count; ++p) {
        const auto [j, k] = pairs[start + p];
        const double factor = scale / std::abs(denom(j));
        best = best.cwiseMax(((R.col(p) - theta(k, j) * xi_w).cwiseAbs() * factor).eval());
      }
    }
    per_grid[g] = std::move(best);
  });

  BootstrapResult result;
  result.B = B;
  Vector draws = Vector::Zero(B);
  bool any = false;
  for (std::size_t g = 0; g < G; ++g)
    if (used[g]) {
      any = true;
      draws = draws.cwiseMax(per_grid[g]);
    }
  if (!any) throw EmptySelectorError("edge selector is empty at every grid point");
  result.samples.assign(draws.data(), draws.data() + B);
  return result;
}

BootstrapResult bootstrap_draws(const PairedDataset& ds, const FieldEstimate& est,
                                const EdgeSelector& selector, int B, std::uint64_t seed,
                                int jobs) {
  if (B < 1) throw UsageError("bootstrap needs B >= 1");
  BootstrapResult result =
      bootstrap_with_multipliers(ds, est, selector, draw_multipliers(B, ds.n(), seed), jobs);
  result.seed = seed;
  return result;
}

}  // namespace tvgm
