#include "tvgm/data_model.hpp"

#include "tvgm/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tvgm {

namespace {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DataError(std::string(what) + " contains non-finite entries");
}

struct AnchorGraph {
  Matrix raw;
  std::vector<int> degree;

  explicit AnchorGraph(int d) : raw(Matrix::Zero(d, d)), degree(d, 0) {}

  bool has(int a, int b) const { return raw(a, b) != 0.0; }

  void add(int a, int b, double value) {
    raw(a, b) = raw(b, a) = value;
    ++degree[a];
    ++degree[b];
  }
};

// Adds `count` edges drawn uniformly without replacement from the empty
// upper-triangle positions, skipping any that would lift a degree past cap.
void add_random_edges(AnchorGraph& g, int count, int cap, double value, Rng& rng) {
  const int d = static_cast<int>(g.raw.rows());
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (!g.has(a, b)) slots.emplace_back(a, b);
  std::shuffle(slots.begin(), slots.end(), rng);
  int placed = 0;
  for (auto [a, b] : slots) {
    if (placed == count) break;
    if (g.degree[a] >= cap || g.degree[b] >= cap) continue;
    g.add(a, b, value);
    ++placed;
  }
  if (placed < count)
    throw ConstructionError("cannot place " + std::to_string(count) +
                            " random edges with every degree <= k_hub = " +
                            std::to_string(cap) + " at d = " + std::to_string(d));
}

}  // namespace

void PairedDataset::validate() const {
  if (z.size() < 2) throw DataError("dataset needs n >= 2 observations");
  if (x.rows() != z.size() || y.rows() != z.size())
    throw DataError("x and y must have one row per time index");
  if (x.cols() != y.cols() || x.cols() < 1)
    throw DataError("x and y must share the same positive column count");
  if ((z.array() < 0.0).any() || (z.array() > 1.0).any())
    throw DataError("time indices must lie in [0, 1]");
  check_finite(z, "z");
  check_finite(x, "x");
  check_finite(y, "y");
}

void MultiSubjectDataset::validate() const {
  if (subjects.size() < 2) throw DataError("multi-subject data needs N >= 2 subjects");
  if (z.size() < 2) throw DataError("dataset needs n >= 2 observations");
  if ((z.array() < 0.0).any() || (z.array() > 1.0).any())
    throw DataError("time indices must lie in [0, 1]");
  check_finite(z, "z");
  const auto d = subjects.front().cols();
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    if (subjects[s].rows() != z.size() || subjects[s].cols() != d || d < 1)
      throw DataError("subject " + std::to_string(s + 1) + " has shape " +
                      std::to_string(subjects[s].rows()) + "x" +
                      std::to_string(subjects[s].cols()) + ", expected " +
                      std::to_string(z.size()) + "x" + std::to_string(d));
    check_finite(subjects[s], "subject data");
  }
}

PrecisionPath generate_precision_path(int d, int k_hub, bool alternative,
                                      std::uint64_t seed) {
  if (d < 8) throw ConstructionError("d = " + std::to_string(d) + " violates d >= 8");
  if (k_hub < 1) throw ConstructionError("k_hub must be at least 1");
  if (alternative && k_hub + 1 > d - 1)
    throw ConstructionError("a hub with k_hub + 1 = " + std::to_string(k_hub + 1) +
                            " edges does not fit in d = " + std::to_string(d) + " nodes");

  constexpr double kEdge = 0.3;
  const int per_anchor = (d - 2) / 4;
  Rng rng = make_rng(seed, "precision_path");

  AnchorGraph g(d);
  PrecisionPath path;
  path.d = d;
  path.k_hub = k_hub;

  add_random_edges(g, per_anchor, k_hub, kEdge, rng);
  path.anchors.emplace_back(0.0, g.raw);
  add_random_edges(g, per_anchor, k_hub, kEdge, rng);
  path.anchors.emplace_back(0.2, g.raw);

  std::vector<int> nodes(d);
  std::iota(nodes.begin(), nodes.end(), 0);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const int hubs[2] = {nodes[0], nodes[1]};

  for (int hub : hubs) {
    std::vector<int> candidates;
    for (int w = 0; w < d; ++w)
      if (w != hub && !g.has(hub, w)) candidates.push_back(w);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    if (alternative) {
      if (static_cast<int>(candidates.size()) < k_hub + 1)
        throw ConstructionError("column " + std::to_string(hub + 1) + " has only " +
                                std::to_string(candidates.size()) +
                                " free slots for k_hub + 1 new edges");
      for (int i = 0; i <= k_hub; ++i) g.add(hub, candidates[i], kEdge);
    } else {
      for (int w : candidates) {
        if (g.degree[hub] >= k_hub) break;
        if (g.degree[w] >= k_hub) continue;
        g.add(hub, w, kEdge);
      }
    }
  }
  path.anchors.emplace_back(0.5, g.raw);
  return path;
}

Matrix raw_precision(const PrecisionPath& path, double z) {
  const auto& anchors = path.anchors;
  if (anchors.empty()) throw DataError("precision path has no anchors");
  if (z <= anchors.front().first) return anchors.front().second;
  if (z >= anchors.back().first) return anchors.back().second;
  auto upper = std::upper_bound(anchors.begin(), anchors.end(), z,
                                [](double v, const auto& a) { return v < a.first; });
  auto lower = std::prev(upper);
  const double t = (z - lower->first) / (upper->first - lower->first);
  return (1.0 - t) * lower->second + t * upper->second;
}

Matrix eval_precision(const PrecisionPath& path, double z) {
  Matrix theta = raw_precision(path, z);
  theta.diagonal().setZero();
  const double diag = std::abs(min_eigenvalue(theta)) + 0.1;
  theta.diagonal().setConstant(diag);
  return theta / diag;
}

Eigen::MatrixXi true_support(const PrecisionPath& path, double z) {
  Matrix raw = raw_precision(path, z);
  Eigen::MatrixXi support = (raw.array() != 0.0).cast<int>();
  support.diagonal().setZero();
  return support;
}

NuisanceCovariance generate_nuisance(int d, std::uint64_t seed, int perturbations) {
  if (d < 1) throw ConstructionError("nuisance covariance needs d >= 1");
  Rng rng = make_rng(seed, "nuisance");
  Matrix m = Matrix::Constant(d, d, 0.3);
  m.diagonal().setOnes();
  for (int k = 0; k < perturbations; ++k) {
    Vector eps = standard_normal(rng, d);
    m.noalias() += eps * eps.transpose();
  }
  return {m, 1.0};
}

PairedDataset sample_dataset(const PrecisionPath& path, const NuisanceCovariance& lx,
                             const NuisanceCovariance& ly, int n, double nuisance_scale,
                             std::uint64_t seed) {
  if (n < 2) throw DataError("sample_dataset needs n >= 2");
  if (!(nuisance_scale >= 0.0)) throw DataError("nuisance_scale must be nonnegative");
  const int d = path.d;
  if (lx.matrix.rows() != d || ly.matrix.rows() != d)
    throw DataError("nuisance covariance dimension does not match the path");

  Rng z_rng = make_rng(seed, "sample/z");
  Rng s_rng = make_rng(seed, "sample/signal");
  Rng ex_rng = make_rng(seed, "sample/nuisance_x");
  Rng ey_rng = make_rng(seed, "sample/nuisance_y");

  const double sx = nuisance_scale * lx.scale;
  const double sy = nuisance_scale * ly.scale;
  const Matrix fx = sx > 0.0 ? covariance_factor(sx * lx.matrix) : Matrix();
  const Matrix fy = sy > 0.0 ? covariance_factor(sy * ly.matrix) : Matrix();

  PairedDataset ds;
  ds.z.resize(n);
  ds.x.resize(n, d);
  ds.y.resize(n, d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) ds.z(i) = unif(z_rng);

  const Matrix eye = Matrix::Identity(d, d);
  for (int i = 0; i < n; ++i) {
    Eigen::LLT<Matrix> llt(eval_precision(path, ds.z(i)));
    if (llt.info() != Eigen::Success)
      throw NumericalError("precision matrix at z = " + std::to_string(ds.z(i)) +
                           " is not invertible");
    const Matrix sigma = llt.solve(eye);
    const Vector s = sample_normal(s_rng, covariance_factor(sigma));
    ds.x.row(i) = s.transpose();
    ds.y.row(i) = s.transpose();
    if (sx > 0.0) ds.x.row(i) += sample_normal(ex_rng, fx).transpose();
    if (sy > 0.0) ds.y.row(i) += sample_normal(ey_rng, fy).transpose();
  }
  return ds;
}

namespace {

void standardize_columns(Matrix& m, const std::string& prefix) {
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    auto col = m.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / (n - 1.0));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      throw DataError("column " + prefix + std::to_string(c + 1) +
                      " has zero variance and cannot be standardized");
    col /= sd;
  }
}

}  // namespace

PairedDataset standardize(const PairedDataset& ds) {
  PairedDataset out = ds;
  standardize_columns(out.x, "x");
  standardize_columns(out.y, "y");
  return out;
}

MultiSubjectDataset standardize(const MultiSubjectDataset& ds) {
  MultiSubjectDataset out = ds;
  for (std::size_t s = 0; s < out.subjects.size(); ++s)
    standardize_columns(out.subjects[s], "s" + std::to_string(s + 1) + "_");
  return out;
}

void normalize_time(Vector& z) {
  if (z.size() == 0) return;
  const double lo = z.minCoeff();
  const double hi = z.maxCoeff();
  if (lo >= 0.0 && hi <= 1.0) return;
  if (!(hi > lo)) throw DataError("time column is constant and cannot be mapped to [0, 1]");
  z = (z.array() - lo) / (hi - lo);
}

}  // namespace tvgm
