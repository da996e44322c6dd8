#ifndef TVGM_DATA_MODEL_HPP
#define TVGM_DATA_MODEL_HPP

#include "tvgm/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tvgm {

// n triplets (Z_i, X_i, Y_i): a time index in [0, 1] and one observation
// vector per subject (or per group average).
struct PairedDataset {
  Vector z;
  Matrix x;
  Matrix y;

  Eigen::Index n() const { return z.size(); }
  Eigen::Index d() const { return x.cols(); }

  // Throws DataError if the invariants do not hold.
  void validate() const;
};

struct MultiSubjectDataset {
  Vector z;
  std::vector<Matrix> subjects;

  Eigen::Index n() const { return z.size(); }
  Eigen::Index d() const { return subjects.empty() ? 0 : subjects.front().cols(); }

  void validate() const;
};

// Ground-truth precision path for simulation. Anchors hold the raw
// off-diagonal pattern (zero diagonal); off-diagonals are interpolated
// linearly between anchors, held constant outside them, and the
// positive-definiteness fix is applied at every queried z.
struct PrecisionPath {
  std::vector<std::pair<double, Matrix>> anchors;
  int d = 0;
  int k_hub = 0;
};

struct NuisanceCovariance {
  Matrix matrix;
  double scale = 1.0;
};

struct PathOptions {
  bool alternative = true;
  double edge_value = 0.3;
};

PrecisionPath generate_precision_path(int d, int k_hub, bool alternative,
                                      std::uint64_t seed);

// Linear interpolation of the anchor off-diagonals, before the PD fix.
Matrix raw_precision(const PrecisionPath& path, double z);

// Theta(z): interpolated, diagonal set to |lambda_min| + 0.1, rescaled to a
// unit diagonal.
Matrix eval_precision(const PrecisionPath& path, double z);

// Off-diagonal support (1 where the true edge is present) at z.
Eigen::MatrixXi true_support(const PrecisionPath& path, double z);

// Unit diagonal, 0.3 off-diagonal, plus `perturbations` rank-one terms
// eps eps^T with eps ~ N(0, I).
NuisanceCovariance generate_nuisance(int d, std::uint64_t seed,
                                     int perturbations = 10);

PairedDataset sample_dataset(const PrecisionPath& path,
                             const NuisanceCovariance& lx,
                             const NuisanceCovariance& ly, int n,
                             double nuisance_scale, std::uint64_t seed);

PairedDataset standardize(const PairedDataset& ds);
MultiSubjectDataset standardize(const MultiSubjectDataset& ds);

// Maps z affinely onto [0, 1] when any value lies outside it.
void normalize_time(Vector& z);

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Dense = MatrixX<Scalar>;
  if (m.rows() != m.cols()) throw DataError("min_eigenvalue: matrix is not square");
  if (m.size() == 0) throw DataError("min_eigenvalue: empty matrix");
  const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-8) * scale)
    throw DataError("min_eigenvalue: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Dense> eig(Dense(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace tvgm

#endif  // TVGM_DATA_MODEL_HPP
