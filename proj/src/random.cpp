#include "tvgm/random.hpp"

namespace tvgm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::uint64_t index) {
  return splitmix64(splitmix64(parent ^ fnv1a(label)) + index);
}

Vector standard_normal(Rng& rng, Eigen::Index size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = normal(rng);
  return out;
}

Matrix covariance_factor(const Matrix& cov, double tolerance) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) {
    Matrix factor = llt.matrixL();
    const double err = (factor * factor.transpose() - cov).cwiseAbs().maxCoeff();
    if (err <= tolerance * std::max(1.0, cov.cwiseAbs().maxCoeff()))
      return factor;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace tvgm
