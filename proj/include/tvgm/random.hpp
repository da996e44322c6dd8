#ifndef TVGM_RANDOM_HPP
#define TVGM_RANDOM_HPP

#include "tvgm/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace tvgm {

using Rng = std::mt19937_64;

// Stable sub-seed derivation. Streams are keyed by a label and an index so
// that adding a new consumer never shifts the draws of an existing one.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t parent, std::string_view label,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(parent, label, index));
}

Vector standard_normal(Rng& rng, Eigen::Index size);

// Square-root factor F with F * F^T = cov. Cholesky first; on failure the
// eigendecomposition with negative eigenvalues clipped at zero.
Matrix covariance_factor(const Matrix& cov, double tolerance = 1e-10);

// One draw from N(0, F F^T) given a factor from covariance_factor.
inline Vector sample_normal(Rng& rng, const Matrix& factor) {
  return factor * standard_normal(rng, factor.cols());
}

}  // namespace tvgm

#endif  // TVGM_RANDOM_HPP
