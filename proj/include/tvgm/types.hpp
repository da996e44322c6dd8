#ifndef TVGM_TYPES_HPP
#define TVGM_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tvgm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

// Error taxonomy. The CLI maps each family onto an exit code:
// UsageError -> 2, DataError -> 3, NumericalError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct ConstructionError : DataError {
  using DataError::DataError;
};

struct ParseError : DataError {
  using DataError::DataError;
};

// No observation carries positive kernel weight at the query time.
struct NoSupportError : DataError {
  NoSupportError(double z_, double h_, const std::string& what)
      : DataError(what), z(z_), h(h_) {}
  double z;
  double h;
};

struct InfeasibleError : NumericalError {
  InfeasibleError(int column_, double lambda_, const std::string& what)
      : NumericalError(what), column(column_), lambda(lambda_) {}
  int column;
  double lambda;
};

struct SolverStallError : NumericalError {
  SolverStallError(int column_, double residual_, const std::string& what)
      : NumericalError(what), column(column_), residual(residual_) {}
  int column;
  double residual;
};

struct DegenerateDenominatorError : NumericalError {
  DegenerateDenominatorError(double z_, int column_, const std::string& what)
      : NumericalError(what), z(z_), column(column_) {}
  double z;
  int column;
};

struct EmptySelectorError : NumericalError {
  using NumericalError::NumericalError;
};

struct OracleScaleError : UsageError {
  using UsageError::UsageError;
};

struct StallError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace tvgm

#endif  // TVGM_TYPES_HPP
