#pragma once

// Dense kernel for stochastic and nonnegative matrices.

#include <Eigen/Dense>

namespace qbd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kDefaultTol = 1e-12;
inline constexpr double kStochasticTol = 1e-10;

struct PerronPair {
  double value = 0.0;
  Vector vector;  // strictly positive, max entry 1
  int iterations = 0;
};

/// Largest absolute deviation of a row sum from 1.
double row_sum_defect(const Matrix& P);

/// Strong connectivity of the directed graph with an edge i -> j iff A(i,j) > 0.
bool is_irreducible(const Matrix& A);

/// Stationary row vector of an irreducible stochastic matrix.
/// Throws NonStochastic or SingularStructure.
RowVector stationary_vector(const Matrix& P, double tol = kDefaultTol);

/// Group inverse (I - P)^# of an irreducible stochastic matrix. Satisfies
/// pi X = 0 and X 1 = 0.
Matrix group_inverse(const Matrix& P);

/// Group inverse of a square matrix A with A 1 = 0 whose left kernel is spanned
/// by a single vector (e.g. a generator, or I - P). Uses A^# = (A - 1 p)^{-1} + 1 p
/// where p A = 0, p 1 = 1.
Matrix kernel_one_group_inverse(const Matrix& A);

/// Perron-Frobenius eigenpair of an irreducible nonnegative matrix by shifted
/// power iteration. Stops when the Collatz-Wielandt bracket
/// [min (Au)_i/u_i, max (Au)_i/u_i] is narrower than tol * sigma.
PerronPair perron(const Matrix& A, double tol = kDefaultTol, int max_iterations = 100000);

double spectral_radius(const Matrix& A);

/// (I - X)^{-1}; throws NotContractive unless sp(X) < 1 - 1e-12.
Matrix neumann_inverse(const Matrix& X);

}  // namespace qbd
