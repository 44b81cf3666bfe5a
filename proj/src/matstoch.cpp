#include "qbd/matstoch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qbd/error.hpp"

namespace qbd {

namespace {

void require_square(const Matrix& A, const char* what) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << A.rows() << "x" << A.cols();
    throw Error(ErrorKind::DomainError, os.str());
  }
}

void require_stochastic(const Matrix& P, const char* what) {
  require_square(P, what);
  const double defect = row_sum_defect(P);
  if (!(defect <= kStochasticTol) || P.minCoeff() < -kStochasticTol) {
    std::ostringstream os;
    os << what << ": row sums deviate from 1 by " << defect;
    throw Error(ErrorKind::NonStochastic, os.str());
  }
}

// BFS over the nonzero pattern of A (or of A^T when `transpose`).
std::vector<char> reachable_from_zero(const Matrix& A, bool transpose) {
  const Eigen::Index n = A.rows();
  std::vector<char> seen(n, 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = transpose ? A(j, i) : A(i, j);
      if (a > 0.0 && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

double row_sum_defect(const Matrix& P) {
  return (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

bool is_irreducible(const Matrix& A) {
  require_square(A, "is_irreducible");
  if (A.rows() == 1) return true;
  const auto fwd = reachable_from_zero(A, false);
  const auto bwd = reachable_from_zero(A, true);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c != 0; });
}

RowVector stationary_vector(const Matrix& P, double tol) {
  require_stochastic(P, "stationary_vector");
  const Eigen::Index n = P.rows();
  if (!is_irreducible(P)) {
    throw Error(ErrorKind::SingularStructure, "stationary_vector: matrix is reducible");
  }
  if (n == 1) return RowVector::Ones(1);

  // (I - P)^T x = 0 with the last equation replaced by sum(x) = 1.
  Matrix system = (Matrix::Identity(n, n) - P).transpose();
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;

  const Eigen::PartialPivLU<Matrix> lu(system);
  Vector x = lu.solve(rhs);
  for (int refine = 0; refine < 2; ++refine) {
    const Vector r = rhs - system * x;
    if (r.cwiseAbs().maxCoeff() <= 1e-3 * tol) break;
    x += lu.solve(r);
  }
  RowVector pi = x.transpose();
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();

  const double residual = (pi - pi * P).cwiseAbs().maxCoeff();
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "stationary_vector: residual " << residual << " exceeds tolerance " << tol;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return pi;
}

Matrix group_inverse(const Matrix& P) {
  const RowVector pi = stationary_vector(P);
  const Eigen::Index n = P.rows();
  const Matrix one_pi = Vector::Ones(n) * pi;
  const Matrix I = Matrix::Identity(n, n);
  const Matrix system = I - P + one_pi;
  Matrix X = system.partialPivLu().solve(I - one_pi);
  X -= Vector::Ones(n) * (pi * X);
  return X;
}

Matrix kernel_one_group_inverse(const Matrix& A) {
  require_square(A, "kernel_one_group_inverse");
  const Eigen::Index n = A.rows();
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (A.rowwise().sum().cwiseAbs().maxCoeff() > kStochasticTol * scale) {
    throw Error(ErrorKind::DomainError, "kernel_one_group_inverse: A 1 != 0");
  }
  if (n == 1) return Matrix::Zero(1, 1);

  Matrix system = A.transpose();
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::SingularStructure, "kernel_one_group_inverse: kernel is not one-dimensional");
  }
  const RowVector p = lu.solve(rhs).transpose();
  const Matrix one_p = Vector::Ones(n) * p;
  const Eigen::FullPivLU<Matrix> shifted(A - one_p);
  if (!shifted.isInvertible()) {
    throw Error(ErrorKind::SingularStructure, "kernel_one_group_inverse: A - 1p is singular");
  }
  return shifted.inverse() + one_p;
}

PerronPair perron(const Matrix& A, double tol, int max_iterations) {
  require_square(A, "perron");
  if (A.minCoeff() < 0.0) {
    throw Error(ErrorKind::DomainError, "perron: matrix has negative entries");
  }
  const Eigen::Index n = A.rows();
  PerronPair out;
  const double norm = A.rowwise().sum().maxCoeff();
  if (n == 1 || norm == 0.0) {
    out.value = A(0, 0) * (n == 1 ? 1.0 : 0.0);
    out.vector = Vector::Ones(n);
    return out;
  }

  // A + sI is primitive for irreducible A, and shares the Perron vector.
  const double shift = 0.5 * norm;
  Vector x = Vector::Ones(n);
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector y = A * x;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    const double lo = ratio.minCoeff();
    const double hi = ratio.maxCoeff();
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(mid, std::numeric_limits<double>::min())) {
      out.value = mid;
      out.vector = x / x.maxCoeff();
      out.iterations = it;
      return out;
    }
    x = y + shift * x;
    x /= x.maxCoeff();
    if (!(x.minCoeff() > 0.0)) {
      throw Error(ErrorKind::SingularStructure, "perron: iterate lost positivity (reducible input?)");
    }
  }
  throw Error(ErrorKind::NoConvergence, "perron: iteration budget exhausted");
}

double spectral_radius(const Matrix& A) {
  require_square(A, "spectral_radius");
  if (A.rows() == 1) return std::abs(A(0, 0));
  const Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix neumann_inverse(const Matrix& X) {
  const double sp = spectral_radius(X);
  if (!(sp < 1.0 - 1e-12)) {
    std::ostringstream os;
    os << "neumann_inverse: spectral radius " << sp << " is not below 1";
    throw Error(ErrorKind::NotContractive, os.str());
  }
  const Eigen::Index n = X.rows();
  return (Matrix::Identity(n, n) - X).partialPivLu().inverse();
}

}  // namespace qbd
