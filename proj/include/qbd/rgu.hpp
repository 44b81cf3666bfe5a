#pragma once

#include "qbd/qbd_model.hpp"

namespace qbd {

enum class GAlgorithm { LogReduction, Functional };

/// First-passage matrix G, taboo return matrix U and rate matrix R.
struct RguTriple {
  Matrix G;
  Matrix U;
  Matrix R;
  int iterations = 0;
  double residual = 0.0;  // || G - (A-1 + A0 G + A1 G^2) ||_inf
};

/// Minimal nonnegative solution of G = A-1 + A0 G + A1 G^2. For a transient
/// model the result is strictly substochastic; for a null-recurrent one it is
/// still returned.
Matrix solve_g(const QbdModel& model, double tol = kDefaultTol,
               GAlgorithm algorithm = GAlgorithm::LogReduction, int* iterations = nullptr);

/// U = A0 + A1 G; throws NotContractive if sp(U) >= 1.
Matrix compute_u(const QbdModel& model, const Matrix& G);

/// R = A1 (I - U)^{-1}.
Matrix compute_r(const QbdModel& model, const Matrix& U);

RguTriple solve_rgu(const QbdModel& model, double tol = kDefaultTol,
                    GAlgorithm algorithm = GAlgorithm::LogReduction);

double g_residual(const QbdModel& model, const Matrix& G);
double r_residual(const QbdModel& model, const Matrix& R);

/// Matrix-geometric stationary distribution pi_n = pi_0 R^n.
struct StationaryDist {
  RowVector pi0;
  Matrix R;
  Matrix I_minus_R_inv;

  Eigen::Index m() const { return R.rows(); }
};

/// pi_0 from the censored boundary matrix P_* = B + A1 G, normalised so that
/// pi_0 (I - R)^{-1} 1 = 1. Throws NotPositiveRecurrent.
StationaryDist stationary(const QbdModel& model, const RguTriple& rgu);

RowVector pi_level(const StationaryDist& dist, int n);

/// P_* = B + A1 G.
Matrix censored_boundary(const QbdModel& model, const Matrix& G);

}  // namespace qbd
