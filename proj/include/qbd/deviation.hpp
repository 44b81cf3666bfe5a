#pragma once

#include <vector>

#include "qbd/poisson.hpp"

namespace qbd {

/// M = sum_n R^n G^n, the solution of M = I + R M G.
Matrix m_matrix(const Matrix& R, const Matrix& G, double tol = kDefaultTol);

/// Block (n, k), n, k >= 1, of the expected visit counts among levels >= 1
/// before the first visit to level 0.
Matrix w_block(const RguTriple& rgu, int n, int k);

/// Block accessor for the deviation matrix D = sum_t (P^t - 1 pi) of a
/// positive recurrent, aperiodic QBD, written as D = K + 1 alpha with
/// alpha = -pi K. The infinite matrix is never materialised; all methods are
/// const and safe to call concurrently.
class DeviationBlocks {
 public:
  DeviationBlocks(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist,
                  double tol = kDefaultTol);

  Matrix k_block(int n, int k) const;
  /// alpha_k = -sum_n pi_n K_{nk}.
  RowVector alpha(int k) const;
  Matrix deviation_block(int n, int k) const;

  /// D_{nk} for n, k = 0..N, indexed [n][k].
  std::vector<std::vector<Matrix>> window(int N) const;

  /// (D g)_n summed blockwise over k until the terms are negligible.
  Vector apply_row(const RewardSpec& g, int n) const;

  const Matrix& M() const { return M_; }
  const Matrix& boundary_group_inverse() const { return X_star_; }
  Vector tau(int n) const;

 private:
  Matrix w_diag(int k) const;

  QbdModel model_;
  RguTriple rgu_;
  StationaryDist dist_;
  double tol_;
  Matrix X_star_;        // (I - P_*)^#
  Matrix I_minus_U_inv_;
  Matrix M_;
  Vector tau1_;
  double pi_tau_sum_ = 0.0;  // sum_{n >= 1} pi_n tau_n
};

Matrix k_block(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist, int n, int k);
RowVector alpha_row(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist, int k,
                    double tol = kDefaultTol);
Matrix deviation_block(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist,
                       int n, int k);

/// (D g)_0 .. (D g)_N as the Poisson solution normalised by pi h = 0.
std::vector<Vector> apply_deviation(const QbdModel& model, const RguTriple& rgu,
                                    const StationaryDist& dist, const RewardSpec& g, int N);

}  // namespace qbd
