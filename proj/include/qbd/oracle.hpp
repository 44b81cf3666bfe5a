#pragma once

// Brute-force finite-chain counterparts of the QBD computations. Everything
// here is plain dense linear algebra on a truncated chain and is meant for
// cross-checking, not for production sizes.

#include <utility>
#include <vector>

#include "qbd/poisson.hpp"

namespace qbd::oracle {

/// Levels 0..N of a QBD, the last level reflecting (A0 + A1 on its diagonal).
struct FiniteChain {
  Matrix P;
  Eigen::Index m = 0;
  int N = 0;

  Eigen::Index size() const { return P.rows(); }
  Eigen::Index index(int level, Eigen::Index phase) const { return level * m + phase; }
  std::pair<int, Eigen::Index> state(Eigen::Index i) const {
    return {static_cast<int>(i / m), i % m};
  }
  /// Block of a vector over the chain states.
  Vector level_block(const Vector& v, int level) const { return v.segment(level * m, m); }
};

/// Block tridiagonal assembly with a reflecting last level; used for both
/// transition matrices and perturbation directions.
Matrix assemble(const Matrix& boundary, const Matrix& down, const Matrix& local, const Matrix& up,
                int N);

FiniteChain truncate(const QbdModel& model, int N);

/// g restricted to the chain's levels.
Vector reward_vector(const FiniteChain& chain, const RewardSpec& g);

/// h = (I - P)^# gbar. Throws NotCentered unless pi gbar = 0.
Vector oracle_poisson(const Matrix& P, const Vector& gbar);
inline Vector oracle_poisson(const FiniteChain& chain, const Vector& gbar) {
  return oracle_poisson(chain.P, gbar);
}

struct ReturnQuantities {
  Vector zeta;  // expected reward accumulated before the return to j
  Vector tau;   // expected return time to j
  double omega = 0.0;
  Vector h;  // zeta - omega tau; h_j = 0
};

/// Taboo systems (I - P_{-j}) tau = 1, (I - P_{-j}) zeta = g where P_{-j} is P
/// with column j zeroed.
ReturnQuantities oracle_return_quantities(const Matrix& P, Eigen::Index j, const Vector& g);

/// Poisson solution through return times to the subset A and the censored
/// matrix P_A + P_AB (I - P_B)^{-1} P_BA.
Vector oracle_subset_decomposition(const Matrix& P, const std::vector<Eigen::Index>& A,
                                   const Vector& g);

/// Partial sums sum_{t <= T} (P^t - 1 pi), stopped once a geometric tail bound
/// falls below tol. Throws NoConvergence when T_max is reached first.
Matrix oracle_deviation(const Matrix& P, int T_max, double tol);

/// Selected columns of (I - P)^#.
Matrix group_inverse_columns(const Matrix& P, const std::vector<Eigen::Index>& cols);

/// Expected time to reach level 0 from every state (return time from level 0).
Vector level_passage_times(const FiniteChain& chain);

/// G from absorption probabilities of levels 2..N into level 1.
Matrix first_passage_g(const QbdModel& model, int N);

/// U = A0 + A1 G with G from first_passage_g.
Matrix taboo_u(const QbdModel& model, int N);

}  // namespace qbd::oracle
