#pragma once

#include <memory>
#include <vector>

#include "qbd/rgu.hpp"

namespace qbd {

/// Level-indexed reward g_n: explicit vectors for n = 0..K, then the affine
/// tail g_n = c0 + n c1 for n > K.
struct RewardSpec {
  std::vector<Vector> explicit_levels;
  Vector tail_c0;
  Vector tail_c1;

  int K() const { return static_cast<int>(explicit_levels.size()) - 1; }
  Eigen::Index m() const { return tail_c0.size(); }
  Vector at(long n) const;

  /// g_n = value * 1 for every n.
  static RewardSpec constant(Eigen::Index m, double value);
  /// g_n = n * 1 (queue length).
  static RewardSpec level(Eigen::Index m);
};

/// Throws DomainError on an empty prefix or mismatched vector lengths.
void require_valid(const RewardSpec& g, Eigen::Index m);

/// Stationary mean reward pi g, in closed form.
double omega(const StationaryDist& dist, const RewardSpec& g);

/// g - omega 1.
RewardSpec center(const RewardSpec& g, double omega);

/// s_n = sum_{l >= 0} R^l g_{n+l} for any n >= 0, with the affine tail summed in
/// closed form. s_n = g_n + R s_{n+1} links consecutive levels.
class TailSums {
 public:
  TailSums(const Matrix& R, const RewardSpec& g);

  Vector operator()(long n) const;

 private:
  RewardSpec g_;
  std::vector<Vector> prefix_;  // s_0 .. s_{K+1}
  Vector tail_base_;            // (I-R)^{-1} c0 + R (I-R)^{-2} c1
  Vector tail_slope_;           // (I-R)^{-1} c1
};

Vector tail_weighted_sum(const Matrix& R, const RewardSpec& g, long n);

/// Expected first passage time from each phase of level n to level 0
/// (return time when n = 0), by the closed form with the group inverse of G.
Vector passage_times(const RguTriple& rgu, int n);

/// tau_0 .. tau_N through tau_n = tau_1 + G tau_{n-1}.
std::vector<Vector> passage_times_upto(const RguTriple& rgu, int N);

/// y_0 .. y_N: expected reward accumulated until the first visit to level 0.
/// The reward must be centred (omega(gbar) = 0), else NotCentered.
std::vector<Vector> y_vectors(const QbdModel& model, const RguTriple& rgu,
                              const StationaryDist& dist, const RewardSpec& gbar, int N);

/// Same sums without the centring requirement. With g = 1 this returns the
/// passage times tau_0 .. tau_N.
std::vector<Vector> accumulated_rewards(const QbdModel& model, const RguTriple& rgu,
                                        const RewardSpec& g, int N);

enum class Normalization {
  PiZero,  // pi h = 0
  Anchor,  // h at (level 0, phase 0) = 0
};

/// Solution (omega, h) of (I - P) h = g - omega 1.
class PoissonSolution {
 public:
  double omega = 0.0;
  double constant = 0.0;  // c in h_0 = (I - P_*)^# y_0 + c 1
  Normalization normalization = Normalization::PiZero;
  std::vector<Vector> h;  // h_0 .. h_N
  double residual = 0.0;  // blockwise residual on levels 0..N-1

  int levels() const { return static_cast<int>(h.size()) - 1; }

  /// h_n for any n >= 0; levels past N continue the recurrence.
  Vector block(long n) const;

 private:
  friend PoissonSolution solve_poisson(const QbdModel&, const RguTriple&, const StationaryDist&,
                                       const RewardSpec&, int, Normalization, double);
  Matrix G_;
  Matrix I_minus_U_inv_;
  std::shared_ptr<const TailSums> tails_;
  Vector y_last_;
  Vector g_pow_h0_last_;
};

PoissonSolution solve_poisson(const QbdModel& model, const RguTriple& rgu,
                              const StationaryDist& dist, const RewardSpec& g, int N,
                              Normalization normalization = Normalization::PiZero,
                              double tol = kDefaultTol);

/// max over levels 0..N-1 of || ((I - P) h)_n - gbar_n ||_inf.
double poisson_residual(const QbdModel& model, const std::vector<Vector>& h,
                        const RewardSpec& gbar);

/// Sum over n of term(n).first until term(n).second stays below `threshold`
/// for five consecutive levels past `min_levels`. Throws NoConvergence after
/// `max_levels`.
template <typename Term>
double sum_until_negligible(Term&& term, double threshold, long min_levels = 0,
                            long max_levels = 10000000);

}  // namespace qbd

#include "qbd/detail/adaptive_sum.hpp"
