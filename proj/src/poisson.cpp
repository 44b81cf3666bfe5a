#include "qbd/poisson.hpp"

#include <cmath>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd {

namespace {

Matrix matrix_power(Matrix base, long n) {
  Matrix out = Matrix::Identity(base.rows(), base.cols());
  while (n > 0) {
    if (n & 1) out = out * base;
    base = base * base;
    n >>= 1;
  }
  return out;
}

// P_* with rows rescaled to sum to one; G carries rounding of order 1e-16.
Matrix stochastic_boundary(const QbdModel& model, const Matrix& G) {
  const Matrix P = censored_boundary(model, G);
  return P.rowwise().sum().cwiseInverse().asDiagonal() * P;
}

double reward_scale(const RewardSpec& g) {
  double scale = std::max(g.tail_c0.cwiseAbs().maxCoeff(), g.tail_c1.cwiseAbs().maxCoeff());
  for (const auto& v : g.explicit_levels) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  return std::max(1.0, scale);
}

}  // namespace

Vector RewardSpec::at(long n) const {
  if (n < 0) throw Error(ErrorKind::DomainError, "RewardSpec::at: negative level");
  if (n <= K()) return explicit_levels[static_cast<std::size_t>(n)];
  return tail_c0 + static_cast<double>(n) * tail_c1;
}

RewardSpec RewardSpec::constant(Eigen::Index m, double value) {
  return RewardSpec{{Vector::Constant(m, value)}, Vector::Constant(m, value), Vector::Zero(m)};
}

RewardSpec RewardSpec::level(Eigen::Index m) {
  return RewardSpec{{Vector::Zero(m)}, Vector::Zero(m), Vector::Ones(m)};
}

void require_valid(const RewardSpec& g, Eigen::Index m) {
  if (g.explicit_levels.empty()) {
    throw Error(ErrorKind::DomainError, "reward: explicit prefix must hold at least g_0");
  }
  auto check = [m](const Vector& v, const char* what) {
    if (v.size() != m) {
      std::ostringstream os;
      os << "reward: " << what << " has length " << v.size() << ", expected " << m;
      throw Error(ErrorKind::DomainError, os.str());
    }
    if (!v.allFinite()) throw Error(ErrorKind::DomainError, std::string("reward: ") + what + " is not finite");
  };
  for (const auto& v : g.explicit_levels) check(v, "explicit level");
  check(g.tail_c0, "tail_c0");
  check(g.tail_c1, "tail_c1");
}

TailSums::TailSums(const Matrix& R, const RewardSpec& g) : g_(g) {
  require_valid(g, R.rows());
  const Matrix inv = neumann_inverse(R);
  tail_slope_ = inv * g.tail_c1;
  tail_base_ = inv * g.tail_c0 + R * (inv * tail_slope_);
  const int K = g.K();
  prefix_.resize(static_cast<std::size_t>(K) + 2);
  prefix_[static_cast<std::size_t>(K) + 1] = tail_base_ + static_cast<double>(K + 1) * tail_slope_;
  for (int n = K; n >= 0; --n) {
    prefix_[static_cast<std::size_t>(n)] = g.explicit_levels[static_cast<std::size_t>(n)] +
                                           R * prefix_[static_cast<std::size_t>(n) + 1];
  }
}

Vector TailSums::operator()(long n) const {
  if (n < 0) throw Error(ErrorKind::DomainError, "TailSums: negative level");
  if (n < static_cast<long>(prefix_.size())) return prefix_[static_cast<std::size_t>(n)];
  return tail_base_ + static_cast<double>(n) * tail_slope_;
}

Vector tail_weighted_sum(const Matrix& R, const RewardSpec& g, long n) {
  return TailSums(R, g)(n);
}

double omega(const StationaryDist& dist, const RewardSpec& g) {
  return dist.pi0 * TailSums(dist.R, g)(0);
}

RewardSpec center(const RewardSpec& g, double omega) {
  RewardSpec out = g;
  for (auto& v : out.explicit_levels) v.array() -= omega;
  out.tail_c0.array() -= omega;
  return out;
}

Vector passage_times(const RguTriple& rgu, int n) {
  if (n < 0) throw Error(ErrorKind::DomainError, "passage_times: negative level");
  const Eigen::Index m = rgu.G.rows();
  const Vector ones = Vector::Ones(m);
  const Matrix I_minus_R_inv = neumann_inverse(rgu.R);
  if (n == 0) return I_minus_R_inv * ones;

  const RowVector gamma = stationary_vector(rgu.G);
  const Matrix X = group_inverse(rgu.G);
  const Matrix I = Matrix::Identity(m, m);
  const Matrix sum_powers = (I - matrix_power(rgu.G, n)) * X + static_cast<double>(n) * ones * gamma;
  return sum_powers * (neumann_inverse(rgu.U) * (I_minus_R_inv * ones));
}

std::vector<Vector> passage_times_upto(const RguTriple& rgu, int N) {
  const Eigen::Index m = rgu.G.rows();
  const Vector ones = Vector::Ones(m);
  const Matrix I_minus_R_inv = neumann_inverse(rgu.R);
  std::vector<Vector> tau;
  tau.reserve(static_cast<std::size_t>(std::max(N, 1)) + 1);
  tau.push_back(I_minus_R_inv * ones);
  const Vector tau1 = neumann_inverse(rgu.U) * (I_minus_R_inv * ones);
  if (N >= 1) tau.push_back(tau1);
  for (int n = 2; n <= N; ++n) tau.push_back(tau1 + rgu.G * tau.back());
  return tau;
}

std::vector<Vector> accumulated_rewards(const QbdModel& model, const RguTriple& rgu,
                                        const RewardSpec& g, int N) {
  if (N < 0) throw Error(ErrorKind::DomainError, "accumulated_rewards: negative level count");
  const TailSums s(rgu.R, g);
  const Matrix I_minus_U_inv = neumann_inverse(rgu.U);
  const int top = std::max(N, 1);
  std::vector<Vector> y(static_cast<std::size_t>(top) + 1);
  y[1] = I_minus_U_inv * s(1);
  for (int n = 2; n <= top; ++n) {
    y[static_cast<std::size_t>(n)] = I_minus_U_inv * s(n) + rgu.G * y[static_cast<std::size_t>(n) - 1];
  }
  y[0] = g.at(0) + model.A1 * y[1];
  y.resize(static_cast<std::size_t>(N) + 1);
  return y;
}

std::vector<Vector> y_vectors(const QbdModel& model, const RguTriple& rgu,
                              const StationaryDist& dist, const RewardSpec& gbar, int N) {
  const double w = omega(dist, gbar);
  if (!(std::abs(w) <= 1e-10 * reward_scale(gbar))) {
    std::ostringstream os;
    os << "y_vectors: reward is not centred (pi g = " << w << ")";
    throw Error(ErrorKind::NotCentered, os.str());
  }
  return accumulated_rewards(model, rgu, gbar, N);
}

double poisson_residual(const QbdModel& model, const std::vector<Vector>& h,
                        const RewardSpec& gbar) {
  double worst = 0.0;
  const std::size_t N = h.size() - 1;
  for (std::size_t n = 0; n < N; ++n) {
    Vector r = h[n] - model.A0 * h[n] - model.A1 * h[n + 1] - gbar.at(static_cast<long>(n));
    if (n == 0) {
      r = h[0] - model.B * h[0] - model.A1 * h[1] - gbar.at(0);
    } else {
      r -= model.A_minus1 * h[n - 1];
    }
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

Vector PoissonSolution::block(long n) const {
  if (n < 0) throw Error(ErrorKind::DomainError, "PoissonSolution::block: negative level");
  const long N = levels();
  if (n <= N) return h[static_cast<std::size_t>(n)];
  Vector y = y_last_;
  Vector gh = g_pow_h0_last_;
  for (long k = N + 1; k <= n; ++k) {
    y = I_minus_U_inv_ * (*tails_)(k) + G_ * y;
    gh = G_ * gh;
  }
  return y + gh;
}

PoissonSolution solve_poisson(const QbdModel& model, const RguTriple& rgu,
                              const StationaryDist& dist, const RewardSpec& g, int N,
                              Normalization normalization, double tol) {
  if (N < 1) throw Error(ErrorKind::DomainError, "solve_poisson: need at least one level");
  if (!stability(model).positive_recurrent) {
    throw Error(ErrorKind::NotPositiveRecurrent, "solve_poisson: model is not positive recurrent");
  }
  const Eigen::Index m = model.m();
  require_valid(g, m);

  PoissonSolution sol;
  sol.normalization = normalization;
  sol.omega = omega(dist, g);
  const RewardSpec gbar = center(g, sol.omega);
  const std::vector<Vector> y = y_vectors(model, rgu, dist, gbar, N);

  const Vector h0_free = group_inverse(stochastic_boundary(model, rgu.G)) * y[0];

  sol.G_ = rgu.G;
  sol.I_minus_U_inv_ = neumann_inverse(rgu.U);
  sol.tails_ = std::make_shared<const TailSums>(rgu.R, gbar);

  if (normalization == Normalization::Anchor) {
    sol.constant = -h0_free(0);
  } else {
    // pi h for c = 0, continuing the y recurrence past N as needed.
    RowVector pi_n = dist.pi0;
    Vector y_n = y[0];
    Vector gh = h0_free;
    auto term = [&](long n) -> std::pair<double, double> {
      if (n > 0) {
        pi_n = pi_n * dist.R;
        gh = rgu.G * gh;
        y_n = n <= N ? y[static_cast<std::size_t>(n)]
                     : Vector(sol.I_minus_U_inv_ * (*sol.tails_)(n) + rgu.G * y_n);
      }
      const Vector h_n = y_n + gh;
      return {pi_n * h_n, (pi_n.transpose().cwiseAbs().array() * h_n.cwiseAbs().array()).sum()};
    };
    const double threshold = tol * (1.0 - spectral_radius(dist.R));
    sol.constant = -sum_until_negligible(term, threshold, gbar.K() + 2);
  }

  const Vector h0 = h0_free + sol.constant * Vector::Ones(m);
  sol.h.resize(static_cast<std::size_t>(N) + 1);
  Vector gh = h0;
  sol.h[0] = h0;
  for (int n = 1; n <= N; ++n) {
    gh = rgu.G * gh;
    sol.h[static_cast<std::size_t>(n)] = y[static_cast<std::size_t>(n)] + gh;
  }
  sol.y_last_ = y.back();
  sol.g_pow_h0_last_ = gh;
  sol.residual = poisson_residual(model, sol.h, gbar);
  return sol;
}

}  // namespace qbd
