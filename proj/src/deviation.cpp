#include "qbd/deviation.hpp"

#include <sstream>

#include "qbd/error.hpp"

namespace qbd {

namespace {

constexpr int kMaxSeriesTerms = 10000000;

Matrix power(const Matrix& A, int n) {
  Matrix out = Matrix::Identity(A.rows(), A.cols());
  for (int i = 0; i < n; ++i) out = out * A;
  return out;
}

}  // namespace

Matrix m_matrix(const Matrix& R, const Matrix& G, double tol) {
  const double rate = spectral_radius(R) * spectral_radius(G);
  if (!(rate < 1.0)) {
    std::ostringstream os;
    os << "m_matrix: sp(R) sp(G) = " << rate;
    throw Error(ErrorKind::NotContractive, os.str());
  }
  const Matrix I = Matrix::Identity(R.rows(), R.cols());
  Matrix M = I;
  for (int it = 0; it < kMaxSeriesTerms; ++it) {
    const Matrix next = I + R * M * G;
    const double residual = (next - M).cwiseAbs().rowwise().sum().maxCoeff();
    M = next;
    if (residual <= tol) return M;
  }
  throw Error(ErrorKind::NoConvergence, "m_matrix: fixed point iteration did not converge");
}

Matrix w_block(const RguTriple& rgu, int n, int k) {
  if (n < 1 || k < 1) throw Error(ErrorKind::DomainError, "w_block: levels start at 1");
  const Matrix I_minus_U_inv = neumann_inverse(rgu.U);
  const int d = std::min(n, k);
  Matrix W = I_minus_U_inv;
  for (int j = 2; j <= d; ++j) W = I_minus_U_inv + rgu.G * W * rgu.R;
  return n >= k ? Matrix(power(rgu.G, n - k) * W) : Matrix(W * power(rgu.R, k - n));
}

DeviationBlocks::DeviationBlocks(const QbdModel& model, const RguTriple& rgu,
                                 const StationaryDist& dist, double tol)
    : model_(model), rgu_(rgu), dist_(dist), tol_(tol) {
  if (!model.assume_aperiodic) {
    throw Error(ErrorKind::DomainError, "deviation matrix requires an aperiodic QBD");
  }
  if (!stability(model).positive_recurrent) {
    throw Error(ErrorKind::NotPositiveRecurrent, "deviation matrix requires positive recurrence");
  }
  const Eigen::Index m = model.m();
  Matrix P_star = censored_boundary(model, rgu.G);
  P_star = P_star.rowwise().sum().cwiseInverse().asDiagonal() * P_star;
  X_star_ = group_inverse(P_star);
  I_minus_U_inv_ = neumann_inverse(rgu.U);
  M_ = m_matrix(rgu.R, rgu.G, tol);
  tau1_ = I_minus_U_inv_ * (dist.I_minus_R_inv * Vector::Ones(m));

  RowVector pi_n = dist.pi0;
  Vector tau_n = Vector::Zero(m);
  auto term = [&](long n) -> std::pair<double, double> {
    if (n == 0) return {0.0, 1.0};
    pi_n = pi_n * dist.R;
    tau_n = tau1_ + rgu.G * tau_n;
    const double v = pi_n * tau_n;
    return {v, std::abs(v)};
  };
  pi_tau_sum_ = sum_until_negligible(term, tol * (1.0 - spectral_radius(dist.R)));
}

Vector DeviationBlocks::tau(int n) const {
  if (n < 0) throw Error(ErrorKind::DomainError, "tau: negative level");
  if (n == 0) return dist_.I_minus_R_inv * Vector::Ones(model_.m());
  Vector t = tau1_;
  for (int j = 2; j <= n; ++j) t = tau1_ + rgu_.G * t;
  return t;
}

Matrix DeviationBlocks::w_diag(int k) const {
  Matrix W = I_minus_U_inv_;
  for (int j = 2; j <= k; ++j) W = I_minus_U_inv_ + rgu_.G * W * rgu_.R;
  return W;
}

Matrix DeviationBlocks::k_block(int n, int k) const {
  if (n < 0 || k < 0) throw Error(ErrorKind::DomainError, "k_block: negative level");
  const Eigen::Index m = model_.m();
  const Matrix I = Matrix::Identity(m, m);
  const Vector tau0 = tau(0);
  const Matrix K0k = X_star_ * (I - tau0 * dist_.pi0) * power(dist_.R, k);
  if (n == 0) return K0k;

  const Matrix Gn = power(rgu_.G, n);
  const Vector tau_n = tau(n);
  if (k == 0) return -tau_n * dist_.pi0 + Gn * K0k;

  const Matrix W = n >= k ? Matrix(power(rgu_.G, n - k) * w_diag(k))
                          : Matrix(w_diag(n) * power(dist_.R, k - n));
  return W - tau_n * pi_level(dist_, k) + Gn * K0k;
}

RowVector DeviationBlocks::alpha(int k) const {
  if (k < 0) throw Error(ErrorKind::DomainError, "alpha: negative level");
  const Eigen::Index m = model_.m();
  const Matrix I = Matrix::Identity(m, m);
  const RowVector pi_k = pi_level(dist_, k);
  const Matrix K0k = X_star_ * (I - tau(0) * dist_.pi0) * power(dist_.R, k);

  // sum_n pi_n G^n K_{0k} = pi_0 M K_{0k}; the tau part was summed once.
  RowVector s = dist_.pi0 * M_ * K0k - pi_tau_sum_ * pi_k;
  if (k >= 1) {
    // n = 1..k: pi_n W_nn R^{k-n}, accumulated in Horner form.
    RowVector acc = RowVector::Zero(m);
    RowVector pi_n = dist_.pi0;
    Matrix W = I_minus_U_inv_;
    for (int n = 1; n <= k; ++n) {
      pi_n = pi_n * dist_.R;
      if (n > 1) W = I_minus_U_inv_ + rgu_.G * W * dist_.R;
      acc = acc * dist_.R + pi_n * W;
    }
    s += acc;

    // n > k: pi_0 R^k (R^j G^j) W_kk for j >= 1.
    const Matrix& W_kk = W;
    Matrix Z = I;
    const double threshold = tol_ * (1.0 - spectral_radius(dist_.R));
    int quiet = 0;
    for (int j = 1;; ++j) {
      if (j > kMaxSeriesTerms) throw Error(ErrorKind::NoConvergence, "alpha: W series did not settle");
      Z = dist_.R * Z * rgu_.G;
      const RowVector term = pi_k * Z * W_kk;
      s += term;
      quiet = term.cwiseAbs().sum() < threshold ? quiet + 1 : 0;
      if (quiet >= 5) break;
    }
  }
  return -s;
}

Matrix DeviationBlocks::deviation_block(int n, int k) const {
  return k_block(n, k) + Vector::Ones(model_.m()) * alpha(k);
}

std::vector<std::vector<Matrix>> DeviationBlocks::window(int N) const {
  if (N < 0) throw Error(ErrorKind::DomainError, "window: negative extent");
  std::vector<RowVector> alphas;
  for (int k = 0; k <= N; ++k) alphas.push_back(alpha(k));
  std::vector<std::vector<Matrix>> out(static_cast<std::size_t>(N) + 1);
  const Vector ones = Vector::Ones(model_.m());
  for (int n = 0; n <= N; ++n) {
    for (int k = 0; k <= N; ++k) {
      out[static_cast<std::size_t>(n)].push_back(k_block(n, k) + ones * alphas[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

Vector DeviationBlocks::apply_row(const RewardSpec& g, int n) const {
  require_valid(g, model_.m());
  Vector total = Vector::Zero(model_.m());
  const double threshold = tol_ * (1.0 - spectral_radius(dist_.R));
  const int min_k = n + g.K() + 2;
  int quiet = 0;
  for (int k = 0;; ++k) {
    if (k > 100000) throw Error(ErrorKind::NoConvergence, "apply_row: series did not settle");
    const Vector term = deviation_block(n, k) * g.at(k);
    total += term;
    quiet = term.cwiseAbs().maxCoeff() < threshold ? quiet + 1 : 0;
    if (quiet >= 5 && k >= min_k) return total;
  }
}

Matrix k_block(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist, int n, int k) {
  return DeviationBlocks(model, rgu, dist).k_block(n, k);
}

RowVector alpha_row(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist, int k,
                    double tol) {
  return DeviationBlocks(model, rgu, dist, tol).alpha(k);
}

Matrix deviation_block(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist,
                       int n, int k) {
  return DeviationBlocks(model, rgu, dist).deviation_block(n, k);
}

std::vector<Vector> apply_deviation(const QbdModel& model, const RguTriple& rgu,
                                    const StationaryDist& dist, const RewardSpec& g, int N) {
  if (!model.assume_aperiodic) {
    throw Error(ErrorKind::DomainError, "deviation matrix requires an aperiodic QBD");
  }
  if (N < 0) throw Error(ErrorKind::DomainError, "apply_deviation: negative level count");
  auto h = solve_poisson(model, rgu, dist, g, std::max(N, 1), Normalization::PiZero).h;
  h.resize(static_cast<std::size_t>(N) + 1);
  return h;
}

}  // namespace qbd
