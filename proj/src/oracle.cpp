#include "qbd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd::oracle {

Matrix assemble(const Matrix& boundary, const Matrix& down, const Matrix& local, const Matrix& up,
                int N) {
  if (N < 1) throw Error(ErrorKind::DomainError, "assemble: need at least two levels");
  const Eigen::Index m = local.rows();
  Matrix P = Matrix::Zero((N + 1) * m, (N + 1) * m);
  P.block(0, 0, m, m) = boundary;
  P.block(0, m, m, m) = up;
  for (int n = 1; n <= N; ++n) {
    P.block(n * m, (n - 1) * m, m, m) = down;
    if (n < N) {
      P.block(n * m, n * m, m, m) = local;
      P.block(n * m, (n + 1) * m, m, m) = up;
    } else {
      P.block(n * m, n * m, m, m) = local + up;
    }
  }
  return P;
}

FiniteChain truncate(const QbdModel& model, int N) {
  FiniteChain chain;
  chain.m = model.m();
  chain.N = N;
  chain.P = assemble(model.B, model.A_minus1, model.A0, model.A1, N);
  return chain;
}

Vector reward_vector(const FiniteChain& chain, const RewardSpec& g) {
  Vector out(chain.size());
  for (int n = 0; n <= chain.N; ++n) out.segment(n * chain.m, chain.m) = g.at(n);
  return out;
}

Vector oracle_poisson(const Matrix& P, const Vector& gbar) {
  const RowVector pi = stationary_vector(P);
  const double mean = pi * gbar;
  if (!(std::abs(mean) <= 1e-8 * std::max(1.0, gbar.cwiseAbs().maxCoeff()))) {
    std::ostringstream os;
    os << "oracle_poisson: pi gbar = " << mean;
    throw Error(ErrorKind::NotCentered, os.str());
  }
  const Eigen::Index n = P.rows();
  const Vector ones = Vector::Ones(n);
  const Matrix system = Matrix::Identity(n, n) - P + ones * pi;
  Vector h = system.partialPivLu().solve(gbar - mean * ones);
  h -= (pi * h) * ones;
  return h;
}

ReturnQuantities oracle_return_quantities(const Matrix& P, Eigen::Index j, const Vector& g) {
  const Eigen::Index n = P.rows();
  if (j < 0 || j >= n) throw Error(ErrorKind::DomainError, "oracle_return_quantities: bad state");
  Matrix taboo = P;
  taboo.col(j).setZero();
  const Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - taboo);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::SingularStructure, "oracle_return_quantities: taboo system is singular");
  }
  ReturnQuantities out;
  out.tau = lu.solve(Vector::Ones(n));
  out.zeta = lu.solve(g);
  out.omega = stationary_vector(P) * g;
  out.h = out.zeta - out.omega * out.tau;
  return out;
}

Vector oracle_subset_decomposition(const Matrix& P, const std::vector<Eigen::Index>& A,
                                   const Vector& g) {
  const Eigen::Index n = P.rows();
  std::vector<char> in_a(n, 0);
  for (auto i : A) {
    if (i < 0 || i >= n) throw Error(ErrorKind::DomainError, "subset decomposition: bad state");
    in_a[i] = 1;
  }
  std::vector<Eigen::Index> a_idx, b_idx;
  for (Eigen::Index i = 0; i < n; ++i) (in_a[i] ? a_idx : b_idx).push_back(i);
  if (a_idx.empty() || b_idx.empty()) {
    throw Error(ErrorKind::DomainError, "subset decomposition: A must be a nonempty proper subset");
  }
  auto sub = [&P](const std::vector<Eigen::Index>& r, const std::vector<Eigen::Index>& c) {
    return Matrix(P(r, c));
  };
  const Matrix P_A = sub(a_idx, a_idx), P_AB = sub(a_idx, b_idx);
  const Matrix P_BA = sub(b_idx, a_idx), P_B = sub(b_idx, b_idx);
  const Vector g_A = g(a_idx), g_B = g(b_idx);
  const Eigen::Index nb = static_cast<Eigen::Index>(b_idx.size());

  const Eigen::PartialPivLU<Matrix> N_B((Matrix::Identity(nb, nb) - P_B).eval());
  const double omega = stationary_vector(P) * g;

  // Rewards and times accumulated before the first return to A.
  const Vector y_B = N_B.solve(g_B);
  const Vector tau_B = N_B.solve(Vector::Ones(nb));
  const Vector y_A = g_A + P_AB * y_B;
  const Vector tau_A = Vector::Ones(static_cast<Eigen::Index>(a_idx.size())) + P_AB * tau_B;

  const Matrix exit_B = N_B.solve(P_BA);
  Matrix P_star = P_A + P_AB * exit_B;
  P_star = P_star.rowwise().sum().cwiseInverse().asDiagonal() * P_star;
  const Vector h_A = group_inverse(P_star) * (y_A - omega * tau_A);
  const Vector h_B = y_B - omega * tau_B + exit_B * h_A;

  Vector h(n);
  h(a_idx) = h_A;
  h(b_idx) = h_B;
  return h;
}

Matrix oracle_deviation(const Matrix& P, int T_max, double tol) {
  const RowVector pi = stationary_vector(P);
  const Eigen::Index n = P.rows();
  const Matrix one_pi = Vector::Ones(n) * pi;
  const Matrix centred = P - one_pi;
  Matrix term = Matrix::Identity(n, n) - one_pi;
  Matrix D = term;
  double previous = term.cwiseAbs().rowwise().sum().maxCoeff();
  for (int t = 1; t <= T_max; ++t) {
    term = term * centred;  // P^t - 1 pi
    D += term;
    const double norm = term.cwiseAbs().rowwise().sum().maxCoeff();
    const double ratio = previous > 0.0 ? norm / previous : 0.0;
    previous = norm;
    if (norm == 0.0 || (ratio < 1.0 && norm * ratio / (1.0 - ratio) < tol && norm < tol)) return D;
  }
  throw Error(ErrorKind::NoConvergence, "oracle_deviation: partial sums did not settle");
}

Matrix group_inverse_columns(const Matrix& P, const std::vector<Eigen::Index>& cols) {
  const RowVector pi = stationary_vector(P);
  const Eigen::Index n = P.rows();
  const Vector ones = Vector::Ones(n);
  Matrix rhs = Matrix::Zero(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    rhs(cols[c], static_cast<Eigen::Index>(c)) = 1.0;
    rhs.col(static_cast<Eigen::Index>(c)).array() -= pi(cols[c]);
  }
  const Matrix system = Matrix::Identity(n, n) - P + ones * pi;
  Matrix X = system.partialPivLu().solve(rhs);
  X -= ones * (pi * X);
  return X;
}

Vector level_passage_times(const FiniteChain& chain) {
  const Eigen::Index m = chain.m;
  const Eigen::Index nt = chain.size() - m;
  const Matrix P_T = chain.P.bottomRightCorner(nt, nt);
  const Vector t = (Matrix::Identity(nt, nt) - P_T).partialPivLu().solve(Vector::Ones(nt));
  Vector out(chain.size());
  out.tail(nt) = t;
  out.head(m) = Vector::Ones(m) + chain.P.topRightCorner(m, nt) * t;
  return out;
}

Matrix first_passage_g(const QbdModel& model, int N) {
  if (N < 3) throw Error(ErrorKind::DomainError, "first_passage_g: truncation too small");
  const Eigen::Index m = model.m();
  // Levels 2..N, absorbed on entering level 1.
  const int count = N - 1;
  const Matrix H = assemble(model.A0, model.A_minus1, model.A0, model.A1, count - 1);
  Matrix exit = Matrix::Zero(count * m, m);
  exit.topRows(m) = model.A_minus1;
  const Matrix absorbed = (Matrix::Identity(count * m, count * m) - H).partialPivLu().solve(exit);
  return absorbed.topRows(m);
}

Matrix taboo_u(const QbdModel& model, int N) {
  return model.A0 + model.A1 * first_passage_g(model, N);
}

}  // namespace qbd::oracle
