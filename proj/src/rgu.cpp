#include "qbd/rgu.hpp"

#include <cmath>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd {

namespace {

double inf_norm(const Matrix& M) { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

// One step of G <- (I - A0 - A1 G)^{-1} A-1.
Matrix u_based_step(const QbdModel& model, const Matrix& G) {
  const Eigen::Index m = model.m();
  const Matrix lhs = Matrix::Identity(m, m) - model.A0 - model.A1 * G;
  return lhs.partialPivLu().solve(model.A_minus1);
}

Matrix log_reduction(const QbdModel& model, double tol, int& iterations) {
  const Eigen::Index m = model.m();
  const Matrix I = Matrix::Identity(m, m);
  const Eigen::PartialPivLU<Matrix> base((I - model.A0).eval());
  Matrix up = base.solve(model.A1);
  Matrix down = base.solve(model.A_minus1);
  Matrix G = down;
  Matrix T = up;

  constexpr int kMaxIterations = 200;
  for (iterations = 1; iterations <= kMaxIterations; ++iterations) {
    const Matrix mix = up * down + down * up;
    const Eigen::PartialPivLU<Matrix> lu((I - mix).eval());
    up = lu.solve(up * up);
    down = lu.solve(down * down);
    const Matrix increment = T * down;
    G += increment;
    T = T * up;
    const double stochastic_gap = (Vector::Ones(m) - G.rowwise().sum()).cwiseAbs().maxCoeff();
    if (stochastic_gap <= 1e-3 * tol || inf_norm(increment) <= 1e-3 * tol * std::max(1.0, inf_norm(G)) ||
        inf_norm(T) <= 1e-16) {
      break;
    }
  }
  return G;
}

}  // namespace

double g_residual(const QbdModel& model, const Matrix& G) {
  return inf_norm(G - (model.A_minus1 + model.A0 * G + model.A1 * G * G));
}

double r_residual(const QbdModel& model, const Matrix& R) {
  return inf_norm(R - (model.A1 + R * model.A0 + R * R * model.A_minus1));
}

Matrix solve_g(const QbdModel& model, double tol, GAlgorithm algorithm, int* iterations) {
  require_valid(model);
  int its = 0;
  Matrix G;
  if (algorithm == GAlgorithm::LogReduction) {
    G = log_reduction(model, tol, its);
  } else {
    G = Matrix::Zero(model.m(), model.m());
  }

  // Functional iteration is the whole algorithm in the Functional case, and a
  // polishing step after log reduction otherwise.
  const int max_functional = algorithm == GAlgorithm::Functional ? 2000000 : 1000;
  for (int k = 0; g_residual(model, G) > tol; ++k) {
    if (k >= max_functional) {
      std::ostringstream os;
      os << "solve_g: residual " << g_residual(model, G) << " above " << tol << " after " << its
         << " iterations";
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    G = u_based_step(model, G);
    ++its;
  }
  if (iterations) *iterations = its;
  return G;
}

Matrix compute_u(const QbdModel& model, const Matrix& G) {
  const Matrix U = model.A0 + model.A1 * G;
  const double sp = spectral_radius(U);
  if (!(sp < 1.0 - 1e-12)) {
    std::ostringstream os;
    os << "compute_u: sp(U) = " << sp;
    throw Error(ErrorKind::NotContractive, os.str());
  }
  return U;
}

Matrix compute_r(const QbdModel& model, const Matrix& U) {
  return model.A1 * neumann_inverse(U);
}

RguTriple solve_rgu(const QbdModel& model, double tol, GAlgorithm algorithm) {
  RguTriple out;
  out.G = solve_g(model, tol, algorithm, &out.iterations);
  out.residual = g_residual(model, out.G);
  out.U = compute_u(model, out.G);
  out.R = compute_r(model, out.U);
  return out;
}

Matrix censored_boundary(const QbdModel& model, const Matrix& G) {
  return model.B + model.A1 * G;
}

StationaryDist stationary(const QbdModel& model, const RguTriple& rgu) {
  const StabilityReport report = stability(model);
  if (!report.positive_recurrent) {
    std::ostringstream os;
    os << "stationary: drift " << report.drift << " is not positive";
    throw Error(ErrorKind::NotPositiveRecurrent, os.str());
  }
  const Eigen::Index m = model.m();
  StationaryDist dist;
  dist.R = rgu.R;
  dist.I_minus_R_inv = neumann_inverse(rgu.R);

  // P_* is stochastic only up to the accuracy of G; renormalise its rows.
  Matrix P_star = censored_boundary(model, rgu.G);
  const Vector rows = P_star.rowwise().sum();
  P_star = rows.cwiseInverse().asDiagonal() * P_star;
  const RowVector x = stationary_vector(P_star);
  dist.pi0 = x / (x * dist.I_minus_R_inv * Vector::Ones(m));
  return dist;
}

RowVector pi_level(const StationaryDist& dist, int n) {
  if (n < 0) throw Error(ErrorKind::DomainError, "pi_level: negative level");
  RowVector out = dist.pi0;
  for (int k = 0; k < n; ++k) out = out * dist.R;
  return out;
}

}  // namespace qbd
