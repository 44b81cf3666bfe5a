#include "qbd/perturb.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qbd/error.hpp"
#include "qbd/oracle.hpp"

namespace qbd {

void require_valid(const PerturbationSpec& Q, Eigen::Index m) {
  const std::pair<const Matrix*, const char*> blocks[] = {
      {&Q.dB, "dB"}, {&Q.dA_minus1, "dA_minus1"}, {&Q.dA0, "dA0"}, {&Q.dA1, "dA1"}};
  for (const auto& [M, name] : blocks) {
    if (M->rows() != m || M->cols() != m) {
      std::ostringstream os;
      os << "perturbation block " << name << " is " << M->rows() << "x" << M->cols() << ", expected "
         << m << "x" << m;
      throw Error(ErrorKind::InvalidPerturbation, os.str());
    }
    if (!M->allFinite()) throw Error(ErrorKind::InvalidPerturbation, std::string(name) + " is not finite");
  }
  const double boundary = (Q.dB + Q.dA1).rowwise().sum().cwiseAbs().maxCoeff();
  const double interior = (Q.dA_minus1 + Q.dA0 + Q.dA1).rowwise().sum().cwiseAbs().maxCoeff();
  if (boundary > 1e-12 || interior > 1e-12) {
    std::ostringstream os;
    os << "perturbation rows must sum to zero (boundary defect " << boundary << ", interior defect "
       << interior << ")";
    throw Error(ErrorKind::InvalidPerturbation, os.str());
  }
}

QbdModel perturbed(const QbdModel& model, const PerturbationSpec& Q, double delta) {
  require_valid(Q, model.m());
  QbdModel out = model;
  out.B += delta * Q.dB;
  out.A_minus1 += delta * Q.dA_minus1;
  out.A0 += delta * Q.dA0;
  out.A1 += delta * Q.dA1;
  for (const Matrix* M : {&out.B, &out.A_minus1, &out.A0, &out.A1}) {
    if (M->minCoeff() < 0.0 || M->maxCoeff() > 1.0) {
      std::ostringstream os;
      os << "P + delta Q leaves [0,1] at delta = " << delta;
      throw Error(ErrorKind::InvalidPerturbation, os.str());
    }
  }
  return out;
}

double omega_derivative_1(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist,
                          const PerturbationSpec& Q, const RewardSpec& g, double tol) {
  require_valid(Q, model.m());
  const PoissonSolution sol = solve_poisson(model, rgu, dist, g, std::max(g.K() + 2, 8),
                                            Normalization::PiZero, tol);

  // h_n extended in chunks so each level is generated once.
  std::vector<Vector> h = sol.h;
  auto h_at = [&](long n) -> const Vector& {
    while (n >= static_cast<long>(h.size())) {
      Vector next = sol.block(static_cast<long>(h.size()));
      h.push_back(std::move(next));
    }
    return h[static_cast<std::size_t>(n)];
  };

  RowVector pi_prev = RowVector::Zero(model.m());
  RowVector pi_cur = dist.pi0;
  RowVector pi_next = dist.pi0 * dist.R;
  auto term = [&](long n) -> std::pair<double, double> {
    if (n > 0) {
      pi_prev = pi_cur;
      pi_cur = pi_next;
      pi_next = pi_next * dist.R;
    }
    const RowVector piQ = n == 0 ? RowVector(pi_cur * Q.dB + pi_next * Q.dA_minus1)
                                 : RowVector(pi_prev * Q.dA1 + pi_cur * Q.dA0 + pi_next * Q.dA_minus1);
    const Vector& h_n = h_at(n);
    return {piQ * h_n, (piQ.transpose().cwiseAbs().array() * h_n.cwiseAbs().array()).sum()};
  };
  return sum_until_negligible(term, tol * (1.0 - spectral_radius(dist.R)), g.K() + 2);
}

namespace {

double truncated_series(const QbdModel& model, const PerturbationSpec& Q, const RewardSpec& g,
                        int order, int N) {
  const oracle::FiniteChain chain = oracle::truncate(model, N);
  const Matrix Qt = oracle::assemble(Q.dB, Q.dA_minus1, Q.dA0, Q.dA1, N);
  const RowVector pi = stationary_vector(chain.P);
  const Eigen::Index n = chain.size();
  const Vector ones = Vector::Ones(n);

  // x D = x (I - P + 1 pi)^{-1} - (x 1) pi, for row vectors x.
  const Eigen::PartialPivLU<Matrix> lu(
      (Matrix::Identity(n, n) - chain.P + ones * pi).transpose().eval());
  RowVector x = pi;
  double factorial = 1.0;
  for (int k = 1; k <= order; ++k) {
    const RowVector xQ = x * Qt;
    x = lu.solve(xQ.transpose()).transpose() - (xQ.sum()) * pi;
    factorial *= k;
  }
  return factorial * x.dot(oracle::reward_vector(chain, g).transpose());
}

}  // namespace

double derivative_series(const QbdModel& model, const PerturbationSpec& Q, const RewardSpec& g,
                         int order, int window, double tol) {
  if (order < 1) throw Error(ErrorKind::DomainError, "derivative_series: order must be >= 1");
  if (window < 2) throw Error(ErrorKind::DomainError, "derivative_series: window too small");
  if (!model.assume_aperiodic) {
    throw Error(ErrorKind::DomainError, "derivative_series requires an aperiodic QBD");
  }
  require_valid(Q, model.m());
  require_valid(g, model.m());
  const double coarse = truncated_series(model, Q, g, order, window);
  const double fine = truncated_series(model, Q, g, order, 2 * window);
  if (!(std::abs(coarse - fine) <= tol * std::max(1.0, std::abs(fine)))) {
    std::ostringstream os;
    os << "derivative_series: window " << window << " gives " << coarse << ", window " << 2 * window
       << " gives " << fine;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return fine;
}

double v_norm(const PerturbationSpec& Q, const DriftCertificate& cert) {
  return v_norm_blocks(Q.dB, Q.dA_minus1, Q.dA0, Q.dA1, cert);
}

double admissible_delta(const QbdModel& model, const DriftCertificate& cert,
                        const PerturbationSpec& Q) {
  require_valid(Q, model.m());
  const double q = v_norm(Q, cert);
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 - cert.lambda0) / q;
}

FdCheck fd_check(const QbdModel& model, const PerturbationSpec& Q, const RewardSpec& g,
                 double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::DomainError, "fd_check: delta must be positive");
  const QbdModel plus = perturbed(model, Q, delta);
  const QbdModel minus = perturbed(model, Q, -delta);

  auto solve_omega = [&g](const QbdModel& mdl) {
    const RguTriple rgu = solve_rgu(mdl);
    return omega(stationary(mdl, rgu), g);
  };
  FdCheck out;
  out.fd_estimate = (solve_omega(plus) - solve_omega(minus)) / (2.0 * delta);
  const RguTriple rgu = solve_rgu(model);
  out.analytic = omega_derivative_1(model, rgu, stationary(model, rgu), Q, g);
  const double scale = std::abs(out.analytic);
  out.rel_err = std::abs(out.fd_estimate - out.analytic) / (scale > 0.0 ? scale : 1.0);
  return out;
}

}  // namespace qbd
