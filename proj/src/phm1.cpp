#include "qbd/phm1.hpp"

#include <cmath>
#include <sstream>

#include "qbd/deviation.hpp"
#include "qbd/error.hpp"

namespace qbd {

double PhRepresentation::mean() const {
  return -(sigma * S.partialPivLu().solve(Vector::Ones(S.rows()))).value();
}

void require_valid(const PhRepresentation& ph) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidUniformization, what); };
  const Eigen::Index m = ph.S.rows();
  if (m == 0 || ph.S.cols() != m || ph.sigma.size() != m) fail("PH representation has inconsistent sizes");
  if (!ph.S.allFinite() || !ph.sigma.allFinite()) fail("PH representation is not finite");
  if (ph.sigma.minCoeff() < 0.0 || std::abs(ph.sigma.sum() - 1.0) > 1e-10) {
    fail("sigma must be a probability vector");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(ph.S(i, i) < 0.0)) fail("S must have a negative diagonal");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != j && ph.S(i, j) < 0.0) fail("S must have nonnegative off-diagonal entries");
    }
  }
  const Vector s = ph.s();
  if (s.minCoeff() < -1e-12 || s.maxCoeff() <= 0.0) fail("S 1 must be <= 0 with a strict entry");
  const double mean = ph.mean();
  if (!std::isfinite(mean) || !(mean > 0.0)) fail("mean inter-arrival time must be finite and positive");
}

double default_gamma(const PhRepresentation& ph, double mu) {
  return 1.05 * (mu + (-ph.S.diagonal()).maxCoeff());
}

QbdModel build_qbd(const PhRepresentation& ph, double mu, std::optional<double> gamma) {
  require_valid(ph);
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::InvalidUniformization, "service rate mu must be positive");
  }
  const double g = gamma.value_or(default_gamma(ph, mu));
  const double needed = mu + (-ph.S.diagonal()).maxCoeff();
  if (!(g >= needed)) {
    std::ostringstream os;
    os << "gamma = " << g << " is below mu + max(-S_ii) = " << needed;
    throw Error(ErrorKind::InvalidUniformization, os.str());
  }
  const Eigen::Index m = ph.S.rows();
  const Matrix I = Matrix::Identity(m, m);
  QbdModel model;
  model.A_minus1 = (mu / g) * I;
  model.A0 = I + (ph.S - mu * I) / g;
  model.A1 = ph.s() * ph.sigma / g;
  model.B = model.A0 + model.A_minus1;
  // Entries can dip below zero by rounding only.
  model.A0 = model.A0.cwiseMax(0.0);
  require_valid(model);
  return model;
}

double queue_length(const StationaryDist& dist) {
  const Vector ones = Vector::Ones(dist.m());
  return dist.pi0 * dist.R * (dist.I_minus_R_inv * (dist.I_minus_R_inv * ones));
}

SensitivityResult sensitivity(const PhRepresentation& ph, double mu, int N,
                              std::optional<double> gamma) {
  const QbdModel model = build_qbd(ph, mu, gamma);
  const RguTriple rgu = solve_rgu(model);
  const StationaryDist dist = stationary(model, rgu);
  const Eigen::Index m = model.m();
  const Vector ones = Vector::Ones(m);
  const Matrix& G = rgu.G;
  const Matrix& R = dist.R;
  const Matrix& IRinv = dist.I_minus_R_inv;
  const Matrix IUinv = neumann_inverse(rgu.U);

  SensitivityResult out;
  out.L = queue_length(dist);
  if (N < 0) N = static_cast<int>(std::ceil(4.0 * out.L));
  N = std::max(N, 1);

  const Vector tau1 = IUinv * (IRinv * ones);
  const Vector w = IUinv * (IRinv * (model.A1 * tau1));

  std::vector<Vector> y(static_cast<std::size_t>(N) + 1, Vector::Zero(m));
  Vector a = Vector::Zero(m), b = Vector::Zero(m), c = Vector::Zero(m);
  for (int n = 1; n <= N; ++n) {
    a = tau1 + G * a;
    b += a;
    c = w + G * c;
    y[n] = (b + c) / out.L - a;
  }

  const Vector s = ph.s();
  const Matrix X = kernel_one_group_inverse(ph.S + s * ph.sigma * G);
  const Matrix M = m_matrix(R, G);
  const double sy1 = ph.sigma * y[1];
  const RowVector piRI = dist.pi0 * R * IRinv;
  out.c0 = sy1 * (dist.pi0 * M * X * s).value() - (piRI * IRinv * M * tau1).value() / out.L +
           (piRI * M * tau1).value() - (piRI * M * w).value() / out.L;

  out.m_blocks.resize(static_cast<std::size_t>(N) + 1);
  out.m_blocks[0] = -sy1 * (X * s) + out.c0 * ones;
  Vector g_pow_m0 = out.m_blocks[0];
  for (int n = 1; n <= N; ++n) {
    g_pow_m0 = G * g_pow_m0;
    out.m_blocks[n] = y[n] + g_pow_m0;
  }
  return out;
}

std::vector<SweepRow> sweep_rho(const PhRepresentation& ph, const std::vector<double>& mu_list) {
  std::vector<SweepRow> rows;
  rows.reserve(mu_list.size());
  for (double mu : mu_list) {
    SweepRow row;
    row.mu = mu;
    try {
      row.rho = 1.0 / (mu * ph.mean());
      const QbdModel model = build_qbd(ph, mu);
      const RguTriple rgu = solve_rgu(model);
      row.L = queue_length(stationary(model, rgu));
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

namespace presets {

PhRepresentation mm1() {
  PhRepresentation ph;
  ph.sigma = RowVector::Ones(1);
  ph.S = -Matrix::Ones(1, 1);
  return ph;
}

PhRepresentation e2() {
  PhRepresentation ph;
  ph.sigma = RowVector(2);
  ph.sigma << 1.0, 0.0;
  ph.S = Matrix(2, 2);
  ph.S << -2.0, 2.0, 0.0, -2.0;
  return ph;
}

PhRepresentation h2() {
  PhRepresentation ph;
  ph.sigma = RowVector(2);
  ph.sigma << 0.11270167, 0.88729833;
  ph.S = Matrix::Zero(2, 2);
  ph.S(0, 0) = -0.225403332;
  ph.S(1, 1) = -1.77459667;
  return ph;
}

}  // namespace presets

PhRepresentation preset(const std::string& name) {
  if (name == "mm1") return presets::mm1();
  if (name == "e2") return presets::e2();
  if (name == "h2") return presets::h2();
  throw Error(ErrorKind::DomainError, "unknown PH preset '" + name + "' (expected mm1, e2 or h2)");
}

}  // namespace qbd
