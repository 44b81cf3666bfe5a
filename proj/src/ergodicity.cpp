#include "qbd/ergodicity.hpp"

#include <cmath>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd {

namespace {

constexpr double kInteriorTol = 1e-9;

}  // namespace

double sigma(const QbdModel& model, double z, double tol) {
  return perron(a_of_z(model, z), tol).value;
}

double sigma_derivative(const QbdModel& model, double z, double tol) {
  const Matrix A = a_of_z(model, z);
  const PerronPair right = perron(A, tol);
  const PerronPair left = perron(A.transpose(), tol);
  const Matrix dA = -model.A_minus1 / (z * z) + model.A1;
  return left.vector.dot(dA * right.vector) / left.vector.dot(right.vector);
}

DriftCertificate find_z0(const QbdModel& model, double tol) {
  require_valid(model);
  const StabilityReport report = stability(model);
  if (!report.positive_recurrent) {
    std::ostringstream os;
    os << "find_z0: sigma'(1) = " << -report.drift << " is not negative";
    throw Error(ErrorKind::NotPositiveRecurrent, os.str());
  }

  // Doubling probes z_j = 1 + 1e-6 2^j until sigma rises three times in a row.
  std::vector<double> z{1.0};
  std::vector<double> s{1.0};
  int rises = 0;
  for (int j = 0; rises < 3; ++j) {
    if (j > 80) {
      throw Error(ErrorKind::NoConvergence, "find_z0: sigma(z) keeps decreasing; no finite minimiser");
    }
    z.push_back(1.0 + 1e-6 * std::ldexp(1.0, j));
    s.push_back(sigma(model, z.back(), tol));
    rises = s.back() > s[s.size() - 2] ? rises + 1 : 0;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < s[best]) best = i;
  }
  double lo = z[best == 0 ? 0 : best - 1];
  double hi = z[std::min(best + 1, z.size() - 1)];

  // sigma is log-convex in log z, so its derivative changes sign once. Bisect
  // on the sign, keeping the left end of any plateau.
  const double flat = 1e-13;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sigma_derivative(model, mid, tol) < -flat) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  DriftCertificate cert;
  cert.z0 = hi;
  const PerronPair pair = perron(a_of_z(model, cert.z0), tol);
  cert.lambda0 = pair.value;
  cert.u = pair.vector;
  if (!(cert.lambda0 < 1.0)) {
    std::ostringstream os;
    os << "find_z0: sigma(z0) = " << cert.lambda0 << " is not below 1";
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return cert;
}

double drift_b(const QbdModel& model, const DriftCertificate& cert) {
  const Vector excess = model.B * cert.u + cert.z0 * (model.A1 * cert.u) - cert.lambda0 * cert.u;
  return std::max(excess.maxCoeff(), 0.0);
}

DriftCertificate drift_certificate(const QbdModel& model, double tol) {
  DriftCertificate cert = find_z0(model, tol);
  cert.b = drift_b(model, cert);
  return cert;
}

DriftReport verify_drift(const QbdModel& model, const DriftCertificate& cert, int N) {
  if (N < 0) throw Error(ErrorKind::DomainError, "verify_drift: negative level count");
  DriftReport report;
  auto fail = [&report](int level) {
    if (report.passed) report.first_failure_level = level;
    report.passed = false;
    report.failing_levels.push_back(level);
  };
  auto v = [&cert](int n) -> Vector { return std::pow(cert.z0, n) * cert.u; };

  const Vector Pv0 = model.B * v(0) + model.A1 * v(1);
  report.boundary_excess = (Pv0 - cert.lambda0 * v(0)).maxCoeff() - cert.b;
  if (report.boundary_excess > 1e-12 * std::max(1.0, Pv0.maxCoeff())) fail(0);

  for (int n = 1; n <= N; ++n) {
    const Vector vn = v(n);
    const Vector Pvn = model.A_minus1 * v(n - 1) + model.A0 * vn + model.A1 * v(n + 1);
    const double defect = ((Pvn - cert.lambda0 * vn).array() / vn.array()).abs().maxCoeff();
    report.max_interior_rel_defect = std::max(report.max_interior_rel_defect, defect);
    if (!(defect <= kInteriorTol)) fail(n);
  }
  return report;
}

double v_norm_blocks(const Matrix& boundary, const Matrix& down, const Matrix& local,
                     const Matrix& up, const DriftCertificate& cert) {
  const Vector& u = cert.u;
  const Vector boundary_rows = boundary.cwiseAbs() * u + cert.z0 * (up.cwiseAbs() * u);
  const Vector interior_rows =
      down.cwiseAbs() * u / cert.z0 + local.cwiseAbs() * u + cert.z0 * (up.cwiseAbs() * u);
  return std::max((boundary_rows.array() / u.array()).maxCoeff(),
                  (interior_rows.array() / u.array()).maxCoeff());
}

}  // namespace qbd
