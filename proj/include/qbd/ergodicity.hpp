#pragma once

#include <vector>

#include "qbd/qbd_model.hpp"

namespace qbd {

/// Drift condition P v <= lambda0 v + b 1[C] with v_n = z0^n u and C = level 0.
struct DriftCertificate {
  double z0 = 1.0;
  double lambda0 = 1.0;
  Vector u;  // Perron vector of A(z0), max entry 1
  double b = 0.0;
  int small_set_level = 0;  // C is level 0
};

/// Perron-Frobenius eigenvalue of A(z).
double sigma(const QbdModel& model, double z, double tol = kDefaultTol);

/// d sigma / dz from the left and right Perron vectors of A(z).
double sigma_derivative(const QbdModel& model, double z, double tol = kDefaultTol);

/// Smallest minimiser z0 > 1 of sigma, with lambda0 = sigma(z0) and u = u(z0).
/// The returned certificate has b = 0; see drift_b.
DriftCertificate find_z0(const QbdModel& model, double tol = kDefaultTol);

/// b = max_j (B v0 + A1 v1 - lambda0 v0)_j, clamped at 0.
double drift_b(const QbdModel& model, const DriftCertificate& cert);

/// find_z0 followed by drift_b.
DriftCertificate drift_certificate(const QbdModel& model, double tol = kDefaultTol);

struct DriftReport {
  bool passed = true;
  int first_failure_level = -1;
  std::vector<int> failing_levels;
  double boundary_excess = 0.0;        // max_j ((P v)_0 - lambda0 v_0 - b)_j
  double max_interior_rel_defect = 0.0;  // max over n >= 1 of |(P v)_n - lambda0 v_n| / v_n
};

/// Checks the drift inequality on levels 0..N; interior levels must satisfy it
/// with equality to 1e-9 (relative to v_n).
DriftReport verify_drift(const QbdModel& model, const DriftCertificate& cert, int N);

/// Weighted norm sup_i (1/v_i) sum_j |Q_ij| v_j of a QBD-shaped matrix with
/// boundary row [boundary, up] and interior rows [down, local, up].
double v_norm_blocks(const Matrix& boundary, const Matrix& down, const Matrix& local,
                     const Matrix& up, const DriftCertificate& cert);

}  // namespace qbd
