#pragma once

#include "qbd/ergodicity.hpp"
#include "qbd/poisson.hpp"

namespace qbd {

/// Direction Q of a perturbation P(delta) = P + delta Q with the QBD block
/// shape. Rows of Q must sum to zero.
struct PerturbationSpec {
  Matrix dB;
  Matrix dA_minus1;
  Matrix dA0;
  Matrix dA1;
};

/// Throws InvalidPerturbation on shape mismatch or Q 1 != 0.
void require_valid(const PerturbationSpec& Q, Eigen::Index m);

/// P + delta Q as a model; throws InvalidPerturbation if an entry leaves [0,1].
QbdModel perturbed(const QbdModel& model, const PerturbationSpec& Q, double delta);

/// d omega / d delta at 0, as pi Q h with h the pi h = 0 Poisson solution.
double omega_derivative_1(const QbdModel& model, const RguTriple& rgu, const StationaryDist& dist,
                          const PerturbationSpec& Q, const RewardSpec& g, double tol = kDefaultTol);

/// n! pi (Q D)^n g on reflecting truncations with `window` and 2 * `window`
/// levels; throws NoConvergence unless both agree to `tol` (relative).
double derivative_series(const QbdModel& model, const PerturbationSpec& Q, const RewardSpec& g,
                         int order, int window, double tol = 1e-8);

/// || Q ||_v for the drift function of the certificate.
double v_norm(const PerturbationSpec& Q, const DriftCertificate& cert);

/// (1 - lambda0) / || Q ||_v; +infinity when Q = 0.
double admissible_delta(const QbdModel& model, const DriftCertificate& cert,
                        const PerturbationSpec& Q);

struct FdCheck {
  double fd_estimate = 0.0;
  double analytic = 0.0;
  double rel_err = 0.0;
};

/// Central difference of omega(delta) from two full re-solves, against
/// omega_derivative_1.
FdCheck fd_check(const QbdModel& model, const PerturbationSpec& Q, const RewardSpec& g,
                 double delta = 1e-5);

}  // namespace qbd
