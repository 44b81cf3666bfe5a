#pragma once

#include <string>
#include <vector>

#include "qbd/matstoch.hpp"

namespace qbd {

/// Discrete-time, level-independent QBD with boundary block B:
///
///   P = [ B      A1                ]
///       [ A-1    A0    A1          ]
///       [        A-1   A0   A1     ]
///       [              ...  ...    ]
///
/// Irreducibility of the infinite chain is assumed, not verified.
struct QbdModel {
  Matrix B;
  Matrix A_minus1;
  Matrix A0;
  Matrix A1;
  /// Aperiodicity is never tested on the infinite chain. Deviation-matrix and
  /// perturbation routines refuse to run when this is false.
  bool assume_aperiodic = true;

  Eigen::Index m() const { return A0.rows(); }
  Matrix A() const { return A_minus1 + A0 + A1; }
};

struct Violation {
  std::string block;
  Eigen::Index row = -1;
  Eigen::Index col = -1;  // -1 when the defect concerns a whole row or block
  double magnitude = 0.0;
  std::string message;
};

std::string describe(const Violation& v);

/// Empty iff every structural invariant of the model holds.
std::vector<Violation> validate(const QbdModel& model);

/// Throws InvalidModel listing the first violation, if any.
void require_valid(const QbdModel& model);

struct StabilityReport {
  RowVector mu;  // invariant vector of A
  double drift = 0.0;  // mu (A-1 - A1) 1
  bool positive_recurrent = false;
};

/// Drift values within this band of zero are treated as null recurrent.
inline constexpr double kNullDriftTol = 1e-12;

StabilityReport stability(const QbdModel& model);

/// A(z) = A-1 / z + A0 + z A1 for z > 0.
Matrix a_of_z(const QbdModel& model, double z);

}  // namespace qbd
