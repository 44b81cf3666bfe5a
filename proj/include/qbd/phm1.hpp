#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbd/rgu.hpp"

namespace qbd {

/// Phase-type inter-arrival law (sigma, S); the exit rates are s = -S 1.
struct PhRepresentation {
  RowVector sigma;
  Matrix S;

  Vector s() const { return -S.rowwise().sum(); }
  /// -sigma S^{-1} 1
  double mean() const;
};

/// Throws InvalidUniformization unless S is a proper subgenerator and sigma a
/// probability vector.
void require_valid(const PhRepresentation& ph);

double default_gamma(const PhRepresentation& ph, double mu);

/// Discrete-time PH/M/1 chain by uniformization at rate gamma. Level = queue
/// length, phase = arrival phase.
QbdModel build_qbd(const PhRepresentation& ph, double mu, std::optional<double> gamma = std::nullopt);

/// L = pi0 R (I - R)^{-2} 1.
double queue_length(const StationaryDist& dist);

struct SensitivityResult {
  double L = 0.0;
  std::vector<Vector> m_blocks;  // m_0 .. m_N
  double c0 = 0.0;
};

/// m = L^{-1} D g with g_n = n 1, for levels 0..N. N < 0 selects ceil(4 L).
SensitivityResult sensitivity(const PhRepresentation& ph, double mu, int N = -1,
                              std::optional<double> gamma = std::nullopt);

struct SweepRow {
  double mu = 0.0;
  double rho = 0.0;
  double L = 0.0;
  bool ok = false;
  std::string error;
};

/// One row per mu; rho = 1 / (mu * mean inter-arrival time).
std::vector<SweepRow> sweep_rho(const PhRepresentation& ph, const std::vector<double>& mu_list);

namespace presets {
PhRepresentation mm1();
PhRepresentation e2();
PhRepresentation h2();
}  // namespace presets

/// "mm1", "e2" or "h2"; throws DomainError otherwise.
PhRepresentation preset(const std::string& name);

}  // namespace qbd
