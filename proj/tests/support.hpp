#pragma once

#include <random>

#include "qbd/oracle.hpp"
#include "qbd/perturb.hpp"
#include "qbd/phm1.hpp"

namespace qbd::testing {

/// Uniformized M/M/1 with lambda = 1, mu = 1.2, gamma = 2.2.
inline QbdModel mm1_model() { return build_qbd(presets::mm1(), 1.2, 2.2); }

/// Positive blocks, every row moving down with more mass than up, B = A0 + A-1.
inline QbdModel random_model(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  std::uniform_real_distribution<double> down_mass(0.35, 0.5);
  std::uniform_real_distribution<double> up_mass(0.1, 0.25);
  QbdModel model;
  model.A_minus1.resize(m, m);
  model.A0.resize(m, m);
  model.A1.resize(m, m);
  model.B.resize(m, m);
  auto fill = [&](Matrix& M, Eigen::Index i, double mass) {
    for (Eigen::Index j = 0; j < m; ++j) M(i, j) = unit(rng);
    M.row(i) *= mass / M.row(i).sum();
  };
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = down_mass(rng);
    const double u = up_mass(rng);
    fill(model.A_minus1, i, d);
    fill(model.A1, i, u);
    fill(model.A0, i, 1.0 - d - u);
    fill(model.B, i, 1.0 - u);
  }
  return model;
}

/// Q with Q 1 = 0 that keeps P + delta Q inside [0,1] for |delta| <= 1e-3.
inline PerturbationSpec random_perturbation(std::mt19937_64& rng, Eigen::Index m) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  PerturbationSpec Q;
  auto block = [&]() {
    Matrix M(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) M(i, j) = coef(rng);
    return M;
  };
  Q.dA_minus1 = block();
  Q.dA1 = block();
  Q.dA0 = block();
  Q.dB = block();
  Q.dA0.col(0) -= (Q.dA_minus1 + Q.dA0 + Q.dA1).rowwise().sum();
  Q.dB.col(0) -= (Q.dB + Q.dA1).rowwise().sum();
  for (Matrix* M : {&Q.dB, &Q.dA_minus1, &Q.dA0, &Q.dA1}) *M *= 0.25;
  return Q;
}

inline RewardSpec random_reward(std::mt19937_64& rng, Eigen::Index m, int K) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  RewardSpec g;
  for (int n = 0; n <= K; ++n) g.explicit_levels.push_back(Vector::NullaryExpr(m, [&] { return coef(rng); }));
  g.tail_c0 = Vector::NullaryExpr(m, [&] { return coef(rng); });
  g.tail_c1 = Vector::NullaryExpr(m, [&] { return 0.5 * coef(rng); });
  return g;
}

inline double max_abs(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

}  // namespace qbd::testing
