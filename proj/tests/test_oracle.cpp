#include "doctest.h"
#include "qbd/error.hpp"
#include "support.hpp"

using namespace qbd;

namespace {

Matrix random_chain(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unit(0.02, 1.0);
  Matrix P = Matrix::NullaryExpr(n, n, [&] { return unit(rng); });
  return P.rowwise().sum().cwiseInverse().asDiagonal() * P;
}

double spread(const Vector& v) { return v.maxCoeff() - v.minCoeff(); }

}  // namespace

TEST_CASE("truncation") {
  const oracle::FiniteChain c = oracle::truncate(testing::mm1_model(), 1);
  Matrix expected(2, 2);
  expected << 6.0 / 11.0, 5.0 / 11.0, 6.0 / 11.0, 5.0 / 11.0;
  CHECK((c.P - expected).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(3);
  const oracle::FiniteChain r = oracle::truncate(testing::random_model(rng, 3), 20);
  CHECK(((r.P * Vector::Ones(r.size())).array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(is_irreducible(r.P));
  CHECK(r.state(r.index(4, 2)) == std::pair<int, Eigen::Index>{4, 2});

  const QbdModel mm1 = testing::mm1_model();
  const RowVector a = stationary_vector(oracle::truncate(mm1, 50).P);
  const RowVector b = stationary_vector(oracle::truncate(mm1, 100).P);
  CHECK(std::abs(a(0) - b(0)) < 1e-3);
  CHECK(std::abs(b(0) - 1.0 / 6.0) < 1e-7);
}

TEST_CASE("oracle Poisson solutions") {
  Matrix P(2, 2);
  P << 0.5, 0.5, 0.25, 0.75;
  Vector g(2);
  g << 1.0, -0.5;
  Matrix X(2, 2);
  X << 8.0 / 9.0, -8.0 / 9.0, -4.0 / 9.0, 4.0 / 9.0;
  const Vector h = oracle::oracle_poisson(P, g);
  CHECK((h - X * g).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(((Matrix::Identity(2, 2) - P) * h - g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(oracle::oracle_poisson(P, Vector::Zero(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(oracle::oracle_poisson(P, Vector::Ones(2)), Error);

  const auto rq = oracle::oracle_return_quantities(P, 0, Vector::Ones(2));
  CHECK((rq.zeta - rq.tau).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(rq.tau(1) - 4.0) < 1e-13);
  CHECK(std::abs(rq.tau(0) - 3.0) < 1e-13);
}

TEST_CASE("all routes to h agree up to a constant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 3 + trial;
    const Matrix P = random_chain(rng, n);
    const Vector g = Vector::NullaryExpr(n, [&] { return coef(rng); });
    const double w = stationary_vector(P) * g;
    const Vector h = oracle::oracle_poisson(P, g - w * Vector::Ones(n));
    const auto rq = oracle::oracle_return_quantities(P, trial % n, g);
    CHECK(std::abs(rq.omega - w) < 1e-12);
    CHECK(std::abs(rq.h(trial % n)) < 1e-12);
    CHECK(spread(rq.h - h) < 1e-9);

    std::vector<Eigen::Index> A;
    for (Eigen::Index i = 0; i < n; i += 2) A.push_back(i);
    const Vector hs = oracle::oracle_subset_decomposition(P, A, g);
    CHECK(spread(hs - h) < 1e-9);
    const Vector r = (Matrix::Identity(n, n) - P) * hs - (g - w * Vector::Ones(n));
    CHECK(r.cwiseAbs().maxCoeff() < 1e-10);

    const Vector single = oracle::oracle_subset_decomposition(P, {1}, g);
    CHECK(spread(single - oracle::oracle_return_quantities(P, 1, g).h) < 1e-9);
    std::vector<Eigen::Index> most;
    for (Eigen::Index i = 1; i < n; ++i) most.push_back(i);
    CHECK(spread(oracle::oracle_subset_decomposition(P, most, g) - h) < 1e-9);
  }
}

TEST_CASE("partial-sum deviation matrix") {
  CHECK(oracle::oracle_deviation(Matrix::Ones(1, 1), 10, 1e-12)(0, 0) == 0.0);
  Matrix P(2, 2);
  P << 0.5, 0.5, 0.25, 0.75;
  CHECK((oracle::oracle_deviation(P, 10000, 1e-12) - group_inverse(P)).cwiseAbs().maxCoeff() < 1e-8);
  std::mt19937_64 rng(5);
  const Matrix Q = random_chain(rng, 6);
  const Matrix D = oracle::oracle_deviation(Q, 10000, 1e-12);
  const RowVector pi = stationary_vector(Q);
  for (Eigen::Index j = 0; j < 6; ++j) {
    // tau_j is the return time, so pi tau = E_pi T(j) with T(j) >= 1.
    const auto rq = oracle::oracle_return_quantities(Q, j, Vector::Ones(6));
    CHECK(std::abs(D(j, j) - pi(j) * (pi * rq.tau - 1.0)) < 1e-8);
  }
  Matrix flip(2, 2);
  flip << 0, 1, 1, 0;
  CHECK_THROWS_AS(oracle::oracle_deviation(flip, 100, 1e-12), Error);
}

TEST_CASE("truncation convergence") {
  std::mt19937_64 rng(23);
  const QbdModel model = testing::random_model(rng, 2);
  const RguTriple t = solve_rgu(model);
  const double rate = spectral_radius(t.R);
  const RowVector a = stationary_vector(oracle::truncate(model, 20).P);
  const RowVector b = stationary_vector(oracle::truncate(model, 40).P);
  CHECK((a.head(10) - b.head(10)).cwiseAbs().maxCoeff() < 10.0 * std::pow(rate, 20));
}
