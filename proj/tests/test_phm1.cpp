#include "doctest.h"
#include "qbd/deviation.hpp"
#include "qbd/error.hpp"
#include "support.hpp"

using namespace qbd;

namespace {

double pi_dot(const StationaryDist& d, const std::vector<Vector>& blocks) {
  double s = 0.0;
  RowVector pn = d.pi0;
  for (const Vector& b : blocks) {
    s += pn * b;
    pn = pn * d.R;
  }
  return s;
}

double L_of(const PhRepresentation& ph, double mu, std::optional<double> gamma = std::nullopt) {
  const QbdModel model = build_qbd(ph, mu, gamma);
  return queue_length(stationary(model, solve_rgu(model)));
}

}  // namespace

TEST_CASE("uniformization of M/M/1") {
  const QbdModel m = build_qbd(presets::mm1(), 1.2, 2.2);
  CHECK(std::abs(m.A_minus1(0, 0) - 6.0 / 11.0) < 1e-15);
  CHECK(std::abs(m.A0(0, 0)) < 1e-15);
  CHECK(std::abs(m.A1(0, 0) - 5.0 / 11.0) < 1e-15);
  CHECK(std::abs(m.B(0, 0) - 6.0 / 11.0) < 1e-15);
  CHECK_THROWS_AS(build_qbd(presets::mm1(), 1.2, 2.0), Error);
  try {
    build_qbd(presets::e2(), 1.2, 1.0);
    FAIL("expected InvalidUniformization");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidUniformization);
  }
  PhRepresentation bad = presets::e2();
  bad.sigma << 0.7, 0.7;
  CHECK_THROWS_AS(build_qbd(bad, 1.2), Error);
  CHECK_THROWS_AS(preset("x"), Error);
}

TEST_CASE("presets have unit mean") {
  for (const char* name : {"mm1", "e2", "h2"}) CHECK(std::abs(preset(name).mean() - 1.0) < 1e-7);
}

TEST_CASE("queue lengths at mu = 1.2") {
  CHECK(std::abs(L_of(presets::mm1(), 1.2) - 5.0) < 1e-8);
  const double e2 = L_of(presets::e2(), 1.2);
  CHECK(e2 >= 3.75);
  CHECK(e2 <= 3.85);
  const double h2 = L_of(presets::h2(), 1.2);
  CHECK(h2 >= 11.05);
  CHECK(h2 <= 11.15);
}

TEST_CASE("uniformization rate does not change L") {
  for (const char* name : {"mm1", "e2", "h2"}) {
    const PhRepresentation ph = preset(name);
    const double g = default_gamma(ph, 1.2);
    CHECK(std::abs(L_of(ph, 1.2, g) - L_of(ph, 1.2, 2 * g)) < 1e-9);
  }
}

TEST_CASE("L against the level sum and the truncated chain") {
  const QbdModel model = build_qbd(presets::h2(), 1.2);
  const StationaryDist d = stationary(model, solve_rgu(model));
  double sum = 0.0;
  RowVector pn = d.pi0;
  for (int n = 1; n < 5000; ++n) {
    pn = pn * d.R;
    sum += n * pn.sum();
  }
  CHECK(std::abs(sum - queue_length(d)) < 1e-8);

  const oracle::FiniteChain chain = oracle::truncate(model, 600);
  const Vector pi = stationary_vector(chain.P).transpose();
  double Lc = 0.0;
  for (int n = 0; n <= 600; ++n) Lc += n * chain.level_block(pi, n).sum();
  CHECK(std::abs(Lc - queue_length(d)) < 1e-6);
}

TEST_CASE("boundary group inverse through the generator") {
  for (const char* name : {"e2", "h2"}) {
    const PhRepresentation ph = preset(name);
    const double gamma = default_gamma(ph, 1.2);
    const QbdModel model = build_qbd(ph, 1.2, gamma);
    const RguTriple t = solve_rgu(model);
    const Matrix lhs = group_inverse(censored_boundary(model, t.G));
    const Matrix rhs = -gamma * kernel_one_group_inverse(ph.S + ph.s() * ph.sigma * t.G);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("sensitivity vector") {
  for (const char* name : {"mm1", "e2", "h2"}) {
    CAPTURE(name);
    const PhRepresentation ph = preset(name);
    const QbdModel model = build_qbd(ph, 1.2);
    const RguTriple t = solve_rgu(model);
    const StationaryDist d = stationary(model, t);
    const SensitivityResult res = sensitivity(ph, 1.2, 20);
    REQUIRE(res.m_blocks.size() == 21);

    // m = L^{-1} D g with g_n = n 1.
    const RewardSpec g = RewardSpec::level(model.m());
    const auto dg = apply_deviation(model, t, d, center(g, res.L), 20);
    for (int n = 0; n <= 20; ++n) {
      CHECK((res.m_blocks[n] - dg[n] / res.L).cwiseAbs().maxCoeff() < 1e-6);
    }

    const SensitivityResult wide = sensitivity(ph, 1.2, 4000);
    CHECK(std::abs(pi_dot(d, wide.m_blocks)) < 1e-8);

    for (Eigen::Index i = 0; i < model.m(); ++i) {
      CHECK(res.m_blocks[0](i) < 0.0);
      int crossing = -1;
      for (int n = 1; n <= 20; ++n) {
        CHECK(res.m_blocks[n](i) > res.m_blocks[n - 1](i));
        if (crossing < 0 && res.m_blocks[n](i) > 0.0) crossing = n;
      }
      CHECK(crossing > res.L);
    }
  }
  const SensitivityResult def = sensitivity(presets::e2(), 1.2);
  CHECK(static_cast<int>(def.m_blocks.size()) == static_cast<int>(std::ceil(4 * def.L)) + 1);
}

TEST_CASE("sweep") {
  std::vector<double> mus;
  for (int i = 0; i < 10; ++i) mus.push_back(1.1 + 0.2 * i);
  const auto mm1 = sweep_rho(presets::mm1(), mus);
  const auto e2 = sweep_rho(presets::e2(), mus);
  const auto h2 = sweep_rho(presets::h2(), mus);
  for (std::size_t i = 0; i < mus.size(); ++i) {
    REQUIRE(mm1[i].ok);
    CHECK(std::abs(mm1[i].rho - 1.0 / mus[i]) < 1e-8);
    CHECK(std::abs(mm1[i].L - mm1[i].rho / (1.0 - mm1[i].rho)) < 1e-8);
    CHECK(h2[i].L > mm1[i].L);
    CHECK(mm1[i].L > e2[i].L);
    if (i > 0) CHECK(mm1[i].L < mm1[i - 1].L);
  }
  const auto bad = sweep_rho(presets::mm1(), {0.9, 1.2});
  CHECK_FALSE(bad[0].ok);
  CHECK_FALSE(bad[0].error.empty());
  CHECK(bad[1].ok);
  CHECK(sweep_rho(presets::mm1(), {1000.0})[0].L < 1e-2);
}
