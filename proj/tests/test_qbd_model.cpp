#include "doctest.h"
#include "qbd/error.hpp"
#include "support.hpp"

using namespace qbd;

namespace {

QbdModel scalar(double down, double local, double up) {
  QbdModel m;
  m.A_minus1 = Matrix::Constant(1, 1, down);
  m.A0 = Matrix::Constant(1, 1, local);
  m.A1 = Matrix::Constant(1, 1, up);
  m.B = Matrix::Constant(1, 1, down + local);
  return m;
}

}  // namespace

TEST_CASE("M/M/1 blocks validate and are positive recurrent") {
  const QbdModel mm1 = testing::mm1_model();
  CHECK(std::abs(mm1.A_minus1(0, 0) - 6.0 / 11.0) < 1e-15);
  CHECK(std::abs(mm1.A0(0, 0)) < 1e-15);
  CHECK(std::abs(mm1.A1(0, 0) - 5.0 / 11.0) < 1e-15);
  CHECK(validate(mm1).empty());
  const StabilityReport r = stability(mm1);
  CHECK(std::abs(r.drift - 1.0 / 11.0) < 1e-14);
  CHECK(r.positive_recurrent);
}

TEST_CASE("violations name the block and row") {
  QbdModel bad = testing::mm1_model();
  bad.B(0, 0) = 0.9 - bad.A1(0, 0);
  const auto v = validate(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].block == "B");
  CHECK(v[0].row == 0);
  CHECK(v[0].magnitude == doctest::Approx(0.1));

  std::mt19937_64 rng(1);
  QbdModel neg = testing::random_model(rng, 2);
  neg.A0(0, 1) = -0.01;
  neg.A0(0, 0) += 0.01;
  const auto w = validate(neg);
  REQUIRE(!w.empty());
  CHECK(w[0].block == "A0");
  CHECK(w[0].message == "entry out of [0,1]");
  CHECK_THROWS_AS(require_valid(neg), Error);

  QbdModel shape = testing::mm1_model();
  shape.A1 = Matrix::Zero(2, 2);
  CHECK(validate(shape).size() == 1);

  QbdModel reducible;
  reducible.A_minus1 = Matrix::Identity(2, 2) * 0.5;
  reducible.A0 = Matrix::Identity(2, 2) * 0.3;
  reducible.A1 = Matrix::Identity(2, 2) * 0.2;
  reducible.B = Matrix::Identity(2, 2) * 0.8;
  CHECK(validate(reducible).size() == 1);
}

TEST_CASE("stability classification") {
  const QbdModel swapped = build_qbd(presets::mm1(), 1.0 / 1.2);
  CHECK_FALSE(stability(swapped).positive_recurrent);
  CHECK(stability(swapped).drift < 0.0);
  const StabilityReport null = stability(scalar(0.3, 0.4, 0.3));
  CHECK(std::abs(null.drift) < 1e-15);
  CHECK_FALSE(null.positive_recurrent);
}

TEST_CASE("A(z)") {
  std::mt19937_64 rng(11);
  const QbdModel model = testing::random_model(rng, 3);
  CHECK(((a_of_z(model, 1.0) * Vector::Ones(3)).array() - 1.0).abs().maxCoeff() < 1e-12);
  const QbdModel mm1 = testing::mm1_model();
  CHECK(std::abs(a_of_z(mm1, 1.2)(0, 0) - (6.0 / (11.0 * 1.2) + 5.0 / 11.0 * 1.2)) < 1e-15);
  QbdModel no_up = model;
  no_up.A1.setZero();
  CHECK((a_of_z(no_up, 2.0) - (0.5 * model.A_minus1 + model.A0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(a_of_z(model, 0.0), Error);

  // drift = -sigma'(1)
  for (int t = 0; t < 5; ++t) {
    const QbdModel mdl = testing::random_model(rng, 1 + t % 3);
    const double h = 1e-5;
    const double d = (perron(a_of_z(mdl, 1.0 + h), 1e-15).value -
                      perron(a_of_z(mdl, 1.0 - h), 1e-15).value) /
                     (2.0 * h);
    CHECK(std::abs(stability(mdl).drift + d) < 1e-8);
  }
}
