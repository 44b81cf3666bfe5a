#include "qbd/qbd_model.hpp"

#include <cmath>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd {

namespace {

constexpr double kEntryTol = 1e-12;

void check_entries(const Matrix& M, const char* name, std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double a = M(i, j);
      if (!std::isfinite(a)) {
        out.push_back({name, i, j, std::abs(a), "entry is not finite"});
      } else if (a < -kEntryTol || a > 1.0 + kEntryTol) {
        const double defect = a < 0.0 ? -a : a - 1.0;
        out.push_back({name, i, j, defect, "entry out of [0,1]"});
      }
    }
  }
}

void check_row_sums(const Matrix& sum, const char* name, const char* what,
                    std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < sum.rows(); ++i) {
    const double s = sum.row(i).sum();
    if (!(std::abs(s - 1.0) <= kStochasticTol)) {
      std::ostringstream os;
      os << "row sum of " << what << " is " << s;
      out.push_back({name, i, -1, std::abs(s - 1.0), os.str()});
    }
  }
}

}  // namespace

std::string describe(const Violation& v) {
  std::ostringstream os;
  os << v.block;
  if (v.row >= 0) os << " row " << v.row;
  if (v.col >= 0) os << " col " << v.col;
  os << ": " << v.message << " (defect " << v.magnitude << ")";
  return os.str();
}

std::vector<Violation> validate(const QbdModel& model) {
  std::vector<Violation> out;
  const Eigen::Index m = model.A0.rows();
  const std::pair<const Matrix*, const char*> blocks[] = {
      {&model.B, "B"}, {&model.A_minus1, "A_minus1"}, {&model.A0, "A0"}, {&model.A1, "A1"}};
  for (const auto& [M, name] : blocks) {
    if (m == 0 || M->rows() != m || M->cols() != m) {
      std::ostringstream os;
      os << "shape " << M->rows() << "x" << M->cols() << ", expected " << m << "x" << m;
      out.push_back({name, -1, -1, 0.0, m == 0 ? "empty block" : os.str()});
    }
  }
  if (!out.empty()) return out;

  for (const auto& [M, name] : blocks) check_entries(*M, name, out);
  check_row_sums(model.B + model.A1, "B", "B + A1", out);
  check_row_sums(model.A(), "A", "A-1 + A0 + A1", out);
  if (!is_irreducible(model.A())) {
    out.push_back({"A", -1, -1, 0.0, "A = A-1 + A0 + A1 is reducible"});
  }
  return out;
}

void require_valid(const QbdModel& model) {
  const auto violations = validate(model);
  if (!violations.empty()) {
    std::ostringstream os;
    os << violations.size() << " violation(s); first: " << describe(violations.front());
    throw Error(ErrorKind::InvalidModel, os.str());
  }
}

StabilityReport stability(const QbdModel& model) {
  StabilityReport report;
  report.mu = stationary_vector(model.A());
  report.drift = report.mu * ((model.A_minus1 - model.A1) * Vector::Ones(model.m()));
  report.positive_recurrent = report.drift > kNullDriftTol;
  return report;
}

Matrix a_of_z(const QbdModel& model, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << "a_of_z: z must be positive and finite, got " << z;
    throw Error(ErrorKind::DomainError, os.str());
  }
  return model.A_minus1 / z + model.A0 + z * model.A1;
}

}  // namespace qbd
