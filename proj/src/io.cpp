#include "qbd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbd/error.hpp"

namespace qbd::io {

namespace {

Matrix matrix_from_json(const Json& j, const char* key, ErrorKind kind) {
  auto fail = [&](const std::string& why) {
    throw Error(kind, std::string("field '") + key + "': " + why);
  };
  if (!j.contains(key)) fail("missing");
  const Json& rows = j.at(key);
  if (!rows.is_array() || rows.empty()) fail("expected a nonempty array of arrays");
  const std::size_t cols = rows.front().is_array() ? rows.front().size() : 0;
  if (cols == 0) fail("expected a nonempty array of arrays");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols) fail("ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!rows[r][c].is_number()) fail("non-numeric entry");
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return M;
}

Vector vector_from_json(const Json& j, const std::string& what, ErrorKind kind) {
  if (!j.is_array() || j.empty()) throw Error(kind, what + ": expected a nonempty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(kind, what + ": non-numeric entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::InvalidModel, std::string("field '") + key + "': expected a number");
  }
  return j.at(key).get<double>();
}

}  // namespace

QbdModel model_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidModel, "model file must hold a JSON object");
  QbdModel model;
  model.B = matrix_from_json(j, "B", ErrorKind::InvalidModel);
  model.A_minus1 = matrix_from_json(j, "A_minus1", ErrorKind::InvalidModel);
  model.A0 = matrix_from_json(j, "A0", ErrorKind::InvalidModel);
  model.A1 = matrix_from_json(j, "A1", ErrorKind::InvalidModel);
  if (j.contains("m")) {
    if (!j.at("m").is_number_integer() || j.at("m").get<long>() != model.A0.rows()) {
      throw Error(ErrorKind::InvalidModel, "field 'm' does not match the block size");
    }
  }
  if (j.contains("assume_aperiodic")) model.assume_aperiodic = j.at("assume_aperiodic").get<bool>();
  return model;
}

Json model_to_json(const QbdModel& model) {
  Json j;
  j["m"] = model.m();
  j["B"] = matrix_to_json(model.B);
  j["A_minus1"] = matrix_to_json(model.A_minus1);
  j["A0"] = matrix_to_json(model.A0);
  j["A1"] = matrix_to_json(model.A1);
  if (!model.assume_aperiodic) j["assume_aperiodic"] = false;
  return j;
}

PhSpec ph_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidModel, "PH file must hold a JSON object");
  PhSpec spec;
  if (!j.contains("sigma")) throw Error(ErrorKind::InvalidModel, "field 'sigma': missing");
  spec.ph.sigma = vector_from_json(j.at("sigma"), "sigma", ErrorKind::InvalidModel).transpose();
  spec.ph.S = matrix_from_json(j, "S", ErrorKind::InvalidModel);
  spec.mu = number(j, "mu");
  if (j.contains("gamma")) spec.gamma = number(j, "gamma");
  return spec;
}

RewardSpec reward_from_json(const Json& j, Eigen::Index m) {
  constexpr auto kind = ErrorKind::DomainError;
  if (!j.is_object()) throw Error(kind, "reward file must hold a JSON object");
  RewardSpec g;
  if (j.contains("explicit")) {
    if (!j.at("explicit").is_array()) throw Error(kind, "explicit: expected an array of arrays");
    for (const Json& level : j.at("explicit")) {
      g.explicit_levels.push_back(vector_from_json(level, "explicit", kind));
    }
  }
  g.tail_c0 = j.contains("tail_c0") ? vector_from_json(j.at("tail_c0"), "tail_c0", kind)
                                    : Vector(Vector::Zero(m));
  g.tail_c1 = j.contains("tail_c1") ? vector_from_json(j.at("tail_c1"), "tail_c1", kind)
                                    : Vector(Vector::Zero(m));
  require_valid(g, m);
  return g;
}

PerturbationSpec perturbation_from_json(const Json& j) {
  constexpr auto kind = ErrorKind::InvalidPerturbation;
  if (!j.is_object()) throw Error(kind, "perturbation file must hold a JSON object");
  PerturbationSpec Q;
  Q.dB = matrix_from_json(j, "dB", kind);
  Q.dA_minus1 = matrix_from_json(j, "dA_minus1", kind);
  Q.dA0 = matrix_from_json(j, "dA0", kind);
  Q.dA1 = matrix_from_json(j, "dA1", kind);
  return Q;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidModel, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidModel, "'" + path + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::DomainError, "cannot write '" + path + "'");
  out << text;
}

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::Ref<const Vector>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string level_phase_csv(const std::vector<Vector>& blocks, const char* column) {
  std::ostringstream os;
  os << "level,phase," << column << "\n";
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    for (Eigen::Index i = 0; i < blocks[n].size(); ++i) {
      os << n << ',' << i << ',' << format_double(blocks[n](i)) << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::string sensitivity_csv(const std::vector<Vector>& m_blocks) {
  return level_phase_csv(m_blocks, "m_value");
}

std::string poisson_csv(const std::vector<Vector>& h) { return level_phase_csv(h, "h_value"); }

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "rho,L\n";
  for (const SweepRow& row : rows) {
    os << format_double(row.rho) << ',' << (row.ok ? format_double(row.L) : std::string("nan")) << "\n";
  }
  return os.str();
}

std::string deviation_csv(const std::vector<std::vector<Matrix>>& window) {
  std::ostringstream os;
  os << "n,k,i,j,value\n";
  for (std::size_t n = 0; n < window.size(); ++n) {
    for (std::size_t k = 0; k < window[n].size(); ++k) {
      const Matrix& D = window[n][k];
      for (Eigen::Index i = 0; i < D.rows(); ++i) {
        for (Eigen::Index j = 0; j < D.cols(); ++j) {
          os << n << ',' << k << ',' << i << ',' << j << ',' << format_double(D(i, j)) << "\n";
        }
      }
    }
  }
  return os.str();
}

}  // namespace qbd::io
