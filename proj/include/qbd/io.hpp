#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qbd/perturb.hpp"
#include "qbd/phm1.hpp"

namespace qbd::io {

using Json = nlohmann::json;

// Parse failures throw InvalidModel (or InvalidPerturbation for perturbations).

QbdModel model_from_json(const Json& j);
Json model_to_json(const QbdModel& model);

struct PhSpec {
  PhRepresentation ph;
  double mu = 0.0;
  std::optional<double> gamma;
};
PhSpec ph_from_json(const Json& j);

RewardSpec reward_from_json(const Json& j, Eigen::Index m);
PerturbationSpec perturbation_from_json(const Json& j);

Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

Json matrix_to_json(const Matrix& M);
Json vector_to_json(const Eigen::Ref<const Vector>& v);

/// %.17g
std::string format_double(double x);

std::string sensitivity_csv(const std::vector<Vector>& m_blocks);
std::string poisson_csv(const std::vector<Vector>& h);
std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Window indexed [n][k].
std::string deviation_csv(const std::vector<std::vector<Matrix>>& window);

}  // namespace qbd::io
