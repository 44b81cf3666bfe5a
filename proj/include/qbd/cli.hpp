#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qbd/poisson.hpp"
#include "qbd/rgu.hpp"

namespace qbd::cli {

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string command;
  std::string model_path;
  int levels = 20;
  double tol = kDefaultTol;
  OutputFormat format = OutputFormat::Csv;
  std::string out_path;  // empty: standard output
  Normalization normalization = Normalization::PiZero;
  std::optional<double> gamma;
  std::string perturbation_path;
  std::string reward_path;
  GAlgorithm algorithm = GAlgorithm::LogReduction;
  std::string dist = "mm1";
  std::string ph_path;
  double mu = 1.2;
  std::string metric = "L";
  std::vector<double> mu_list;
  double delta = 1e-5;
  int order = 1;
};

/// Throws DomainError when N < 1 or tol is outside (0, 1e-3].
void require_valid(const RunConfig& config);

/// Exit codes: 0 success, 2 validation error, 3 numerical failure.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qbd::cli
