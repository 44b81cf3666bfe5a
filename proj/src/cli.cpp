#include "qbd/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qbd/deviation.hpp"
#include "qbd/ergodicity.hpp"
#include "qbd/error.hpp"
#include "qbd/io.hpp"
#include "qbd/perturb.hpp"
#include "qbd/phm1.hpp"

namespace qbd::cli {

namespace {

using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Context {
  const RunConfig& config;
  std::ostream& out;
  std::ostream& err;

  void emit(const std::string& text) const {
    if (config.out_path.empty()) {
      out << text;
    } else {
      io::write_text(config.out_path, text);
    }
  }
  void emit(const Json& j) const { emit(j.dump(2) + "\n"); }
};

QbdModel load_model(const RunConfig& config) {
  if (config.model_path.empty()) throw Error(ErrorKind::InvalidModel, "--model is required");
  return io::model_from_json(io::read_json(config.model_path));
}

QbdModel load_valid_model(const RunConfig& config) {
  QbdModel model = load_model(config);
  require_valid(model);
  return model;
}

RewardSpec load_reward(const RunConfig& config, Eigen::Index m) {
  if (config.reward_path.empty()) return RewardSpec::level(m);
  return io::reward_from_json(io::read_json(config.reward_path), m);
}

io::PhSpec load_ph(const RunConfig& config) {
  io::PhSpec spec;
  if (!config.ph_path.empty()) {
    spec = io::ph_from_json(io::read_json(config.ph_path));
  } else {
    spec.ph = preset(config.dist);
    spec.mu = config.mu;
  }
  if (config.gamma) spec.gamma = config.gamma;
  return spec;
}

Json levels_json(const std::vector<Vector>& blocks) {
  Json arr = Json::array();
  for (const Vector& v : blocks) arr.push_back(io::vector_to_json(v));
  return arr;
}

int cmd_validate(const Context& ctx) {
  const QbdModel model = load_model(ctx.config);
  const auto violations = validate(model);
  if (violations.empty()) {
    const StabilityReport report = stability(model);
    ctx.out << "valid: m = " << model.m() << ", drift = " << io::format_double(report.drift)
            << (report.positive_recurrent ? " (positive recurrent)" : " (not positive recurrent)")
            << "\n";
    return kExitOk;
  }
  for (const Violation& v : violations) ctx.err << describe(v) << "\n";
  return kExitValidation;
}

int cmd_solve(const Context& ctx) {
  const QbdModel model = load_valid_model(ctx.config);
  const RguTriple rgu = solve_rgu(model, ctx.config.tol, ctx.config.algorithm);
  const StationaryDist dist = stationary(model, rgu);
  Json j;
  j["pi0"] = io::vector_to_json(dist.pi0.transpose());
  j["R"] = io::matrix_to_json(rgu.R);
  j["G"] = io::matrix_to_json(rgu.G);
  j["U"] = io::matrix_to_json(rgu.U);
  j["iterations"] = rgu.iterations;
  j["g_residual"] = rgu.residual;
  j["drift"] = stability(model).drift;
  ctx.emit(j);
  return kExitOk;
}

int cmd_poisson(const Context& ctx) {
  const QbdModel model = load_valid_model(ctx.config);
  const RewardSpec g = load_reward(ctx.config, model.m());
  const RguTriple rgu = solve_rgu(model, ctx.config.tol, ctx.config.algorithm);
  const StationaryDist dist = stationary(model, rgu);
  const PoissonSolution sol =
      solve_poisson(model, rgu, dist, g, ctx.config.levels, ctx.config.normalization, ctx.config.tol);
  if (ctx.config.format == OutputFormat::Json) {
    Json j;
    j["omega"] = sol.omega;
    j["constant"] = sol.constant;
    j["residual"] = sol.residual;
    j["normalization"] = ctx.config.normalization == Normalization::PiZero ? "pi" : "anchor";
    j["h"] = levels_json(sol.h);
    ctx.emit(j);
  } else {
    ctx.emit(io::poisson_csv(sol.h));
  }
  return kExitOk;
}

int cmd_deviation(const Context& ctx) {
  const QbdModel model = load_valid_model(ctx.config);
  const RguTriple rgu = solve_rgu(model, ctx.config.tol, ctx.config.algorithm);
  const StationaryDist dist = stationary(model, rgu);
  const DeviationBlocks D(model, rgu, dist, ctx.config.tol);
  const auto window = D.window(ctx.config.levels);
  if (ctx.config.format == OutputFormat::Json) {
    Json blocks = Json::array();
    for (std::size_t n = 0; n < window.size(); ++n) {
      for (std::size_t k = 0; k < window[n].size(); ++k) {
        blocks.push_back({{"n", n}, {"k", k}, {"block", io::matrix_to_json(window[n][k])}});
      }
    }
    ctx.emit(Json{{"blocks", blocks}});
  } else {
    ctx.emit(io::deviation_csv(window));
  }
  return kExitOk;
}

int cmd_drift(const Context& ctx) {
  const QbdModel model = load_valid_model(ctx.config);
  const DriftCertificate cert = drift_certificate(model, ctx.config.tol);
  const DriftReport report = verify_drift(model, cert, ctx.config.levels);
  Json j;
  j["z0"] = cert.z0;
  j["lambda0"] = cert.lambda0;
  j["u"] = io::vector_to_json(cert.u);
  j["b"] = cert.b;
  j["small_set_level"] = cert.small_set_level;
  j["verified_levels"] = ctx.config.levels;
  j["passed"] = report.passed;
  j["max_interior_rel_defect"] = report.max_interior_rel_defect;
  if (!report.passed) j["first_failure_level"] = report.first_failure_level;
  ctx.emit(j);
  if (!report.passed) {
    ctx.err << "drift condition fails at level " << report.first_failure_level << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_perturb(const Context& ctx) {
  const QbdModel model = load_valid_model(ctx.config);
  if (ctx.config.perturbation_path.empty()) {
    throw Error(ErrorKind::InvalidPerturbation, "--perturbation is required");
  }
  const PerturbationSpec Q = io::perturbation_from_json(io::read_json(ctx.config.perturbation_path));
  require_valid(Q, model.m());
  const RewardSpec g = load_reward(ctx.config, model.m());
  const RguTriple rgu = solve_rgu(model, ctx.config.tol, ctx.config.algorithm);
  const StationaryDist dist = stationary(model, rgu);
  const DriftCertificate cert = drift_certificate(model);

  Json j;
  j["omega"] = omega(dist, g);
  j["derivative"] = omega_derivative_1(model, rgu, dist, Q, g, ctx.config.tol);
  j["admissible_delta"] = admissible_delta(model, cert, Q);
  if (ctx.config.order > 1) {
    j["order"] = ctx.config.order;
    j["series"] = derivative_series(model, Q, g, ctx.config.order, std::max(ctx.config.levels, 50));
  }
  const FdCheck fd = fd_check(model, Q, g, ctx.config.delta);
  j["fd_estimate"] = fd.fd_estimate;
  j["fd_rel_err"] = fd.rel_err;
  ctx.emit(j);
  return kExitOk;
}

int cmd_phm1(const Context& ctx) {
  const io::PhSpec spec = load_ph(ctx.config);
  const QbdModel model = build_qbd(spec.ph, spec.mu, spec.gamma);
  const RguTriple rgu = solve_rgu(model, ctx.config.tol, ctx.config.algorithm);
  const double L = queue_length(stationary(model, rgu));
  const double rho = 1.0 / (spec.mu * spec.ph.mean());
  char buf[64];
  if (ctx.config.metric == "L") {
    std::snprintf(buf, sizeof buf, "%.6f\n", L);
  } else if (ctx.config.metric == "rho") {
    std::snprintf(buf, sizeof buf, "%.6f\n", rho);
  } else if (ctx.config.metric == "all") {
    std::snprintf(buf, sizeof buf, "rho=%.6f L=%.6f\n", rho, L);
  } else {
    throw Error(ErrorKind::DomainError, "--metric must be L, rho or all");
  }
  ctx.emit(std::string(buf));
  return kExitOk;
}

int cmd_sensitivity(const Context& ctx) {
  const io::PhSpec spec = load_ph(ctx.config);
  const SensitivityResult res = sensitivity(spec.ph, spec.mu, ctx.config.levels, spec.gamma);
  if (ctx.config.format == OutputFormat::Json) {
    ctx.emit(Json{{"L", res.L}, {"c0", res.c0}, {"m", levels_json(res.m_blocks)}});
  } else {
    ctx.emit(io::sensitivity_csv(res.m_blocks));
  }
  return kExitOk;
}

int cmd_sweep(const Context& ctx) {
  const io::PhSpec spec = load_ph(ctx.config);
  if (ctx.config.mu_list.empty()) throw Error(ErrorKind::DomainError, "--mu-list is required");
  const auto rows = sweep_rho(spec.ph, ctx.config.mu_list);
  for (const SweepRow& row : rows) {
    if (!row.ok) ctx.err << "mu = " << row.mu << ": " << row.error << "\n";
  }
  if (ctx.config.format == OutputFormat::Json) {
    Json arr = Json::array();
    for (const SweepRow& row : rows) {
      Json r{{"mu", row.mu}, {"rho", row.rho}, {"ok", row.ok}};
      if (row.ok) r["L"] = row.L;
      arr.push_back(r);
    }
    ctx.emit(Json{{"rows", arr}});
  } else {
    ctx.emit(io::sweep_csv(rows));
  }
  return kExitOk;
}

int cmd_export(const Context& ctx) {
  QbdModel model;
  if (!ctx.config.model_path.empty()) {
    model = load_valid_model(ctx.config);
  } else {
    const io::PhSpec spec = load_ph(ctx.config);
    model = build_qbd(spec.ph, spec.mu, spec.gamma);
  }
  ctx.emit(io::model_to_json(model));
  return kExitOk;
}

}  // namespace

void require_valid(const RunConfig& config) {
  if (config.levels < 1) throw Error(ErrorKind::DomainError, "--levels must be at least 1");
  if (!(config.tol > 0.0 && config.tol <= 1e-3)) {
    throw Error(ErrorKind::DomainError, "--tol must lie in (0, 1e-3]");
  }
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson equation, deviation matrix and sensitivity tools for QBD chains", "qbd"};
  app.require_subcommand(1);
  RunConfig config;
  std::string format = "csv";
  std::string normalization = "pi";
  std::string algo = "logred";
  double gamma = 0.0;
  std::string mu_list;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--levels", config.levels, "Number of levels N");
    sub->add_option("--tol", config.tol, "Tolerance");
    sub->add_option("--out", config.out_path, "Output file (default: standard output)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--algo", algo, "logred or functional")
        ->check(CLI::IsMember({"logred", "functional"}));
  };
  auto add_model = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--model", config.model_path, "Model JSON file");
    if (required) opt->required();
  };
  auto add_ph = [&](CLI::App* sub) {
    sub->add_option("--dist", config.dist, "Preset inter-arrival law: mm1, e2 or h2");
    sub->add_option("--ph", config.ph_path, "PH/M/1 JSON file (sigma, S, mu, gamma)");
    sub->add_option("--mu", config.mu, "Service rate");
    sub->add_option("--gamma", gamma, "Uniformization rate");
  };

  struct Entry {
    CLI::App* app;
    int (*fn)(const Context&);
  };
  std::vector<Entry> entries;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Context&)) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s);
    entries.push_back({s, fn});
    return s;
  };

  add_model(sub("validate", "Check a model file", cmd_validate), true);
  add_model(sub("solve", "pi0, R, G and U", cmd_solve), true);
  {
    auto* s = sub("poisson", "Poisson solution h", cmd_poisson);
    add_model(s, true);
    s->add_option("--reward", config.reward_path, "Reward JSON file (default g_n = n)");
    s->add_option("--normalization", normalization, "pi or anchor")
        ->check(CLI::IsMember({"pi", "anchor"}));
  }
  add_model(sub("deviation", "Deviation matrix blocks on levels 0..N", cmd_deviation), true);
  add_model(sub("drift", "Geometric drift certificate", cmd_drift), true);
  {
    auto* s = sub("perturb", "Derivatives of the stationary reward", cmd_perturb);
    add_model(s, true);
    s->add_option("--perturbation", config.perturbation_path, "Perturbation JSON file")->required();
    s->add_option("--reward", config.reward_path, "Reward JSON file (default g_n = n)");
    s->add_option("--delta", config.delta, "Finite difference step");
    s->add_option("--order", config.order, "Also evaluate the derivative of this order");
  }
  {
    auto* s = sub("phm1", "PH/M/1 queue metrics", cmd_phm1);
    add_ph(s);
    s->add_option("--metric", config.metric, "L, rho or all");
  }
  add_ph(sub("sensitivity", "PH/M/1 sensitivity vector m", cmd_sensitivity));
  {
    auto* s = sub("sweep", "PH/M/1 queue length over service rates", cmd_sweep);
    add_ph(s);
    s->add_option("--mu-list", mu_list, "Comma separated service rates")->required();
  }
  {
    auto* s = sub("export", "Write a model file", cmd_export);
    add_model(s, false);
    add_ph(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (CLI::Option* opt = app.get_subcommands().front()->get_option_no_throw("--gamma");
      opt != nullptr && !opt->empty()) {
    config.gamma = gamma;
  }
  config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  config.normalization = normalization == "anchor" ? Normalization::Anchor : Normalization::PiZero;
  config.algorithm = algo == "functional" ? GAlgorithm::Functional : GAlgorithm::LogReduction;

  try {
    std::stringstream ss(mu_list);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) config.mu_list.push_back(std::stod(item));
    }
  } catch (const std::exception&) {
    err << "error: --mu-list must be comma separated numbers\n";
    return kExitValidation;
  }

  for (const Entry& entry : entries) {
    if (!entry.app->parsed()) continue;
    config.command = entry.app->get_name();
    try {
      require_valid(config);
      return entry.fn(Context{config, out, err});
    } catch (const Error& e) {
      err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
      return is_validation_error(e.kind()) ? kExitValidation : kExitNumeric;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitNumeric;
    }
  }
  return kExitValidation;
}

}  // namespace qbd::cli
