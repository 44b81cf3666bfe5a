#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qbd/cli.hpp"
#include "qbd/io.hpp"
#include "support.hpp"

using namespace qbd;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qbd");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "qbd_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("phm1 metric L") {
  const Result r = run({"phm1", "--dist", "mm1", "--mu", "1.2", "--metric", "L"});
  CHECK(r.code == 0);
  CHECK(r.out == "5.000000\n");

  // Same through the installed binary.
  FILE* pipe = popen(QBD_CLI_PATH " phm1 --dist mm1 --mu 1.2 --metric L", "r");
  REQUIRE(pipe != nullptr);
  char buf[64] = {0};
  const std::size_t got = fread(buf, 1, sizeof buf - 1, pipe);
  CHECK(pclose(pipe) == 0);
  CHECK(std::string(buf, got) == "5.000000\n");
}

TEST_CASE("validate reports violations with exit 2") {
  const fs::path dir = scratch();
  io::Json bad = io::model_to_json(testing::mm1_model());
  bad["B"][0][0] = 0.9 - 5.0 / 11.0;
  dump(dir / "bad.json", bad.dump());
  const Result r = run({"validate", "--model", (dir / "bad.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("B row 0") != std::string::npos);

  dump(dir / "garbage.json", "{not json");
  CHECK(run({"validate", "--model", (dir / "garbage.json").string()}).code == 2);
  CHECK(run({"validate", "--model", (dir / "missing.json").string()}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"phm1", "--dist", "mm1", "--levels", "0"}).code == 2);
  CHECK(run({"phm1", "--dist", "mm1", "--tol", "0.1"}).code == 2);
  CHECK(run({"phm1", "--dist", "mm1", "--mu", "1.2", "--gamma", "1.0"}).code == 2);
}

TEST_CASE("numerical failures exit 3") {
  const fs::path dir = scratch();
  dump(dir / "unstable.json", io::model_to_json(build_qbd(presets::mm1(), 1.0 / 1.2)).dump());
  const Result r = run({"poisson", "--model", (dir / "unstable.json").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("NotPositiveRecurrent") != std::string::npos);
}

TEST_CASE("sensitivity csv") {
  const fs::path out = scratch() / "m.csv";
  const Result r = run({"sensitivity", "--dist", "h2", "--mu", "1.2", "--levels", "20", "--out", out.string()});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "level,phase,m_value");
  std::vector<std::vector<double>> traces(2);
  while (std::getline(csv, line)) {
    int level = 0, phase = 0;
    double value = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf", &level, &phase, &value) == 3);
    traces[phase].push_back(value);
  }
  for (const auto& t : traces) {
    REQUIRE(t.size() == 21);
    CHECK(t.front() < 0.0);
    for (std::size_t n = 1; n < t.size(); ++n) CHECK(t[n] > t[n - 1]);
  }
}

TEST_CASE("other subcommands") {
  const fs::path dir = scratch();
  dump(dir / "e2.json", io::model_to_json(build_qbd(presets::e2(), 1.2)).dump());
  const std::string model = (dir / "e2.json").string();

  const Result solve = run({"solve", "--model", model});
  CHECK(solve.code == 0);
  const io::Json j = io::Json::parse(solve.out);
  CHECK(j.contains("pi0"));
  CHECK(j.contains("G"));

  const Result fn = run({"solve", "--model", model, "--algo", "functional"});
  CHECK(fn.code == 0);

  const Result p = run({"poisson", "--model", model, "--levels", "5"});
  CHECK(p.code == 0);
  CHECK(p.out.rfind("level,phase,h_value\n", 0) == 0);
  CHECK(run({"poisson", "--model", model, "--normalization", "anchor", "--format", "json"}).code == 0);

  const Result d = run({"deviation", "--model", model, "--levels", "2"});
  CHECK(d.code == 0);
  CHECK(d.out.rfind("n,k,i,j,value\n", 0) == 0);
  CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 1 + 9 * 4);

  const Result dr = run({"drift", "--model", model, "--levels", "50"});
  CHECK(dr.code == 0);
  CHECK(io::Json::parse(dr.out)["passed"].get<bool>());

  const Result sw = run({"sweep", "--dist", "e2", "--mu-list", "1.2,2,4"});
  CHECK(sw.code == 0);
  CHECK(sw.out.rfind("rho,L\n", 0) == 0);

  io::Json q;
  q["dB"] = {{0.0, 0.0}, {0.0, -0.01}};
  q["dA_minus1"] = {{0.0, 0.0}, {0.0, -0.01}};
  q["dA0"] = {{0.0, 0.0}, {0.0, 0.0}};
  q["dA1"] = {{0.0, 0.0}, {0.01, 0.0}};
  dump(dir / "q.json", q.dump());
  const Result pr = run({"perturb", "--model", model, "--perturbation", (dir / "q.json").string()});
  CHECK(pr.code == 0);
  CHECK(io::Json::parse(pr.out)["fd_rel_err"].get<double>() < 1e-4);

  q["dA1"][1][0] = 0.02;
  dump(dir / "q_bad.json", q.dump());
  CHECK(run({"perturb", "--model", model, "--perturbation", (dir / "q_bad.json").string()}).code == 2);

  io::Json g;
  g["explicit"] = {{1.0, 0.0}, {0.0, 2.0}};
  g["tail_c0"] = {0.5, 0.5};
  g["tail_c1"] = {0.0, 0.1};
  dump(dir / "g.json", g.dump());
  CHECK(run({"poisson", "--model", model, "--reward", (dir / "g.json").string()}).code == 0);
}

TEST_CASE("export round trip") {
  const fs::path dir = scratch();
  const fs::path a = dir / "exp_a.json", b = dir / "exp_b.json";
  REQUIRE(run({"export", "--dist", "h2", "--mu", "1.2", "--out", a.string()}).code == 0);
  CHECK(run({"validate", "--model", a.string()}).code == 0);
  const QbdModel direct = build_qbd(presets::h2(), 1.2);
  const QbdModel loaded = io::model_from_json(io::read_json(a.string()));
  CHECK((direct.B.array() == loaded.B.array()).all());
  CHECK((direct.A_minus1.array() == loaded.A_minus1.array()).all());
  CHECK((direct.A0.array() == loaded.A0.array()).all());
  CHECK((direct.A1.array() == loaded.A1.array()).all());

  REQUIRE(run({"export", "--model", a.string(), "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  const Result s1 = run({"poisson", "--model", a.string(), "--levels", "10"});
  const Result s2 = run({"poisson", "--model", b.string(), "--levels", "10"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
}
