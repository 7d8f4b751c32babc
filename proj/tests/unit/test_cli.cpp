#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbbm/cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* base = std::getenv("KBBM_TEST_TMP");
  fs::path dir = (base && *base ? fs::path(base) : fs::temp_directory_path() / "kbbm_cli_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "kbbm");
  std::ostringstream out, err;
  const int code = kbbm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json manifest(const fs::path& dir, const std::string& sub) {
  return nlohmann::json::parse(slurp(dir / (sub + ".manifest.json")));
}

}  // namespace

TEST_CASE("closed-form prints the reflection-principle probability") {
  const fs::path dir = scratch("closed_form");
  const Run r = run({"closed-form", "--x", "1", "--t", "1", "--theta", "0", "--interval", "0,inf", "--output-dir", dir});
  CHECK(r.code == 0);
  CHECK(r.out == "0.6826894921\n");
  const auto m = manifest(dir, "closed-form");
  CHECK(m["subcommand"] == "closed-form");
  CHECK(m["config"]["interval"] == "0,inf");
  CHECK(m["partial"] == false);
}

TEST_CASE("validate-expansion at expectation level succeeds with a decreasing residual column") {
  const fs::path dir = scratch("validate");
  const Run r = run({"validate-expansion", "--mode", "expectation", "--m", "0", "--theta", "1", "--x", "1",
                     "--interval", "0,inf", "--t-grid", "5,10,20,40", "--output-dir", dir});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "validate-expansion.report.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,observed,predicted,residual,residual_tm");
  double prev = 1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const double residual = std::abs(std::stod(cells.at(3)));
    CHECK(residual < prev);
    prev = residual;
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(fs::exists(dir / "validate-expansion.report.json"));
}

TEST_CASE("simulate output is byte-identical across reruns and thread counts") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  const std::vector<std::string> common{"simulate", "--seed", "42", "--theta", "0", "--x", "3", "--times", "1,5,10"};
  auto with = [&](const fs::path& dir, const std::string& threads) {
    std::vector<std::string> args = common;
    args.insert(args.end(), {"--threads", threads, "--output-dir", dir.string()});
    return run(args);
  };
  REQUIRE(with(a, "1").code == 0);
  REQUIRE(with(b, "1").code == 0);
  REQUIRE(with(c, "8").code == 0);
  const std::string first = slurp(a / "simulate.snapshots.csv");
  CHECK(first.rfind("time,particle_index,position\n", 0) == 0);
  CHECK(first == slurp(b / "simulate.snapshots.csv"));
  CHECK(first == slurp(c / "simulate.snapshots.csv"));
}

TEST_CASE("config file values sit between defaults and flags") {
  const fs::path dir = scratch("config");
  {
    std::ofstream f(dir / "run.conf");
    f << "# closed-form settings\n"
      << "theta = 0.5\n"
      << "t = 2\n"
      << "interval = 1,inf\n";
  }
  const std::string conf = (dir / "run.conf").string();
  const Run from_file = run({"closed-form", "--config", conf, "--output-dir", dir.string()});
  REQUIRE(from_file.code == 0);
  auto m = manifest(dir, "closed-form");
  CHECK(m["config"]["theta"] == "0.5");
  CHECK(m["config"]["t"] == "2");
  CHECK(m["config"]["x"] == "1");
  CHECK(m["config_file"] == conf);

  const Run overridden = run({"closed-form", "--config", conf, "--theta", "0", "--output-dir", dir.string()});
  REQUIRE(overridden.code == 0);
  m = manifest(dir, "closed-form");
  CHECK(m["config"]["theta"] == "0");
  CHECK(m["config"]["interval"] == "1,inf");
  CHECK(overridden.out != from_file.out);

  // flag before --config still wins
  const Run early = run({"closed-form", "--theta", "0", "--config", conf, "--output-dir", dir.string()});
  CHECK(early.out == overridden.out);
}

TEST_CASE("usage errors exit with 1") {
  const fs::path dir = scratch("errors");
  CHECK(run({}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"closed-form", "--bogus", "1", "--output-dir", dir.string()}).code == 1);
  CHECK(run({"closed-form", "--interval", "2,1", "--output-dir", dir.string()}).code == 1);
  CHECK(run({"closed-form", "--config", (dir / "missing.conf").string()}).code == 1);
  {
    std::ofstream f(dir / "bad.conf");
    f << "nonsense_key = 3\n";
  }
  CHECK(run({"closed-form", "--config", (dir / "bad.conf").string(), "--output-dir", dir.string()}).code == 1);
  {
    std::ofstream f(dir / "sections.conf");
    f << "[closed-form]\ntheta = 1\n";
  }
  CHECK(run({"closed-form", "--config", (dir / "sections.conf").string(), "--output-dir", dir.string()}).code == 1);
  const Run mismatch = run({"validate-expansion", "--theta", "0", "--interval", "1,inf", "--regime", "drifted",
                            "--output-dir", dir.string()});
  CHECK(mismatch.code == 1);
  CHECK(mismatch.err.find("regime") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("a failed verdict exits with 2") {
  const fs::path dir = scratch("verdict");
  CHECK(run({"kesten-rate", "--theta", "1", "--output-dir", dir.string()}).code == 0);
  const Run strict = run({"kesten-rate", "--theta", "1", "--constant-tolerance", "1e-12", "--output-dir", dir.string()});
  CHECK(strict.code == 2);
  CHECK(manifest(dir, "kesten-rate")["exit_code"] == 2);
}

TEST_CASE("cap exceedance exits with 1 and flags partial outputs") {
  const fs::path dir = scratch("cap");
  const Run r = run({"simulate", "--theta", "0", "--x", "5", "--times", "1,2,12", "--max-population", "500", "--seed",
                     "9", "--output-dir", dir.string()});
  CHECK(r.code == 1);
  const auto m = manifest(dir, "simulate");
  CHECK(m["partial"] == true);
  CHECK(fs::exists(dir / "simulate.snapshots.csv"));
  CHECK_FALSE(fs::exists(dir / "simulate.snapshots.csv.tmp"));

  const Run cons = run({"check-martingale", "--mode", "conservation", "--x", "5", "--times", "12", "--replicates", "4",
                        "--max-population", "100", "--output-dir", dir.string()});
  CHECK(cons.code == 1);
  CHECK(manifest(dir, "check-martingale")["partial"] == true);
}

TEST_CASE("remaining subcommands produce their outputs") {
  const fs::path dir = scratch("misc");
  const Run series = run({"check-martingale", "--theta", "0.5", "--horizon", "4", "--seed", "3", "--output-dir", dir.string()});
  CHECK(series.code == 0);
  CHECK(slurp(dir / "check-martingale.series.csv").rfind("k,theta,r_n,value\n", 0) == 0);

  const Run cons = run({"check-martingale", "--mode", "conservation", "--theta", "0.5", "--times", "1,2",
                        "--replicates", "2000", "--threads", "4", "--output-dir", dir.string()});
  CHECK(cons.code == 0);

  const Run spine = run({"spine-estimate", "--functional", "indicator", "--t", "1", "--replicates", "20000",
                         "--output-dir", dir.string()});
  CHECK(spine.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "spine-estimate.json"));
  CHECK(j["z"].get<double>() < 4.0);

  const Run fit = run({"spine-estimate", "--functional", "bessel3-fit", "--t", "1", "--replicates", "20000",
                       "--output-dir", dir.string()});
  CHECK(fit.code == 0);

  const Run path = run({"validate-expansion", "--mode", "pathwise", "--theta", "1", "--horizon", "5", "--replicates",
                        "6", "--threads", "3", "--output-dir", dir.string()});
  CHECK((path.code == 0 || path.code == 2));
  CHECK(fs::exists(dir / "validate-expansion.replicates.csv"));
}

TEST_CASE("default output directory comes from the environment") {
  const char* old = std::getenv("KBBM_OUTPUT_DIR");
  const std::string saved = old ? old : "";
  setenv("KBBM_OUTPUT_DIR", "/tmp/somewhere", 1);
  CHECK(kbbm::cli::default_output_dir() == "/tmp/somewhere");
  unsetenv("KBBM_OUTPUT_DIR");
  CHECK(kbbm::cli::default_output_dir() == "kbbm-out");
  if (old) setenv("KBBM_OUTPUT_DIR", saved.c_str(), 1);
}
