#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "optomode/errors.hpp"
#include "optomode_cli/commands.hpp"
#include "optomode_cli/config.hpp"

using namespace optomode;
using namespace optomode::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"optomode"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("optomode_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines_starting(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream good(
      "seed = 42\n[model]\ncoupling = 0.8\n[modulation]\ndepths = 0, 0.25\nphase = auto\n"
      "[output]\nchain = ladder\n");
  const ScenarioConfig cfg = parse_config(good);
  REQUIRE(cfg.dimensionless.has_value());
  CHECK(cfg.dimensionless->coupling == 0.8);
  CHECK(cfg.dimensionless->optical_damping == 0.1);
  CHECK(cfg.depth_fractions == std::vector<double>{0.0, 0.25});
  CHECK_FALSE(cfg.phase.has_value());
  CHECK(cfg.seed == 42);
  CHECK(cfg.chain == "ladder");

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("[model]\ncoupling = 0.8\nbogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[unknown]\nx = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[modulation]\ndepths = 0, 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse("[modulation]\ndepths = \n"), ValidationError);
  CHECK_THROWS_AS(parse("[model]\ncoupling = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse("[model]\ncoupling = 0.8\n[detector]\npreset = aLIGO\n"), ValidationError);
  CHECK_THROWS_AS(parse("[output]\nchain = other\n"), ValidationError);
  CHECK_THROWS_AS(parse("this is not ini\n"), ValidationError);
  CHECK(parse_number_list(" 0.1,0.2 , 0.3") == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("modes command") {
  const Result ok = run({"modes"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("verdict: STABLE") != std::string::npos);
  CHECK(ok.out.find("m_c = 0.0154696481509") != std::string::npos);

  const fs::path dir = scratch("modes");
  const std::string cfg = write_file(dir / "unstable.ini", "[model]\nfeedback = 0\n");
  const Result bad = run({"modes", "--config", cfg, "--out", (dir / "out").string()});
  CHECK(bad.code == kExitOk);
  CHECK(bad.out.find("verdict: UNSTABLE") != std::string::npos);
  const std::string csv = slurp(dir / "out" / "modes.csv");
  CHECK(csv.find("# model = A 0.9, g 0.1, alpha 0, kappa 1") != std::string::npos);

  const std::string broken = write_file(dir / "broken.ini", "[model]\ncoupling = -3\n");
  CHECK(run({"modes", "--config", broken}).code == kExitValidation);
  CHECK(run({"modes", "--no-such-flag"}).code == kExitValidation);
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("spectrum command writes a file pair per depth") {
  const fs::path dir = scratch("spectrum");
  const Result r = run({"spectrum", "--depths", "0,0.5,0.9", "--out", dir.string(), "--plot",
                        "--seed", "99"});
  REQUIRE(r.code == kExitOk);
  for (const char* tag : {"00", "01", "02"}) {
    const std::string out = slurp(dir / (std::string("spectrum_") + tag + ".csv"));
    const std::string in = slurp(dir / (std::string("internal_") + tag + ".csv"));
    CHECK(out.find("x,S_A_plus,S_A_minus,S_unmod") != std::string::npos);
    CHECK(in.find("x,S_G_plus,S_G_minus,S_G_unmod") != std::string::npos);
    CHECK(out.find("# seed = 99") != std::string::npos);
    CHECK(out.find("# modulation.depths (fraction of m_c) = 0, 0.5, 0.9") != std::string::npos);
    CHECK(count_lines_starting(out, "-") + count_lines_starting(out, "0") +
              count_lines_starting(out, "1") + count_lines_starting(out, "2") >= 2001);
  }
  CHECK(fs::exists(dir / "spectrum.svg"));
  CHECK(slurp(dir / "spectrum.svg").find("<svg") == 0);
}

TEST_CASE("spectrum command refuses depths at or above threshold and empty lists") {
  const fs::path dir = scratch("threshold");
  const Result at = run({"spectrum", "--depths", "1", "--out", dir.string()});
  CHECK(at.code == kExitNumerical);
  CHECK(at.err.find("threshold") != std::string::npos);

  const std::string above = write_file(dir / "abs.ini", "[modulation]\ndepths_absolute = 0.02\n");
  CHECK(run({"spectrum", "--config", above, "--out", dir.string()}).code == kExitNumerical);
  CHECK(run({"spectrum", "--depths", "1.5"}).code == kExitValidation);
  CHECK(run({"spectrum", "--depths", ","}).code == kExitValidation);
  CHECK(run({"spectrum", "--thermal"}).code == kExitValidation);
}

TEST_CASE("spectrum command with a preset and thermal noise") {
  const fs::path dir = scratch("thermal");
  const Result r = run({"spectrum", "--preset", "aLIGO", "--thermal", "--depths", "0.5", "--chain",
                        "ladder", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  const std::string csv = slurp(dir / "spectrum_00.csv");
  CHECK(csv.find("# detector.preset = aLIGO") != std::string::npos);
  CHECK(csv.find("# noise.thermal = true") != std::string::npos);
  CHECK(csv.find("ladder chain") != std::string::npos);

  const std::string model = write_file(dir / "model.ini", "[model]\ncoupling = 0.9\n");
  CHECK(run({"spectrum", "--config", model, "--preset", "aLIGO"}).code == kExitValidation);
}

TEST_CASE("xi command") {
  const Result all = run({"xi"});
  REQUIRE(all.code == kExitOk);
  for (const char* name : {"aLIGO", "ET", "GP", "AEI", "Gingin"}) {
    CHECK(count_lines_starting(all.out, name) == 1);
  }
  const Result one = run({"xi", "--preset", "ET"});
  CHECK(one.code == kExitOk);
  CHECK(count_lines_starting(one.out, "ET") == 1);
  CHECK(count_lines_starting(one.out, "aLIGO") == 0);
  CHECK(run({"xi", "--preset", "LIGO-India"}).code == kExitValidation);

  const fs::path dir = scratch("xi");
  const std::string presets = write_file(
      dir / "mine.ini",
      "[preset:Bench]\narm_length = 1\nreduced_mass = 0.01\nbeam_radius = 0.002\npower_kw = 1\n");
  const Result custom = run({"xi", "--preset-file", presets});
  CHECK(custom.code == kExitOk);
  std::istringstream lines(custom.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.rfind("Bench", 0) == 0);
  std::istringstream fields(row);
  std::string name, xi, ref, dev;
  fields >> name >> xi >> ref >> dev;
  CHECK(ref == "-");
  CHECK(dev == "-");
}

TEST_CASE("oracle command exit codes and seed echo") {
  const fs::path dir = scratch("oracle");
  const std::string cfg = write_file(
      dir / "small.ini",
      "seed = 5\n[modulation]\ndepths = 0.7\n[oracle]\nruns = 4\nsteps = 131072\nringdown = false\n");
  const Result bad = run({"oracle", "--config", cfg, "--corrupt-epsilon"});
  CHECK(bad.code == kExitOracleFail);
  CHECK(bad.out.find("seed = 5") != std::string::npos);
  CHECK(bad.out.find("oracle: FAIL") != std::string::npos);

  const std::string absolute = write_file(dir / "abs.ini", "[modulation]\ndepths_absolute = 0.001\n");
  CHECK(run({"oracle", "--config", absolute}).code == kExitValidation);
}
