#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "mflab/checks.hpp"
#include "mflab/errors.hpp"
#include "mflab/experiments.hpp"

using namespace mflab;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mflab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(MFLAB_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  ExperimentConfig c = parse_config(R"({"N_list": [4, 8], "a": 0})");
  CHECK(c.eta == 1.25);
  CHECK(c.lambda == 1.0);
  CHECK(c.d == 1);
  CHECK(c.K == 2);
  CHECK(c.times == std::vector<double>{c.T});
  CHECK(parse_config(R"({"N_list": [4], "a": 1.5})").eta == 1.0);

  CHECK(error_of(R"({"N_list": [4], "grid": {"n": 63}})").find("grid.n") == 0);
  CHECK(error_of(R"({"N_list": [4], "a": 0.7})").find("a:") == 0);
  CHECK(error_of(R"({"N_list": [4], "bogus": 1})").find("bogus") == 0);
  CHECK(error_of(R"({"N_list": [4], "potential": {"lambda": -1}})").find("potential.lambda") == 0);
  CHECK(error_of(R"({"N_list": [4], "potential": {"alpha": 0.01}})").find("grid floor") != std::string::npos);
  CHECK(error_of(R"({"a": 0})").find("N_list") == 0);
  CHECK(error_of(R"({"N_list": [4], "K": "two"})").find("K") == 0);
  CHECK(error_of("{not json").find("malformed") != std::string::npos);
  CHECK(error_of(R"({"N_list": [4], "T": 0.5, "times": [0.7]})").find("times") == 0);
  // N^-eta below the floor is caught for the whole list
  CHECK(error_of(R"({"N_list": [4, 4096]})").find("potential.eta") == 0);
}

TEST_CASE("config round trip") {
  ExperimentConfig c = parse_config(
      R"({"N_list": [8, 16], "K": 3, "potential": {"alpha": 0.2, "lambda": 0.5}, "phi0": [0.6, [0.0, 0.8], 0.0],
          "times": [0.1, 0.25], "T": 0.3, "seed": 12345678901, "dt": 0.0007})");
  ExperimentConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(serialize_config(back) == serialize_config(c));
  CHECK(c.alpha_for_cell(8) == 0.2);
  ExperimentConfig plain = parse_config(R"({"N_list": [8]})");
  CHECK(plain.alpha_for_cell(8) == doctest::Approx(std::pow(8.0, -1.25)));
}

TEST_CASE("synthetic sweep recovers slope -1") {
  ExperimentConfig c = parse_config(R"({"N_list": [64, 8, 16, 32], "synthetic": true, "workers": 3, "potential": {"alpha": 0.125}})");
  SweepReport r = run_sweep(c);
  REQUIRE(r.cells.size() == 4);
  CHECK(r.cells.front().N == 8);
  CHECK(r.failures == 0);
  REQUIRE(r.fits.size() == 1);
  CHECK(std::abs(r.fits[0].second.slope + 1.0) <= 1e-10);
  std::string csv = format_csv(r);
  CHECK(csv.substr(0, csv.find('\n')) == "N,K,eta,alpha,t,trace_distance,et1_abs,et2_abs,moment_j1,moment_j2,runtime_ms");

  SweepReport one = run_sweep(c, parse_cell_filter("N=16"));
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].N == 16);
  CHECK_THROWS_AS(parse_cell_filter("M=3"), InvalidArgument);
  CHECK_THROWS_AS(parse_cell_filter("N=x"), InvalidArgument);
}

TEST_CASE("sweep determinism") {
  ExperimentConfig c = parse_config(
      R"({"N_list": [4, 4], "N_max": 16, "T": 0.1, "phi0": [0.8, 0.6], "potential": {"alpha": 0.125}})");
  SweepReport r = run_sweep(c);
  REQUIRE(r.cells.size() == 2);
  CHECK(cell_json(c, r.cells[0]) == cell_json(c, r.cells[1]));
  CHECK(r.cells[0].density_valid);
  CHECK(std::isfinite(r.cells[0].et1_abs));
  CHECK(r.cells[0].moment_j1 >= 1.0);
  CHECK(r.fits.empty());

  fs::path a = scratch("det_a"), b = scratch("det_b");
  c.out = a.string();
  write_report(run_sweep(c));
  c.out = b.string();
  write_report(run_sweep(c));
  for (const char* f : {"results.csv", "summary.json", "cells/N4_t0.1.json"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("check table: tamper hook and empty selection") {
  CheckOptions none;
  none.select = std::vector<std::string>{};
  CHECK(run_checks(none).empty());
  CHECK(format_check_table({}) == "check_name,max_ratio,threshold,pass\n");

  CheckOptions two;
  two.select = std::vector<std::string>{"ccr", "d_N_limit"};
  auto clean = run_checks(two);
  REQUIRE(clean.size() == 2);
  CHECK(clean[0].pass);
  CHECK(clean[1].pass);
  two.thresholds["ccr"] = -1.0;
  auto tampered = run_checks(two);
  CHECK_FALSE(tampered[0].pass);
  CHECK(tampered[1].pass);
  CHECK(tampered[1].value == clean[1].value);

  CheckOptions unknown;
  unknown.select = std::vector<std::string>{"nope"};
  CHECK_THROWS_AS(run_checks(unknown), InvalidArgument);
}

TEST_CASE("command line exit codes") {
  fs::path dir = scratch("cli");
  {
    std::ofstream f(dir / "synthetic.json");
    f << R"({"N_list": [8, 16, 32], "synthetic": true, "potential": {"alpha": 0.125}})";
  }
  {
    std::ofstream f(dir / "broken.json");
    f << R"({"N_list": [8], "grid": {"n": 7}})";
  }
  std::string out = " --out " + (dir / "out").string();
  CHECK(run_cli("sweep --config " + (dir / "synthetic.json").string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "results.csv"));
  CHECK(run_cli("sweep --config " + (dir / "broken.json").string() + out) == 2);
  CHECK(run_cli("sweep --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("sweep --config " + (dir / "synthetic.json").string() + " --workers 0") == 2);
  CHECK(run_cli("check --select ccr") == 0);
  CHECK(run_cli("check --select ccr --threshold ccr=-1") == 1);
  CHECK(run_cli("check --select \"\"") == 0);
  CHECK(run_cli("check --select nope") == 2);
  CHECK(run_cli("rates --a 0.25") == 0);
  CHECK(run_cli("rates --a 0.7") == 2);
  CHECK(run_cli("") == 2);
}
