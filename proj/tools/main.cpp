#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mflab/checks.hpp"
#include "mflab/errors.hpp"
#include "mflab/experiments.hpp"
#include "mflab/fluctuation.hpp"
#include "mflab/hartree.hpp"
#include "mflab/rates.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

struct Common {
  std::string config;
  std::string out;
  int workers = 0;
  long long seed = -1;
  std::string cell;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "experiment config (JSON)");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--workers", c.workers, "concurrent cells")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "RNG seed")->check(CLI::NonNegativeNumber);
  sub->add_option("--cell", c.cell, "single cell, e.g. N=8,t=0.5");
}

mflab::ExperimentConfig load(const Common& c) {
  if (c.config.empty()) throw mflab::InvalidArgument("--config is required");
  std::ifstream f(c.config);
  if (!f) throw mflab::InvalidArgument("config: cannot read " + c.config);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  mflab::ExperimentConfig cfg = mflab::parse_config(text);
  if (!c.out.empty()) cfg.out = c.out;
  if (c.workers > 0) cfg.workers = c.workers;
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  mflab::validate_config(cfg);
  return cfg;
}

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw mflab::InvalidArgument("out: cannot write " + p.string());
  f << s;
}

int cmd_hartree(const Common& c) {
  auto cfg = load(c);
  mflab::MeanFieldSetup setup = cfg.setup_for(cfg.N_list.front());
  mflab::MeanFieldModel model = mflab::build_model(setup);
  mflab::HartreeState s0{model.modes.synthesize(model.phi0), 0.0};
  long steps = std::max(1L, std::lround(cfg.T / cfg.dt));
  long stride = std::max(1L, steps / 100);
  auto run = mflab::evolve(s0, model.kernel, cfg.T, cfg.dt, static_cast<double>(stride) * cfg.dt);
  std::vector<mflab::TrajectorySample> samples;
  for (const auto& s : run) samples.push_back(mflab::sample_of(s, model.kernel));
  std::ostringstream os;
  mflab::write_trajectory_csv(os, samples);
  write_file(std::filesystem::path(cfg.out) / "hartree.csv", os.str());
  const auto& first = samples.front();
  const auto& last = samples.back();
  std::cout << "mass drift " << std::abs(last.mass - first.mass) << ", relative energy drift "
            << std::abs(last.energy - first.energy) / std::abs(first.energy) << "\n";
  return kOk;
}

int sweep_like(const Common& c, bool fluctuation) {
  auto cfg = load(c);
  cfg.fluctuation = fluctuation;
  mflab::CellFilter filter;
  if (!c.cell.empty()) filter = mflab::parse_cell_filter(c.cell);
  auto rep = mflab::run_sweep(cfg, filter);
  mflab::write_report(rep);
  std::cout << mflab::format_csv(rep);
  for (const auto& [t, fit] : rep.fits) std::cout << "t=" << t << " slope " << fit.slope << "\n";
  for (const auto& cell : rep.cells)
    if (cell.error) std::cerr << "cell N=" << cell.N << " t=" << cell.t << " failed: " << *cell.error << "\n";
  return rep.failures > 0 ? kFailure : kOk;
}

int cmd_fluctuation(const Common& c) {
  auto cfg = load(c);
  mflab::CellFilter filter;
  if (!c.cell.empty()) filter = mflab::parse_cell_filter(c.cell);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  int failures = 0;
  for (int N : cfg.N_list) {
    if (filter.N && *filter.N != N) continue;
    if (4 * N > cfg.N_max) {
      std::cerr << "skipping N=" << N << ": needs N_max >= " << 4 * N << "\n";
      continue;
    }
    try {
      mflab::MeanFieldSetup setup = cfg.setup_for(N);
      mflab::MeanFieldModel model = mflab::build_model(setup);
      mflab::FluctuationModel fm(model.tensor, model.modes.eps, model.phi0, N, cfg.N_max, cfg.T, cfg.dt);
      std::vector<double> grid;
      for (double t : cfg.times)
        if (!filter.t || std::abs(*filter.t - t) < 1e-12) grid.push_back(t);
      std::sort(grid.begin(), grid.end());
      auto m1 = mflab::moment_growth(fm, {}, 1, grid);
      auto m2 = mflab::moment_growth(fm, {}, 2, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        auto e = mflab::evaluate_Et(fm, mflab::observable_for(cfg), grid[i]);
        out.push_back({{"N", N},
                       {"t", grid[i]},
                       {"et1_abs", std::abs(e.e1)},
                       {"et2_abs", std::abs(e.e2)},
                       {"moment_j1", m1.values[i]},
                       {"moment_j2", m2.values[i]},
                       {"saturated", m1.saturated}});
      }
    } catch (const mflab::NumericalError& e) {
      ++failures;
      std::cerr << "N=" << N << " failed: " << e.what() << "\n";
    }
  }
  write_file(std::filesystem::path(cfg.out) / "fluctuation.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return failures > 0 ? kFailure : kOk;
}

int cmd_check(const std::optional<std::string>& select, const std::vector<std::string>& overrides,
              const std::string& out) {
  mflab::CheckOptions opt;
  if (select) {
    std::vector<std::string> names;
    std::stringstream ss(*select);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) names.push_back(item);
    opt.select = names;
  }
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw mflab::InvalidArgument("--threshold expects name=value");
    try {
      opt.thresholds[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw mflab::InvalidArgument("--threshold: bad value in '" + o + "'");
    }
  }
  auto rows = mflab::run_checks(opt);
  std::string table = mflab::format_check_table(rows);
  if (!out.empty()) write_file(std::filesystem::path(out) / "checks.csv", table);
  std::cout << table;
  for (const auto& r : rows)
    if (!r.pass) return kFailure;
  return kOk;
}

int cmd_rates(std::optional<double> a, std::optional<double> eta) {
  double av = a.value_or(0.0);
  mflab::RateModel m{av, eta ? *eta : mflab::recommended_eta(av)};
  nlohmann::ordered_json j{{"a", m.a},
                           {"eta", m.eta},
                           {"theorem_rate", m.theorem_rate()},
                           {"proposition_rate", m.proposition_rate()},
                           {"corollary_rate", m.corollary_rate()},
                           {"hartree_gap_rate", m.hartree_gap_rate()}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field dynamics laboratory"};
  app.require_subcommand(1);
  Common common;
  auto* hartree = app.add_subcommand("hartree", "grid Hartree run");
  auto* manybody = app.add_subcommand("manybody", "many-body vs mean-field cells");
  auto* fluct = app.add_subcommand("fluctuation", "fluctuation moments and E-functionals");
  auto* sweep = app.add_subcommand("sweep", "full sweep with rate fit");
  for (auto* s : {hartree, manybody, fluct, sweep}) add_common(s, common);

  auto* check = app.add_subcommand("check", "invariant suite");
  std::optional<std::string> select;
  std::vector<std::string> overrides;
  std::string check_out;
  check->add_option("--select", select, "comma-separated check names");
  check->add_option("--threshold", overrides, "override name=value");
  check->add_option("--out", check_out, "output directory");

  auto* rates = app.add_subcommand("rates", "predicted exponents");
  std::optional<double> a, eta;
  rates->add_option("--a", a, "Sobolev surplus");
  rates->add_option("--eta", eta, "regularization exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*hartree) return cmd_hartree(common);
    if (*manybody) return sweep_like(common, false);
    if (*fluct) return cmd_fluctuation(common);
    if (*sweep) return sweep_like(common, true);
    if (*check) return cmd_check(select, overrides, check_out);
    if (*rates) return cmd_rates(a, eta);
  } catch (const mflab::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
