#include "mflab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mflab/errors.hpp"
#include "mflab/fluctuation.hpp"

namespace mflab {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InvalidArgument(field + ": " + what);
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    field_error(field, "has the wrong type");
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) field_error(prefix + it.key(), "unknown field");
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

double ExperimentConfig::alpha_for_cell(int N) const { return alpha ? *alpha : mflab::alpha_for(N, eta); }

MeanFieldSetup ExperimentConfig::setup_for(int N) const {
  MeanFieldSetup s;
  s.grid = make_grid(d, n, L);
  s.K = K;
  s.lambda = lambda;
  s.alpha = alpha_for_cell(N);
  if (!phi0.empty()) {
    s.phi0.resize(K);
    for (int p = 0; p < K; ++p) s.phi0[p] = phi0[static_cast<std::size_t>(p)];
  }
  s.hartree_dt = dt;
  return s;
}

void validate_config(const ExperimentConfig& c) {
  if (c.d < 1 || c.d > 3) field_error("grid.d", "must be 1, 2 or 3");
  if (c.n < 4 || c.n % 2 != 0) field_error("grid.n", "must be even and at least 4");
  if (!(c.L > 0.0) || !std::isfinite(c.L)) field_error("grid.L", "must be positive");
  double cells = std::pow(static_cast<double>(c.n), c.d);
  if (cells > 1 << 21) field_error("grid.n", "grid too large");
  if (c.K < 1 || c.K > static_cast<int>(std::pow(c.n - 1.0, c.d))) field_error("K", "must lie in [1, (n-1)^d]");
  if (c.N_list.empty()) field_error("N_list", "must be a nonempty list");
  for (int N : c.N_list)
    if (N < 1) field_error("N_list", "entries must be positive");
  if (c.N_max < 1) field_error("N_max", "must be positive");
  if (static_cast<double>(FockBasis::count(c.K + 1, c.N_max)) > 4e5) field_error("N_max", "Fock space too large for K");
  for (int N : c.N_list)
    if (static_cast<double>(FockBasis::count(c.K, N)) > 2e5) field_error("N_list", "sector dimension too large for K");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) field_error("potential.lambda", "must be positive");
  try {
    theoretical_rate(c.a);
  } catch (const InvalidArgument& e) {
    field_error("a", e.what());
  }
  if (!(c.eta > 0.0) || !std::isfinite(c.eta)) field_error("potential.eta", "must be positive");
  const double h = c.L / c.n;
  const double floor = h / 2.0;
  if (c.alpha) {
    if (!(*c.alpha > 0.0) || !std::isfinite(*c.alpha)) field_error("potential.alpha", "must be positive");
    if (*c.alpha < floor * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "alpha=" << *c.alpha << " is below the grid floor h/2=" << floor;
      field_error("potential.alpha", os.str());
    }
  } else {
    for (int N : c.N_list) {
      double al = mflab::alpha_for(N, c.eta);
      if (al < floor * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "alpha=N^-eta=" << al << " for N=" << N << " is below the grid floor h/2=" << floor
           << "; set potential.alpha or refine the grid";
        field_error("potential.eta", os.str());
      }
    }
  }
  if (!(c.T >= 0.0) || !std::isfinite(c.T)) field_error("T", "must be nonnegative");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) field_error("dt", "must be positive");
  if (c.times.empty()) field_error("times", "must be nonempty");
  for (double t : c.times)
    if (!(t >= 0.0 && t <= c.T)) field_error("times", "entries must lie in [0, T]");
  if (!c.phi0.empty()) {
    if (static_cast<int>(c.phi0.size()) != c.K) field_error("phi0", "must have K coefficients");
    double nrm = 0.0;
    for (auto z : c.phi0) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) field_error("phi0", "must be finite");
      nrm += std::norm(z);
    }
    if (!(nrm > 0.0)) field_error("phi0", "must be nonzero");
  }
  if (c.workers < 1) field_error("workers", "must be positive");
  if (c.out.empty()) field_error("out", "must be nonempty");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  reject_unknown(j, {"grid", "K", "N_max", "potential", "a", "T", "dt", "times", "N_list", "seed", "out", "phi0",
                     "fluctuation", "record_runtime", "synthetic", "workers"},
                 "");
  ExperimentConfig c;
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) field_error("grid", "must be an object");
    reject_unknown(g, {"d", "n", "L"}, "grid.");
    if (g.contains("d")) c.d = get_as<int>(g["d"], "grid.d");
    if (g.contains("n")) c.n = get_as<int>(g["n"], "grid.n");
    if (g.contains("L")) c.L = get_as<double>(g["L"], "grid.L");
  }
  if (j.contains("K")) c.K = get_as<int>(j["K"], "K");
  if (j.contains("N_max")) c.N_max = get_as<int>(j["N_max"], "N_max");
  if (j.contains("a")) c.a = get_as<double>(j["a"], "a");
  bool eta_given = false;
  if (j.contains("potential")) {
    const json& p = j["potential"];
    if (!p.is_object()) field_error("potential", "must be an object");
    reject_unknown(p, {"lambda", "eta", "alpha"}, "potential.");
    if (p.contains("lambda")) c.lambda = get_as<double>(p["lambda"], "potential.lambda");
    if (p.contains("eta")) {
      c.eta = get_as<double>(p["eta"], "potential.eta");
      eta_given = true;
    }
    if (p.contains("alpha") && !p["alpha"].is_null()) c.alpha = get_as<double>(p["alpha"], "potential.alpha");
  }
  if (!eta_given) {
    try {
      c.eta = recommended_eta(c.a);
    } catch (const InvalidArgument& e) {
      field_error("a", e.what());
    }
  }
  if (j.contains("T")) c.T = get_as<double>(j["T"], "T");
  if (j.contains("dt")) c.dt = get_as<double>(j["dt"], "dt");
  if (j.contains("times")) c.times = get_as<std::vector<double>>(j["times"], "times");
  if (c.times.empty() && !j.contains("times")) c.times = {c.T};
  if (!j.contains("N_list")) field_error("N_list", "is required");
  c.N_list = get_as<std::vector<int>>(j["N_list"], "N_list");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("out")) c.out = get_as<std::string>(j["out"], "out");
  if (j.contains("phi0")) {
    const json& p = j["phi0"];
    if (!p.is_array()) field_error("phi0", "must be an array");
    for (const auto& e : p) {
      if (e.is_number()) {
        c.phi0.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        c.phi0.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        field_error("phi0", "entries must be numbers or [re, im] pairs");
      }
    }
  }
  if (j.contains("fluctuation")) c.fluctuation = get_as<bool>(j["fluctuation"], "fluctuation");
  if (j.contains("record_runtime")) c.record_runtime = get_as<bool>(j["record_runtime"], "record_runtime");
  if (j.contains("synthetic")) c.synthetic = get_as<bool>(j["synthetic"], "synthetic");
  if (j.contains("workers")) c.workers = get_as<int>(j["workers"], "workers");
  validate_config(c);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  ojson j;
  j["grid"] = {{"d", c.d}, {"n", c.n}, {"L", c.L}};
  j["K"] = c.K;
  j["N_max"] = c.N_max;
  ojson pot;
  pot["lambda"] = c.lambda;
  pot["eta"] = c.eta;
  if (c.alpha) pot["alpha"] = *c.alpha;
  j["potential"] = pot;
  j["a"] = c.a;
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["times"] = c.times;
  j["N_list"] = c.N_list;
  j["seed"] = c.seed;
  j["out"] = c.out;
  auto arr = ojson::array();
  for (auto z : c.phi0) arr.push_back({z.real(), z.imag()});
  j["phi0"] = arr;
  j["fluctuation"] = c.fluctuation;
  j["record_runtime"] = c.record_runtime;
  j["synthetic"] = c.synthetic;
  j["workers"] = c.workers;
  return j.dump(2);
}

CMatrix observable_for(const ExperimentConfig& cfg) {
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix A(cfg.K, cfg.K);
  for (int i = 0; i < cfg.K; ++i)
    for (int k = 0; k < cfg.K; ++k) A(i, k) = cplx(g(rng), g(rng));
  CMatrix J = 0.5 * (A + A.adjoint());
  double nrm = operator_norm(J);
  return nrm > 0.0 ? CMatrix(J / nrm) : J;
}

CellResult run_cell(const ExperimentConfig& cfg, int N, double t) {
  auto start = std::chrono::steady_clock::now();
  CellResult r;
  r.N = N;
  r.t = t;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    r.alpha = cfg.alpha_for_cell(N);
    if (cfg.synthetic) {
      r.trace_distance = 7.0 / N;
      r.et1_abs = r.et2_abs = r.moment_j1 = r.moment_j2 = nan;
      r.mass = 1.0;
      r.energy = nan;
    } else {
      MeanFieldSetup setup = cfg.setup_for(N);
      MeanFieldModel model = build_model(setup);
      MeanFieldResult mf = mean_field_run(N, t, model, setup);
      r.trace_distance = mf.trace_distance;
      r.mass = mf.mass;
      r.energy = mf.energy;
      r.density_valid = mf.gamma.valid();
      if (cfg.fluctuation && 4 * N <= cfg.N_max) {
        FluctuationModel fm(model.tensor, model.modes.eps, model.phi0, N, cfg.N_max, t, cfg.dt);
        EtValues e = evaluate_Et(fm, observable_for(cfg), t);
        r.et1_abs = std::abs(e.e1);
        r.et2_abs = std::abs(e.e2);
        FockVector w = fm.propagate({GeneratorKind::Full, std::nullopt}, fm.vacuum(), 0.0, t);
        r.moment_j1 = moment(w, 1);
        r.moment_j2 = moment(w, 2);
      } else {
        r.et1_abs = r.et2_abs = r.moment_j1 = r.moment_j2 = nan;
      }
      if (!r.density_valid) r.error = "reduced density violates trace/positivity invariants";
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  if (cfg.record_runtime) {
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

SweepReport run_sweep(const ExperimentConfig& cfg, const CellFilter& filter) {
  validate_config(cfg);
  std::vector<std::pair<int, double>> jobs;
  for (int N : cfg.N_list)
    for (double t : cfg.times) {
      if (filter.N && *filter.N != N) continue;
      if (filter.t && std::abs(*filter.t - t) > 1e-12) continue;
      jobs.emplace_back(N, t);
    }
  std::vector<CellResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run_cell(cfg, jobs[i].first, jobs[i].second);
  };
  int nthreads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::stable_sort(results.begin(), results.end(), [](const CellResult& x, const CellResult& y) {
    return std::tie(x.N, x.t) < std::tie(y.N, y.t);
  });
  SweepReport rep;
  rep.config = cfg;
  rep.cells = std::move(results);
  std::map<double, std::map<int, double>> by_t;
  for (const auto& c : rep.cells) {
    if (c.error) {
      ++rep.failures;
      continue;
    }
    if (c.trace_distance > 0.0) by_t[c.t][c.N] = c.trace_distance;
  }
  for (const auto& [t, pts] : by_t) {
    if (pts.size() < 3) continue;
    std::vector<std::pair<double, double>> p;
    for (const auto& [N, v] : pts) p.emplace_back(N, v);
    rep.fits.emplace_back(t, fit_slope(p));
  }
  return rep;
}

std::string format_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << "N,K,eta,alpha,t,trace_distance,et1_abs,et2_abs,moment_j1,moment_j2,runtime_ms\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : rep.cells) {
    bool ok = !c.error;
    os << c.N << ',' << rep.config.K << ',' << num(rep.config.eta) << ',' << num(c.alpha) << ',' << num(c.t) << ','
       << num(ok ? c.trace_distance : nan) << ',' << num(ok ? c.et1_abs : nan) << ',' << num(ok ? c.et2_abs : nan)
       << ',' << num(ok ? c.moment_j1 : nan) << ',' << num(ok ? c.moment_j2 : nan) << ',' << num(c.runtime_ms)
       << '\n';
  }
  return os.str();
}

namespace {

ojson maybe(double v) { return std::isnan(v) ? ojson(nullptr) : ojson(v); }

}  // namespace

std::string cell_json(const ExperimentConfig& cfg, const CellResult& c) {
  ojson j;
  j["N"] = c.N;
  j["K"] = cfg.K;
  j["eta"] = cfg.eta;
  j["alpha"] = c.alpha;
  j["t"] = c.t;
  if (c.error) {
    j["error"] = *c.error;
  } else {
    j["trace_distance"] = c.trace_distance;
    j["mass"] = maybe(c.mass);
    j["energy"] = maybe(c.energy);
    j["density_valid"] = c.density_valid;
    j["et1_abs"] = maybe(c.et1_abs);
    j["et2_abs"] = maybe(c.et2_abs);
    j["moment_j1"] = maybe(c.moment_j1);
    j["moment_j2"] = maybe(c.moment_j2);
  }
  j["runtime_ms"] = c.runtime_ms;
  return j.dump(2);
}

std::string report_json(const SweepReport& rep) {
  ojson j;
  RateModel m{rep.config.a, rep.config.eta};
  j["predicted"] = {{"theorem_rate", m.theorem_rate()},
                    {"proposition_rate", m.proposition_rate()},
                    {"corollary_rate", m.corollary_rate()},
                    {"hartree_gap_rate", m.hartree_gap_rate()}};
  auto fits = ojson::array();
  for (const auto& [t, f] : rep.fits) {
    fits.push_back({{"t", t}, {"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}});
  }
  j["fits"] = fits;
  j["cells"] = rep.cells.size();
  j["failures"] = rep.failures;
  return j.dump(2);
}

void write_report(const SweepReport& rep) {
  namespace fs = std::filesystem;
  fs::path out(rep.config.out);
  fs::create_directories(out / "cells");
  auto write = [](const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidArgument("out: cannot write " + p.string());
    f << s;
  };
  write(out / "results.csv", format_csv(rep));
  write(out / "summary.json", report_json(rep) + "\n");
  write(out / "config.json", serialize_config(rep.config) + "\n");
  for (const auto& c : rep.cells) {
    std::ostringstream name;
    name << "N" << c.N << "_t" << num(c.t) << ".json";
    write(out / "cells" / name.str(), cell_json(rep.config, c) + "\n");
  }
}

CellFilter parse_cell_filter(const std::string& text) {
  CellFilter f;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("cell: expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key != "N" && key != "t") throw InvalidArgument("cell: unknown key '" + key + "'");
    std::size_t used = 0;
    try {
      if (key == "N") {
        f.N = std::stoi(val, &used);
      } else {
        f.t = std::stod(val, &used);
      }
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw InvalidArgument("cell: bad value for " + key);
  }
  return f;
}

}  // namespace mflab
