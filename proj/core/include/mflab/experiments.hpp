#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mflab/manybody.hpp"
#include "mflab/rates.hpp"

namespace mflab {

struct ExperimentConfig {
  int d = 1;
  int n = 64;
  double L = 6.283185307179586;
  int K = 2;
  int N_max = 32;
  double lambda = 1.0;
  double eta = 1.25;
  /// explicit cutoff; otherwise alpha = N^{-eta} per cell
  std::optional<double> alpha;
  double a = 0.0;
  double T = 0.5;
  double dt = 1e-3;
  /// cell times; defaults to {T}
  std::vector<double> times;
  std::vector<int> N_list;
  std::uint64_t seed = 0;
  std::string out = "out";
  /// mode coefficients of phi_0; empty means the lowest mode
  std::vector<cplx> phi0;
  bool fluctuation = true;
  bool record_runtime = false;
  /// bypass the simulation and report 7/N
  bool synthetic = false;
  int workers = 1;

  double alpha_for_cell(int N) const;
  MeanFieldSetup setup_for(int N) const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses, fills defaults and validates. Errors name the offending field.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);
/// Throws InvalidArgument naming the offending field.
void validate_config(const ExperimentConfig& cfg);

struct CellResult {
  int N = 0;
  double t = 0.0;
  double alpha = 0.0;
  double trace_distance = 0.0;
  /// nan when fluctuation quantities were not computed (4N > N_max)
  double et1_abs = 0.0;
  double et2_abs = 0.0;
  double moment_j1 = 0.0;
  double moment_j2 = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  bool density_valid = true;
  double runtime_ms = 0.0;
  std::optional<std::string> error;
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<CellResult> cells;  // sorted by (N, t)
  /// one fit per time with at least three successful distinct N
  std::vector<std::pair<double, RateFit>> fits;
  int failures = 0;
};

struct CellFilter {
  std::optional<int> N;
  std::optional<double> t;
};

/// Seeded random Hermitian observable with unit operator norm.
CMatrix observable_for(const ExperimentConfig& cfg);

CellResult run_cell(const ExperimentConfig& cfg, int N, double t);
SweepReport run_sweep(const ExperimentConfig& cfg, const CellFilter& filter = {});

std::string format_csv(const SweepReport& report);
std::string cell_json(const ExperimentConfig& cfg, const CellResult& c);
std::string report_json(const SweepReport& report);
/// Writes results.csv, summary.json and cells/*.json under cfg.out.
void write_report(const SweepReport& report);

/// Parses "N=8,t=0.5".
CellFilter parse_cell_filter(const std::string& text);

}  // namespace mflab
