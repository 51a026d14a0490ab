#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mflab {

struct CheckRow {
  std::string name;
  /// measured quantity; the row passes when value <= threshold
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CheckOptions {
  /// nullopt runs everything; an empty list runs nothing
  std::optional<std::vector<std::string>> select;
  /// replaces the default threshold of the named check
  std::map<std::string, double> thresholds;
};

std::vector<std::string> check_names();
/// Default threshold of a named check.
double check_threshold(const std::string& name);
std::vector<CheckRow> run_checks(const CheckOptions& opt = {});
/// CSV: check_name,max_ratio,threshold,pass
std::string format_check_table(const std::vector<CheckRow>& rows);

/// sup <f, vbar f> / <f, (1 - Lap) f> on the d=1, n=64, L=2pi grid with alpha=1/8,
/// calibrated once and frozen.
extern const double kHardyGoldenD1N64;

}  // namespace mflab
