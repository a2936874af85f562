#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hill4bp {

/// Verdict and extremal witness of an inequality scan.
///
/// `extremum` is the minimum (or, for upper-bound scans, the maximum) of the
/// scanned quantity and `argmin` the coordinates that produced it, expressed in
/// the chart named by `argmin_kind`.
struct ScanReport {
  enum class Sense { kMinimum, kMaximum };

  std::string bound_kind;
  bool pass = false;
  Sense sense = Sense::kMinimum;
  double extremum = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::string argmin_kind;
  std::vector<double> argmin;
  std::size_t n_samples = 0;
  std::uint64_t rng_seed = 0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();
  /// Secondary quantities (margins, bound violations, constants) in insertion order.
  std::vector<std::pair<std::string, double>> metrics;

  double metric(const std::string& name) const;
  void set_metric(const std::string& name, double value);
};

nlohmann::ordered_json to_json(const ScanReport& report);

}  // namespace hill4bp
