#include "hill4bp/scan_report.hpp"

#include <algorithm>
#include <stdexcept>

namespace hill4bp {

double ScanReport::metric(const std::string& name) const {
  const auto it = std::find_if(metrics.begin(), metrics.end(),
                               [&](const auto& kv) { return kv.first == name; });
  if (it == metrics.end()) throw std::out_of_range("no metric named " + name);
  return it->second;
}

void ScanReport::set_metric(const std::string& name, double value) {
  const auto it = std::find_if(metrics.begin(), metrics.end(),
                               [&](const auto& kv) { return kv.first == name; });
  if (it == metrics.end()) {
    metrics.emplace_back(name, value);
  } else {
    it->second = value;
  }
}

nlohmann::ordered_json to_json(const ScanReport& report) {
  nlohmann::ordered_json j;
  j["bound_kind"] = report.bound_kind;
  j["verdict"] = report.pass ? "pass" : "fail";
  j[report.sense == ScanReport::Sense::kMinimum ? "min_value" : "max_value"] = report.extremum;
  j["tolerance"] = report.tolerance;
  j["argmin_kind"] = report.argmin_kind;
  j["argmin"] = report.argmin;
  j["n_samples"] = report.n_samples;
  j["rng_seed"] = report.rng_seed;
  j["mu"] = report.mu;
  j["c"] = report.c;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [name, value] : report.metrics) metrics[name] = value;
  j["metrics"] = std::move(metrics);
  return j;
}

}  // namespace hill4bp
