#pragma once

// Design report: every published figure next to the value this toolkit
// computes for it, plus the stiffness, resonance, flexure, power and mass
// chains that produce them.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "flapkit/config.hpp"
#include "flapkit/dynamics.hpp"

namespace flapkit::budget {

struct Comparison {
  std::string name;
  std::string unit;
  double published = 0.0;
  double computed = 0.0;
  std::optional<double> lower;  // acceptance bounds on `computed`; unset: informational
  std::optional<double> upper;
  std::string tolerance;        // human-readable description of the bounds

  bool checked() const { return lower.has_value(); }
  bool pass() const { return !checked() || (computed >= *lower && computed <= *upper); }
  double relative_delta() const { return published == 0.0 ? 0.0 : (computed - published) / published; }
};

struct DesignReport {
  nlohmann::json document;
  std::vector<Comparison> comparisons;
  std::vector<std::string> warnings;

  std::string to_text() const;
};

/// Aggregates the configured design. `sim_summary` is the JSON written by
/// simulation_summary(); without it the report covers the budget chains only.
DesignReport build_report(const config::ProjectConfig& cfg, const std::optional<nlohmann::json>& sim_summary);

/// Summary of the last whole cycle of `series`.
nlohmann::json simulation_summary(const config::ProjectConfig& cfg, const dynamics::SimConfig& used,
                                  const dynamics::TimeSeries& series, bool calibrated);

}  // namespace flapkit::budget
