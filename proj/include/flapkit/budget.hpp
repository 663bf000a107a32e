#pragma once

// Mass, power, lift and efficiency bookkeeping.

#include <optional>
#include <string>
#include <vector>

#include "flapkit/units.hpp"

namespace flapkit::budget {

/// Lift expressed as the mass it supports, kg.
double lift_to_mass(double newtons);
double mass_to_lift(double kilograms);

struct MassEntry {
  std::string component;
  double mass = 0.0;                 // kg, value used in the budget
  std::optional<double> reference;   // kg, published figure if any
  std::string source;                // "geometry" or "table"
};

struct MassBudget {
  std::vector<MassEntry> entries;
  double net = 0.0;                      // kg, sum of entries
  std::optional<double> printed_net;     // kg

  void add(MassEntry entry);
  /// Rounding and model-gap notes; never errors.
  std::vector<std::string> warnings(double model_gap_tolerance = 0.10) const;
};

/// Power needed to hover `vehicle_mass` at a body-mass-specific power
/// (default 29 W/kg).
Quantity specific_power_requirement(const Quantity& vehicle_mass, double watts_per_kg = 29.0);

struct Derating {
  double lift_factor = 0.6;
  double power_factor = 1.6;

  void validate() const;
};

struct Expectation {
  Quantity lift;   // mass
  Quantity power;
};

Expectation derated_expectation(const Quantity& designed_lift, const Quantity& designed_power,
                                const Derating& derating = {});

class InvalidBudget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// mech_out / electrical_in. Throws InvalidBudget when output exceeds input
/// or the input is not positive.
double efficiency(const Quantity& mech_out, const Quantity& electrical_in);

struct PowerBudget {
  double electrical_in = 0.0;  // W
  double joule_loss = 0.0;     // W
  double mech_out = 0.0;       // W
  double lift_estimate = 0.0;  // kg
  double efficiency = 0.0;
  Derating derating;
};

PowerBudget make_power_budget(double electrical_in, double joule_loss, double mech_out, double lift_estimate,
                              const Derating& derating = {});

}  // namespace flapkit::budget
