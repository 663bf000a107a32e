#include "flapkit/budget.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::budget {

double lift_to_mass(double newtons) { return newtons / units::standard_gravity; }
double mass_to_lift(double kilograms) { return kilograms * units::standard_gravity; }

void MassBudget::add(MassEntry entry) {
  if (entry.mass < 0.0) throw SpecError(fmt::format("mass of '{}' must be non-negative", entry.component));
  net += entry.mass;
  entries.push_back(std::move(entry));
}

std::vector<std::string> MassBudget::warnings(double model_gap_tolerance) const {
  std::vector<std::string> out;
  constexpr double kMicrogram = 1e-9;
  if (printed_net && std::abs(*printed_net - net) > kMicrogram) {
    out.push_back(fmt::format("component masses sum to {:.3f} mg but the printed net is {:.3f} mg (rounding)",
                              net * 1e6, *printed_net * 1e6));
  }
  for (const auto& e : entries) {
    if (!e.reference || e.source != "geometry") continue;
    const double gap = (e.mass - *e.reference) / *e.reference;
    if (std::abs(gap) > model_gap_tolerance) {
      out.push_back(fmt::format("{} model mass {:.3f} mg differs from the published {:.3f} mg by {:+.0f}% "
                                "(unmodelled parts such as insulation, solder or glue)",
                                e.component, e.mass * 1e6, *e.reference * 1e6, 100.0 * gap));
    }
  }
  return out;
}

Quantity specific_power_requirement(const Quantity& vehicle_mass, double watts_per_kg) {
  if (vehicle_mass.dimension() != Dimension::mass) throw DimensionError("specific_power_requirement expects a mass");
  if (vehicle_mass.si() < 0.0) throw SpecError("vehicle mass must be non-negative");
  return units::power(watts_per_kg * vehicle_mass.si());
}

void Derating::validate() const {
  auto ok = [](double f) { return f > 0.0 && f <= 2.0; };
  if (!ok(lift_factor) || !ok(power_factor)) throw SpecError("derating factors must lie in (0, 2]");
}

Expectation derated_expectation(const Quantity& designed_lift, const Quantity& designed_power,
                                const Derating& derating) {
  derating.validate();
  if (designed_lift.dimension() != Dimension::mass || designed_power.dimension() != Dimension::power) {
    throw DimensionError("derated_expectation expects a lift (as mass) and a power");
  }
  return {designed_lift * derating.lift_factor, designed_power * derating.power_factor};
}

double efficiency(const Quantity& mech_out, const Quantity& electrical_in) {
  if (mech_out.dimension() != Dimension::power || electrical_in.dimension() != Dimension::power) {
    throw DimensionError("efficiency expects two powers");
  }
  if (!(electrical_in.si() > 0.0)) throw InvalidBudget("electrical input power must be positive");
  if (mech_out.si() < 0.0) throw InvalidBudget("mechanical output power must be non-negative");
  if (mech_out.si() > electrical_in.si()) {
    throw InvalidBudget(fmt::format("mechanical output {:.4g} W exceeds electrical input {:.4g} W", mech_out.si(),
                                    electrical_in.si()));
  }
  return mech_out.si() / electrical_in.si();
}

PowerBudget make_power_budget(double electrical_in, double joule_loss, double mech_out, double lift_estimate,
                              const Derating& derating) {
  PowerBudget b;
  b.electrical_in = electrical_in;
  b.joule_loss = joule_loss;
  b.mech_out = mech_out;
  b.lift_estimate = lift_estimate;
  b.derating = derating;
  b.efficiency = efficiency(units::power(mech_out), units::power(electrical_in));
  return b;
}

}  // namespace flapkit::budget
