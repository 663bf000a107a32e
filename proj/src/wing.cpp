#include "flapkit/wing.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::wing {

void WingSpec::validate() const {
  if (!(length > 0.0) || !(aspect_ratio > 0.0) || !(mass > 0.0)) {
    throw SpecError("wing length, aspect_ratio and mass must be positive");
  }
  if (n_veins < 0 || vein_width < 0.0 || membrane_thickness < 0.0 || adhesive_thickness < 0.0) {
    throw SpecError("wing vein and layer dimensions must be non-negative");
  }
  if (cop_distance < 0.0 || cop_distance >= mean_chord()) {
    throw SpecError(fmt::format("wing centre of pressure {:.4g} m must lie within the mean chord {:.4g} m",
                                cop_distance, mean_chord()));
  }
  if (leading_edge_mass_fraction < 0.0 || leading_edge_mass_fraction > 1.0) {
    throw SpecError("wing leading_edge_mass_fraction must lie in [0, 1]");
  }
  if (root_offset < 0.0) throw SpecError("wing root_offset must be non-negative");
}

void FlexureSpec::validate() const {
  if (n_parts < 1) throw SpecError("flexure n_parts must be at least 1");
  if (total_width < 0.0 || !(length > 0.0) || !(thickness > 0.0)) {
    throw SpecError("flexure width must be non-negative and length, thickness positive");
  }
  material.validate();
}

PitchStopSpec PitchStopSpec::symmetric(double limit, double restitution) {
  return {limit, limit, restitution, true};
}

void PitchStopSpec::validate() const {
  const double right = 90.0 * units::deg;
  auto in_range = [&](double v) { return v > 0.0 && v < right; };
  if (!in_range(positive_limit) || !in_range(negative_limit)) {
    throw SpecError("pitch stop limits must lie strictly between 0 and 90 degrees");
  }
  if (restitution < 0.0 || restitution > 1.0) throw SpecError("pitch stop restitution must lie in [0, 1]");
}

Quantity flexure_stiffness(const FlexureSpec& spec) {
  spec.validate();
  const double t = spec.thickness;
  return units::stiffness(spec.material.elastic_modulus / 12.0 * t * t * t * spec.total_width / spec.length);
}

Quantity max_aero_torque(const Quantity& normal_force, const Quantity& cop_distance) {
  if (normal_force.dimension() != Dimension::force || cop_distance.dimension() != Dimension::length) {
    throw DimensionError("max_aero_torque expects a force and a length");
  }
  if (normal_force.si() < 0.0 || cop_distance.si() < 0.0) throw SpecError("max_aero_torque inputs must be >= 0");
  return units::torque(normal_force.si() * cop_distance.si());
}

Quantity peak_normal_force(const Quantity& average_lift) {
  if (average_lift.dimension() != Dimension::force) throw DimensionError("peak_normal_force expects a force");
  return average_lift * (0.5 * std::sqrt(2.0));
}

FlexureSpec design_flexure(const Quantity& max_torque, const Quantity& max_deflection, const Quantity& thickness,
                           const MaterialSpec& material, const Quantity& length, int n_parts,
                           std::optional<double> max_total_width) {
  if (max_torque.dimension() != Dimension::torque || max_deflection.dimension() != Dimension::angle ||
      thickness.dimension() != Dimension::length || length.dimension() != Dimension::length) {
    throw DimensionError("design_flexure expects torque, angle, length, length");
  }
  if (max_torque.si() < 0.0 || !(max_deflection.si() > 0.0) || !(thickness.si() > 0.0) || !(length.si() > 0.0)) {
    throw SpecError("design_flexure inputs must be positive");
  }
  material.validate();
  const double t3 = std::pow(thickness.si(), 3);
  // Stiffness per unit width per unit 1/length.
  const double k_unit = material.elastic_modulus * t3 / 12.0;
  const double required_k = max_torque.si() / max_deflection.si();
  const double width = required_k * length.si() / k_unit;
  if (max_total_width && width > *max_total_width) {
    const double fitting_length = *max_total_width * k_unit / required_k;
    throw InfeasibleDesign(
        fmt::format("flexure width {:.4g} m exceeds the available {:.4g} m; shorten the flexure to {:.4g} m",
                    width, *max_total_width, fitting_length),
        fitting_length, "reduce flexure length");
  }
  FlexureSpec spec{width, length.si(), thickness.si(), n_parts, material};
  spec.validate();
  return spec;
}

Planform wing_planform(double length, double aspect_ratio) {
  if (!(length > 0.0) || !(aspect_ratio > 0.0)) throw SpecError("wing_planform inputs must be positive");
  const double chord = length / aspect_ratio;
  return {chord, length * chord};
}

Quantity wing_pitch_inertia(const WingSpec& spec) {
  spec.validate();
  const double c = spec.mean_chord();
  // Uniform sheet: integral over the chord of sigma * x^2 gives m c^2 / 3.
  return units::inertia((1.0 - spec.leading_edge_mass_fraction) * spec.mass * c * c / 3.0);
}

Quantity pitch_resonance(const FlexureSpec& flexure, const WingSpec& wing) {
  const double k = flexure_stiffness(flexure).si();
  const double inertia = wing_pitch_inertia(wing).si();
  return units::frequency(std::sqrt(k / inertia) / (2.0 * units::pi));
}

}  // namespace flapkit::wing
