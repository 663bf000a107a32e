#pragma once

// Wing planform, pitch inertia and passive-pitch flexure sizing.
//
// Aspect ratio is single-wing length over mean chord. The planform is
// rectangular at the mean chord, pitching about its leading edge.

#include <optional>

#include "flapkit/materials.hpp"
#include "flapkit/units.hpp"

namespace flapkit::wing {

struct WingSpec {
  double length = 3.5e-3;  // root to tip, m
  double aspect_ratio = 3.0;
  double mass = 2e-8;      // kg
  int n_veins = 0;
  double vein_width = 0.0;          // m
  double membrane_thickness = 0.0;  // m
  double adhesive_thickness = 0.0;  // m
  double cop_distance = 0.4e-3;     // chordwise centre of pressure from the leading edge, m
  // Share of the mass carried on the leading edge (zero pitch lever arm).
  double leading_edge_mass_fraction = 0.0;
  // Distance from the stroke axis to the wing root, m.
  double root_offset = 0.0;

  double mean_chord() const { return length / aspect_ratio; }
  void validate() const;
};

/// Leading-edge flexure made of `n_parts` equal strips.
struct FlexureSpec {
  double total_width = 0.0;  // m
  double length = 0.0;       // m
  double thickness = 0.0;    // m
  int n_parts = 1;
  MaterialSpec material;

  double part_width() const { return total_width / n_parts; }
  void validate() const;
};

/// Hard pitch limits. Both limits are magnitudes in (0, pi/2); the negative
/// stop sits at -negative_limit.
struct PitchStopSpec {
  double positive_limit = 30.0 * units::deg;
  double negative_limit = 50.0 * units::deg;
  double restitution = 0.0;
  bool enabled = true;

  static PitchStopSpec symmetric(double limit, double restitution = 0.0);
  void validate() const;
};

struct Planform {
  double mean_chord = 0.0;  // m
  double area = 0.0;        // m^2
};

/// (E / 12) * t^3 * (w / l); only the total width matters.
Quantity flexure_stiffness(const FlexureSpec& spec);

/// Force times lever arm.
Quantity max_aero_torque(const Quantity& normal_force, const Quantity& cop_distance);

/// Peak normal force from an average lift: 0.5 * sqrt(2) * lift.
Quantity peak_normal_force(const Quantity& average_lift);

/// Flexure width that deflects `max_deflection` under `max_torque`:
/// 12 l tau / (theta E t^3). The result is split into `n_parts` equal strips.
/// With `max_total_width` set (the wing's leading-edge length), a wider
/// result throws InfeasibleDesign whose nearest() is the flexure length that
/// would fit.
FlexureSpec design_flexure(const Quantity& max_torque, const Quantity& max_deflection, const Quantity& thickness,
                           const MaterialSpec& material, const Quantity& length, int n_parts = 3,
                           std::optional<double> max_total_width = std::nullopt);

Planform wing_planform(double length, double aspect_ratio);

/// Pitch inertia about the leading edge. The non-leading-edge share of the
/// mass is spread uniformly over the rectangular planform, giving
/// (1 - f_le) * m * c^2 / 3.
Quantity wing_pitch_inertia(const WingSpec& spec);

/// (1 / 2 pi) * sqrt(k_flex / I_pitch).
Quantity pitch_resonance(const FlexureSpec& flexure, const WingSpec& wing);

}  // namespace flapkit::wing
