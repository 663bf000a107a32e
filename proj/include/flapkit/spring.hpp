#pragma once

// Torsion spring sizing: stiffness targets, the analytic beam-bank model and
// the inverse design search.
//
// The beam bank is modelled as n beams bending out of plane in rotational
// series. The real planar spring topology is not captured by that closed
// form; `topology_factor` scales it and can be calibrated against a known
// stiffness. Off-axis parasitic modes are not modelled: the spring is a
// single rotational degree of freedom.

#include <vector>

#include "flapkit/materials.hpp"
#include "flapkit/units.hpp"

namespace flapkit::spring {

struct SpringSpec {
  int n_beams = 1;
  double beam_length = 0.0;     // m
  double beam_width = 0.0;      // m
  double beam_thickness = 0.0;  // m
  MaterialSpec material;
  double topology_factor = 1.0;

  void validate() const;
  /// n_beams * beam_width * beam_length, m^2.
  double footprint() const { return n_beams * beam_width * beam_length; }
};

/// Lumped stroke oscillator. `inertia` already includes the point mass at
/// the arc radius plus any extra inertia from glue and frames.
struct OscillatorSpec {
  double stiffness = 0.0;      // N*m/rad
  double inertia = 0.0;        // kg*m^2
  double arc_radius = 0.0;     // m
  double point_mass = 0.0;     // kg
  double damping_ratio = 0.0;  // structural, fraction of critical

  /// inertia = point_mass * arc_radius^2 + extra_inertia.
  static OscillatorSpec from_point_mass(double stiffness, double point_mass, double arc_radius,
                                        double extra_inertia = 0.0);

  double point_mass_inertia() const { return point_mass * arc_radius * arc_radius; }
  double natural_angular_frequency() const;
  void validate() const;
};

/// m * r^2 * (2 pi f)^2.
Quantity required_stiffness(const Quantity& point_mass, const Quantity& arc_radius,
                            const Quantity& target_frequency);

/// (1 / 2 pi) * sqrt(k / I).
Quantity resonance_frequency(const OscillatorSpec& osc);

/// k / (2 pi f_obs)^2: the inertia that puts a spring of stiffness k at the
/// observed resonance.
Quantity effective_inertia_from_resonance(const Quantity& stiffness, const Quantity& observed_frequency);

/// I * (2 pi f_obs)^2: the stiffness that puts inertia I at the observed
/// resonance.
Quantity stiffness_from_resonance(const Quantity& inertia, const Quantity& observed_frequency);

/// topology_factor * E * (w t^3 / 12) / (n * L).
Quantity beam_bank_stiffness(const SpringSpec& spec);

/// Topology factor that makes `spec` evaluate to `target`.
double calibrate_topology_factor(const SpringSpec& spec, const Quantity& target);

struct DesignConstraints {
  double thickness = 0.0;  // fixed sheet thickness, m
  double width_min = 0.0;
  double width_max = 0.0;
  int width_steps = 1;
  double length_min = 0.0;
  double length_max = 0.0;
  int n_beams_min = 1;
  int n_beams_max = 1;
  double rel_tolerance = 0.02;

  void validate() const;
};

struct SpringDesign {
  SpringSpec spec;
  double target_stiffness = 0.0;    // N*m/rad
  double achieved_stiffness = 0.0;  // N*m/rad
  double relative_error = 0.0;
  int candidates_evaluated = 0;
};

/// Searches integer beam counts and a width grid, refining beam length by
/// golden-section search for each. Among candidates within tolerance the
/// smallest footprint wins, then the fewest beams. Throws InfeasibleDesign
/// (carrying the nearest achievable stiffness) when no candidate meets the
/// tolerance.
SpringDesign design_spring(const Quantity& target_stiffness, const MaterialSpec& material,
                           const DesignConstraints& constraints, double topology_factor = 1.0);

}  // namespace flapkit::spring
