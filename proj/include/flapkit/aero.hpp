#pragma once

// Translational quasi-steady blade-element aerodynamics.
//
// Conventions. The wing hangs from its leading edge; at zero pitch the chord
// is perpendicular to the stroke velocity. Pitch psi is positive when the
// trailing edge lags behind motion in the +stroke direction, so the angle of
// attack is
//
//     alpha = 90deg - psi * sign(stroke_rate)
//
// which lies in [0, 180deg] while |psi| <= 90deg. Coefficients are folded
// onto [0, 90deg]: CL(-a) = -CL(a), CL(180deg - a) = -CL(a); CD is even under
// both. Lift is positive upward, drag is reported as the tangential force
// opposing +stroke motion (it flips sign with the stroke direction), and the
// pitch torque always pushes the trailing edge downwind.
//
// Rotational lift and added mass are not modelled.

#include <span>
#include <vector>

#include "flapkit/wing.hpp"

namespace flapkit::aero {

/// CL = cl_offset + cl_amplitude * sin(cl_rate * a - cl_phase)
/// CD = cd_offset - cd_amplitude * cos(cd_rate * a - cd_phase), angles in degrees.
struct CoefficientModel {
  double cl_offset = 0.225;
  double cl_amplitude = 1.58;
  double cl_rate = 2.13;
  double cl_phase_deg = 7.2;
  double cd_offset = 1.92;
  double cd_amplitude = 1.55;
  double cd_rate = 2.04;
  double cd_phase_deg = 9.82;
};

struct AeroConfig {
  double air_density = 1.225;  // kg/m^3
  CoefficientModel coefficients;
  int n_blade_elements = 20;
  bool enabled = true;

  void validate() const;
};

struct AeroState {
  double stroke_angle = 0.0;
  double stroke_rate = 0.0;
  double pitch_angle = 0.0;
  double pitch_rate = 0.0;
};

struct Coefficients {
  double lift = 0.0;
  double drag = 0.0;
};

struct Loads {
  double lift = 0.0;           // N, upward
  double drag = 0.0;           // N, opposing +stroke motion
  double stroke_torque = 0.0;  // N*m, opposing +stroke motion
  double pitch_torque = 0.0;   // N*m, about the leading edge
  double normal_force = 0.0;   // N, magnitude
};

/// Folded translational coefficients at angle of attack `alpha` (radians).
Coefficients force_coefficients(double alpha, const AeroConfig& cfg);

/// Geometric angle of attack for the stated convention. Zero stroke rate
/// returns 90deg.
double angle_of_attack(double stroke_rate, double pitch_angle);

/// Sums midpoint blade elements over the span. All loads vanish when the
/// stroke rate is zero or the model is disabled.
Loads blade_element_loads(const AeroState& state, const wing::WingSpec& wing, const AeroConfig& cfg);

/// Sum over blade elements of 0.5 * rho * c * dr * v^2, N: the force a unit
/// coefficient would produce.
double pressure_force(double stroke_rate, const wing::WingSpec& wing, const AeroConfig& cfg);

struct LoadSample {
  Loads loads;
  double stroke_rate = 0.0;
};

struct CycleAverage {
  double mean_lift = 0.0;        // N
  double mean_aero_power = 0.0;  // W
};

/// Averages uniformly spaced samples covering a whole number of periods;
/// mean aero power is the mean of |stroke_torque * stroke_rate|. Throws
/// std::invalid_argument when the window is not an integer number of cycles.
CycleAverage cycle_average(std::span<const LoadSample> samples, double dt, double period);

}  // namespace flapkit::aero
