#pragma once

// Magnet/coil actuator model: geometry to mass, resistance, drive torque and
// resistive loss. Coil inductance and back-EMF are neglected, so the drive
// current is V(t)/R and the torque is k_t times that current.

#include <functional>

#include "flapkit/materials.hpp"
#include "flapkit/units.hpp"

namespace flapkit::actuator {

/// Cylindrical permanent magnet. Lengths in metres.
struct MagnetSpec {
  double height = 0.0;
  double diameter = 0.0;
  MaterialSpec material;

  void validate() const;
};

/// Layered solenoid winding. Lengths in metres.
struct CoilSpec {
  double wire_diameter = 0.0;
  int layers = 0;
  int turns_per_layer = 0;
  double inner_diameter = 0.0;
  double height = 0.0;
  MaterialSpec material;

  int total_windings() const { return layers * turns_per_layer; }
  void validate() const;
};

enum class Waveform { square, sine };

struct DriveSignal {
  Waveform waveform = Waveform::square;
  double amplitude = 0.0;  // V
  double frequency = 0.0;  // Hz

  /// Instantaneous voltage. The square wave is +amplitude over the first
  /// half of each period and -amplitude over the second.
  double voltage_at(double t) const;
  double rms() const;
  double period() const { return 1.0 / frequency; }
  void validate() const;
};

/// Torque per ampere of coil current, N*m/A.
struct TorqueConstant {
  double k_t = 0.0;
};

/// Optional weighting of the torque constant by stroke angle. An empty
/// function means the coupling is angle-independent.
using TorqueProfile = std::function<double(double stroke_angle)>;

Quantity magnet_mass(const MagnetSpec& spec);

/// Sum over layers of turns * pi * mean layer diameter, where layer i has
/// mean diameter inner_diameter + (2i+1) * wire_diameter.
Quantity coil_wire_length(const CoilSpec& spec);

/// Throws SpecError if the coil material has no resistivity.
Quantity coil_resistance(const CoilSpec& spec);

/// Bare conductor mass; insulation and solder are not modelled.
Quantity coil_mass(const CoilSpec& spec);

/// Radial gap between magnet and coil bore when concentric.
Quantity magnet_coil_clearance(const MagnetSpec& magnet, const CoilSpec& coil);

/// V_rms^2 / R.
Quantity joule_power(const DriveSignal& signal, const Quantity& resistance);

/// k_t * V(t) / R, optionally weighted by `profile(stroke_angle)`.
Quantity drive_torque(const DriveSignal& signal, TorqueConstant k_t, const Quantity& resistance,
                      double t, const TorqueProfile& profile = {}, double stroke_angle = 0.0);

}  // namespace flapkit::actuator
