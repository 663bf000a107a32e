#include "flapkit/actuator.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::actuator {

using units::pi;

namespace {

double wire_area(double d) { return pi * 0.25 * d * d; }

void require_resistance(const Quantity& r) {
  if (r.dimension() != Dimension::resistance) {
    throw DimensionError(fmt::format("expected resistance, got {}", to_string(r.dimension())));
  }
  if (!(r.si() > 0.0)) throw SpecError("resistance must be positive");
}

}  // namespace

void MagnetSpec::validate() const {
  if (!(height > 0.0) || !(diameter > 0.0)) throw SpecError("magnet height and diameter must be positive");
  material.validate();
}

void CoilSpec::validate() const {
  if (!(wire_diameter > 0.0)) throw SpecError("coil wire_diameter must be positive");
  if (layers < 0 || turns_per_layer < 0) throw SpecError("coil layer and turn counts must be non-negative");
  if (!(inner_diameter > 0.0) || !(height > 0.0)) throw SpecError("coil inner_diameter and height must be positive");
  if (height < turns_per_layer * wire_diameter * (1.0 - 1e-9)) {
    throw SpecError(fmt::format("coil height {:.4g} m cannot hold {} turns of {:.4g} m wire", height,
                                turns_per_layer, wire_diameter));
  }
  material.validate();
}

double DriveSignal::voltage_at(double t) const {
  switch (waveform) {
    case Waveform::square: {
      const double cycles = frequency * t;
      const double phase = cycles - std::floor(cycles);
      return phase < 0.5 ? amplitude : -amplitude;
    }
    case Waveform::sine:
      return amplitude * std::sin(2.0 * pi * frequency * t);
  }
  return 0.0;
}

double DriveSignal::rms() const {
  return waveform == Waveform::square ? amplitude : amplitude / std::sqrt(2.0);
}

void DriveSignal::validate() const {
  if (!(amplitude >= 0.0)) throw SpecError("drive amplitude must be non-negative");
  if (!(frequency > 0.0)) throw SpecError("drive frequency must be positive");
}

Quantity magnet_mass(const MagnetSpec& spec) {
  spec.validate();
  return units::mass(wire_area(spec.diameter) * spec.height * spec.material.density);
}

Quantity coil_wire_length(const CoilSpec& spec) {
  spec.validate();
  double length = 0.0;
  for (int layer = 0; layer < spec.layers; ++layer) {
    const double mean_diameter = spec.inner_diameter + (2 * layer + 1) * spec.wire_diameter;
    length += spec.turns_per_layer * pi * mean_diameter;
  }
  return units::length(length);
}

Quantity coil_resistance(const CoilSpec& spec) {
  if (!spec.material.resistivity) {
    throw SpecError(fmt::format("coil material '{}' has no resistivity", spec.material.name));
  }
  const double length = coil_wire_length(spec).si();
  return units::resistance(*spec.material.resistivity * length / wire_area(spec.wire_diameter));
}

Quantity coil_mass(const CoilSpec& spec) {
  const double length = coil_wire_length(spec).si();
  return units::mass(length * wire_area(spec.wire_diameter) * spec.material.density);
}

Quantity magnet_coil_clearance(const MagnetSpec& magnet, const CoilSpec& coil) {
  return units::length(0.5 * (coil.inner_diameter - magnet.diameter));
}

Quantity joule_power(const DriveSignal& signal, const Quantity& resistance) {
  require_resistance(resistance);
  const double v = signal.rms();
  return units::power(v * v / resistance.si());
}

Quantity drive_torque(const DriveSignal& signal, TorqueConstant k_t, const Quantity& resistance,
                      double t, const TorqueProfile& profile, double stroke_angle) {
  require_resistance(resistance);
  const double weight = profile ? profile(stroke_angle) : 1.0;
  return units::torque(weight * k_t.k_t * signal.voltage_at(t) / resistance.si());
}

}  // namespace flapkit::actuator
