#include "flapkit/aero.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::aero {

using units::deg;
using units::pi;

namespace {

Coefficients raw_coefficients(double alpha, const CoefficientModel& m) {
  const double a = alpha / deg;
  return {m.cl_offset + m.cl_amplitude * std::sin((m.cl_rate * a - m.cl_phase_deg) * deg),
          m.cd_offset - m.cd_amplitude * std::cos((m.cd_rate * a - m.cd_phase_deg) * deg)};
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

void AeroConfig::validate() const {
  if (!(air_density > 0.0)) throw SpecError("aero air_density must be positive");
  if (n_blade_elements < 1) throw SpecError("aero n_blade_elements must be at least 1");
  if (raw_coefficients(0.0, coefficients).lift < 0.0) throw SpecError("aero CL(0) must be non-negative");
  for (int i = 0; i <= 90; ++i) {
    if (!(raw_coefficients(i * deg, coefficients).drag > 0.0)) {
      throw SpecError(fmt::format("aero CD must be positive; CD({}deg) is not", i));
    }
  }
}

Coefficients force_coefficients(double alpha, const AeroConfig& cfg) {
  double a = std::remainder(alpha, 2.0 * pi);  // (-pi, pi]
  double lift_sign = 1.0;
  if (a < 0.0) {
    a = -a;
    lift_sign = -lift_sign;
  }
  if (a > 0.5 * pi) {
    a = pi - a;
    lift_sign = -lift_sign;
  }
  const Coefficients c = raw_coefficients(a, cfg.coefficients);
  return {lift_sign * c.lift, c.drag};
}

double angle_of_attack(double stroke_rate, double pitch_angle) {
  return 0.5 * pi - pitch_angle * sign(stroke_rate);
}

Loads blade_element_loads(const AeroState& state, const wing::WingSpec& wing, const AeroConfig& cfg) {
  Loads out;
  const double s = sign(state.stroke_rate);
  if (!cfg.enabled || s == 0.0) return out;

  const double alpha = angle_of_attack(state.stroke_rate, state.pitch_angle);
  const Coefficients coeff = force_coefficients(alpha, cfg);
  const double normal_coeff = coeff.lift * std::cos(alpha) + coeff.drag * std::sin(alpha);
  const double chord = wing.mean_chord();
  const double dr = wing.length / cfg.n_blade_elements;

  for (int i = 0; i < cfg.n_blade_elements; ++i) {
    const double r = wing.root_offset + (i + 0.5) * dr;
    const double v = state.stroke_rate * r;
    const double q = 0.5 * cfg.air_density * chord * dr * v * v;
    const double drag = q * coeff.drag;
    const double normal = q * normal_coeff;
    out.lift += q * coeff.lift;
    out.drag += s * drag;
    out.stroke_torque += s * drag * r;
    out.normal_force += normal;
    out.pitch_torque += s * normal * wing.cop_distance;
  }
  return out;
}

double pressure_force(double stroke_rate, const wing::WingSpec& wing, const AeroConfig& cfg) {
  const double chord = wing.mean_chord();
  const double dr = wing.length / cfg.n_blade_elements;
  double total = 0.0;
  for (int i = 0; i < cfg.n_blade_elements; ++i) {
    const double v = stroke_rate * (wing.root_offset + (i + 0.5) * dr);
    total += 0.5 * cfg.air_density * chord * dr * v * v;
  }
  return total;
}

CycleAverage cycle_average(std::span<const LoadSample> samples, double dt, double period) {
  if (!(dt > 0.0) || !(period > 0.0)) throw std::invalid_argument("cycle_average: dt and period must be positive");
  CycleAverage avg;
  if (samples.empty()) return avg;
  const double cycles = samples.size() * dt / period;
  if (std::abs(cycles - std::round(cycles)) > 1e-6 || std::round(cycles) < 1.0) {
    throw std::invalid_argument(
        fmt::format("cycle_average: window of {:.6g} periods is not a whole number of cycles", cycles));
  }
  for (const auto& s : samples) {
    avg.mean_lift += s.loads.lift;
    avg.mean_aero_power += std::abs(s.loads.stroke_torque * s.stroke_rate);
  }
  avg.mean_lift /= samples.size();
  avg.mean_aero_power /= samples.size();
  return avg;
}

}  // namespace flapkit::aero
