#include "flapkit/spring.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::spring {

using units::pi;

namespace {

void require(const Quantity& q, Dimension d, std::string_view what) {
  if (q.dimension() != d) {
    throw DimensionError(fmt::format("{}: expected {}, got {}", what, to_string(d), to_string(q.dimension())));
  }
}

double bank_stiffness(double factor, double modulus, int n, double length, double width, double thickness) {
  const double second_moment = width * thickness * thickness * thickness / 12.0;
  return factor * modulus * second_moment / (n * length);
}

// Minimises a unimodal function on [lo, hi].
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double rel_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 200 && (b - a) > rel_tol * std::abs(hi); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // The optimum may sit on a bound; golden section never evaluates the ends.
  double best = 0.5 * (a + b);
  double best_value = f(best);
  for (double x : {lo, hi}) {
    if (const double v = f(x); v < best_value) {
      best = x;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

void SpringSpec::validate() const {
  if (n_beams < 1) throw SpecError("spring n_beams must be at least 1");
  if (!(beam_length > 0.0) || !(beam_width > 0.0) || !(beam_thickness > 0.0)) {
    throw SpecError("spring beam dimensions must be positive");
  }
  if (!(topology_factor > 0.0)) throw SpecError("spring topology_factor must be positive");
  material.validate();
}

OscillatorSpec OscillatorSpec::from_point_mass(double stiffness, double point_mass, double arc_radius,
                                               double extra_inertia) {
  OscillatorSpec osc;
  osc.stiffness = stiffness;
  osc.point_mass = point_mass;
  osc.arc_radius = arc_radius;
  osc.inertia = point_mass * arc_radius * arc_radius + extra_inertia;
  return osc;
}

double OscillatorSpec::natural_angular_frequency() const { return std::sqrt(stiffness / inertia); }

void OscillatorSpec::validate() const {
  if (!(stiffness > 0.0) || !(inertia > 0.0)) throw SpecError("oscillator stiffness and inertia must be positive");
  if (point_mass < 0.0 || arc_radius < 0.0) throw SpecError("oscillator point mass and arc radius must be non-negative");
  if (inertia < point_mass_inertia() * (1.0 - 1e-12)) {
    throw SpecError("oscillator inertia is below the point-mass inertia m*r^2");
  }
  if (damping_ratio < 0.0) throw SpecError("oscillator damping_ratio must be non-negative");
}

Quantity required_stiffness(const Quantity& point_mass, const Quantity& arc_radius,
                            const Quantity& target_frequency) {
  require(point_mass, Dimension::mass, "required_stiffness point_mass");
  require(arc_radius, Dimension::length, "required_stiffness arc_radius");
  require(target_frequency, Dimension::frequency, "required_stiffness target_frequency");
  const double omega = 2.0 * pi * target_frequency.si();
  const Quantity inertia = point_mass * (arc_radius * arc_radius);
  return units::stiffness(inertia.si() * omega * omega);
}

Quantity resonance_frequency(const OscillatorSpec& osc) {
  osc.validate();
  return units::frequency(osc.natural_angular_frequency() / (2.0 * pi));
}

Quantity effective_inertia_from_resonance(const Quantity& stiffness, const Quantity& observed_frequency) {
  require(stiffness, Dimension::torsional_stiffness, "effective_inertia stiffness");
  require(observed_frequency, Dimension::frequency, "effective_inertia frequency");
  if (!(stiffness.si() > 0.0) || !(observed_frequency.si() > 0.0)) {
    throw SpecError("effective_inertia_from_resonance needs positive stiffness and frequency");
  }
  const double omega = 2.0 * pi * observed_frequency.si();
  return units::inertia(stiffness.si() / (omega * omega));
}

Quantity stiffness_from_resonance(const Quantity& inertia, const Quantity& observed_frequency) {
  require(inertia, Dimension::inertia, "stiffness_from_resonance inertia");
  require(observed_frequency, Dimension::frequency, "stiffness_from_resonance frequency");
  const double omega = 2.0 * pi * observed_frequency.si();
  return units::stiffness(inertia.si() * omega * omega);
}

Quantity beam_bank_stiffness(const SpringSpec& spec) {
  spec.validate();
  return units::stiffness(bank_stiffness(spec.topology_factor, spec.material.elastic_modulus, spec.n_beams,
                                         spec.beam_length, spec.beam_width, spec.beam_thickness));
}

double calibrate_topology_factor(const SpringSpec& spec, const Quantity& target) {
  require(target, Dimension::torsional_stiffness, "calibrate_topology_factor");
  SpringSpec unit = spec;
  unit.topology_factor = 1.0;
  return target.si() / beam_bank_stiffness(unit).si();
}

void DesignConstraints::validate() const {
  if (!(thickness > 0.0)) throw SpecError("design thickness must be positive");
  if (!(width_min > 0.0) || width_max < width_min) throw SpecError("design width bounds are invalid");
  if (!(length_min > 0.0) || length_max < length_min) throw SpecError("design length bounds are invalid");
  if (n_beams_min < 1 || n_beams_max < n_beams_min) throw SpecError("design n_beams bounds are invalid");
  if (width_steps < 1) throw SpecError("design width_steps must be at least 1");
  if (!(rel_tolerance > 0.0)) throw SpecError("design tolerance must be positive");
}

SpringDesign design_spring(const Quantity& target_stiffness, const MaterialSpec& material,
                           const DesignConstraints& c, double topology_factor) {
  require(target_stiffness, Dimension::torsional_stiffness, "design_spring target");
  c.validate();
  material.validate();
  const double target = target_stiffness.si();
  if (!(target > 0.0)) throw SpecError("design_spring target stiffness must be positive");

  constexpr double kTieTolerance = 1e-6;
  std::optional<SpringDesign> best;
  double nearest_k = std::numeric_limits<double>::quiet_NaN();
  double nearest_err = std::numeric_limits<double>::infinity();
  int evaluated = 0;

  for (int n = c.n_beams_min; n <= c.n_beams_max; ++n) {
    for (int wi = 0; wi < c.width_steps; ++wi) {
      const double width = c.width_steps == 1
                               ? c.width_min
                               : c.width_min + (c.width_max - c.width_min) * wi / (c.width_steps - 1);
      auto mismatch = [&](double length) {
        return std::abs(bank_stiffness(topology_factor, material.elastic_modulus, n, length, width, c.thickness) -
                        target) / target;
      };
      const double length = golden_section_min(mismatch, c.length_min, c.length_max, 1e-13);
      ++evaluated;
      const double k = bank_stiffness(topology_factor, material.elastic_modulus, n, length, width, c.thickness);
      const double err = std::abs(k - target) / target;
      if (err < nearest_err) {
        nearest_err = err;
        nearest_k = k;
      }
      if (err > c.rel_tolerance) continue;

      SpringDesign cand{{n, length, width, c.thickness, material, topology_factor}, target, k, err, 0};
      if (!best) {
        best = cand;
        continue;
      }
      const double fp = cand.spec.footprint();
      const double best_fp = best->spec.footprint();
      const bool smaller = fp < best_fp * (1.0 - kTieTolerance);
      const bool tied = !smaller && fp <= best_fp * (1.0 + kTieTolerance);
      if (smaller || (tied && n < best->spec.n_beams)) best = cand;
    }
  }

  if (!best) {
    throw InfeasibleDesign(
        fmt::format("no spring within {:.3g}% of {:.6g} N*m/rad inside the constraint box; nearest {:.6g} N*m/rad",
                    100.0 * c.rel_tolerance, target, nearest_k),
        nearest_k, nearest_k < target ? "widen beams, shorten beams or use fewer beams"
                                      : "narrow beams, lengthen beams or use more beams");
  }
  best->candidates_evaluated = evaluated;
  return *best;
}

}  // namespace flapkit::spring
