#include <gtest/gtest.h>

#include <cmath>

#include "flapkit/actuator.hpp"
#include "flapkit/calibration.hpp"
#include "support.hpp"

using namespace flapkit;
using namespace flapkit::actuator;
using units::deg;
using units::pi;

namespace {

MagnetSpec paper_magnet() {
  return {0.5e-3, 0.3e-3, MaterialDatabase::defaults().get("ndfeb_n52")};
}

CoilSpec paper_coil() {
  return {25e-6, 2, 14, 0.45e-3, 0.45e-3, MaterialDatabase::defaults().get("copper")};
}

// Independent oracle: one circumference per turn at the layer's mean diameter.
double wire_length_oracle(const CoilSpec& c) {
  double total = 0.0;
  for (int layer = 0; layer < c.layers; ++layer) {
    const double mean_d = c.inner_diameter + (2 * layer + 1) * c.wire_diameter;
    for (int turn = 0; turn < c.turns_per_layer; ++turn) total += pi * mean_d;
  }
  return total;
}

DriveSignal square(double v) { return {Waveform::square, v, 132.3}; }

}  // namespace

TEST(MagnetMass, PaperMagnet) {
  // pi * (0.15 mm)^2 * 0.5 mm * 7500 kg/m^3 = 0.26507 mg
  EXPECT_NEAR(convert(magnet_mass(paper_magnet()), "mg"), 0.265072, 1e-5);
  EXPECT_NEAR(magnet_mass(paper_magnet()).si() / 0.26e-6, 1.0, 0.03);
}

TEST(MagnetMass, DegenerateAndLinear) {
  MagnetSpec m = paper_magnet();
  m.diameter = 1e-12;
  EXPECT_LT(convert(magnet_mass(m), "mg"), 1e-12);
  MagnetSpec dense = paper_magnet();
  dense.material.density *= 2.0;
  EXPECT_NEAR(convert(magnet_mass(dense), "mg"), 0.530144, 1e-5);
}

TEST(CoilWireLength, MatchesSummationOracle) {
  const CoilSpec c = paper_coil();
  EXPECT_NEAR(coil_wire_length(c).si(), wire_length_oracle(c), 1e-15);
  EXPECT_NEAR(convert(coil_wire_length(c), "mm"), 43.982297, 1e-5);
}

TEST(CoilWireLength, SingleTurnAndLinearity) {
  CoilSpec one{1e-12, 1, 1, 1e-3, 1e-3, MaterialDatabase::defaults().get("copper")};
  EXPECT_NEAR(convert(coil_wire_length(one), "mm"), pi, 1e-8);
  CoilSpec c = paper_coil();
  const double base = coil_wire_length(c).si();
  c.turns_per_layer *= 2;
  c.height = 1e-3;
  EXPECT_NEAR(coil_wire_length(c).si(), 2.0 * base, 1e-15);
}

TEST(CoilResistance, PaperCoil) {
  const double r = coil_resistance(paper_coil()).si();
  EXPECT_NEAR(r / 1.5, 1.0, 0.10);
  EXPECT_NEAR(r, 1.68e-8 * wire_length_oracle(paper_coil()) / (pi * 12.5e-6 * 12.5e-6), 1e-12);
}

TEST(CoilResistance, AlgebraicConsistency) {
  const CoilSpec c = paper_coil();
  const double area = pi * std::pow(c.wire_diameter / 2.0, 2);
  const double back = coil_resistance(c).si() * area / *c.material.resistivity;
  EXPECT_NEAR(back / coil_wire_length(c).si(), 1.0, 1e-12);
}

TEST(CoilResistance, EdgeCases) {
  CoilSpec c = paper_coil();
  c.turns_per_layer = 0;
  EXPECT_EQ(coil_resistance(c).si(), 0.0);

  // Halving the wire diameter at fixed wire length quadruples resistance.
  CoilSpec thick{40e-6, 1, 1, 1e-3, 1e-3, MaterialDatabase::defaults().get("copper")};
  CoilSpec thin = thick;
  thin.wire_diameter = 20e-6;
  thin.inner_diameter = thick.inner_diameter + 20e-6;  // same mean diameter
  EXPECT_NEAR(coil_wire_length(thin).si(), coil_wire_length(thick).si(), 1e-15);
  EXPECT_NEAR(coil_resistance(thin).si() / coil_resistance(thick).si(), 4.0, 1e-12);

  CoilSpec insulator = paper_coil();
  insulator.material = MaterialDatabase::defaults().get("polyester");
  EXPECT_THROW(coil_resistance(insulator), SpecError);
}

TEST(CoilMass, PaperCoilAndScaling) {
  const CoilSpec c = paper_coil();
  const double oracle = wire_length_oracle(c) * pi * 12.5e-6 * 12.5e-6 * 8960.0;
  EXPECT_NEAR(coil_mass(c).si(), oracle, 1e-18);
  EXPECT_NEAR(convert(coil_mass(c), "mg"), 0.19, 0.01);

  CoilSpec none = c;
  none.turns_per_layer = 0;
  EXPECT_EQ(coil_mass(none).si(), 0.0);
  CoilSpec more = c;
  more.layers = 4;
  EXPECT_GT(coil_mass(more).si(), 2.0 * coil_mass(c).si());  // outer layers are longer
}

TEST(CoilSpec, HeightMustHoldTurns) {
  CoilSpec c = paper_coil();
  c.height = 0.3e-3;  // 14 * 25 um = 0.35 mm
  EXPECT_THROW(c.validate(), SpecError);
}

TEST(Monotonicity, MassesGrowWithGeometry) {
  const double m0 = magnet_mass(paper_magnet()).si();
  for (double s : {1.01, 1.5, 2.0}) {
    MagnetSpec h = paper_magnet();
    h.height *= s;
    MagnetSpec d = paper_magnet();
    d.diameter *= s;
    EXPECT_GT(magnet_mass(h).si(), m0);
    EXPECT_GT(magnet_mass(d).si(), m0);
    CoilSpec w = paper_coil();
    w.wire_diameter *= s;
    w.height = 1e-3;
    CoilSpec id = paper_coil();
    id.inner_diameter *= s;
    EXPECT_GT(coil_mass(w).si(), coil_mass(paper_coil()).si());
    EXPECT_GT(coil_mass(id).si(), coil_mass(paper_coil()).si());
  }
}

TEST(JoulePower, Examples) {
  EXPECT_NEAR(convert(joule_power(square(0.07), units::resistance(1.5)), "mW"), 3.26667, 1e-4);
  EXPECT_NEAR(joule_power(square(0.07), units::resistance(1.5)).si() / 3.3e-3, 1.0, 0.02);
  EXPECT_EQ(joule_power(square(0.0), units::resistance(1.5)).si(), 0.0);
  EXPECT_NEAR(convert(joule_power(square(0.14), units::resistance(1.5)), "mW"), 13.0667, 1e-3);
  EXPECT_DOUBLE_EQ(joule_power(square(-0.07), units::resistance(1.5)).si(),
                   joule_power(square(0.07), units::resistance(1.5)).si());
  DriveSignal sine{Waveform::sine, 0.07, 132.3};
  EXPECT_NEAR(joule_power(sine, units::resistance(1.5)).si(), 0.5 * 0.0049 / 1.5, 1e-15);
}

TEST(DriveTorque, Examples) {
  const auto r = units::resistance(1.5);
  const DriveSignal s = square(0.07);
  const double t_pos = 0.25 / s.frequency;
  const double t_neg = 0.75 / s.frequency;
  EXPECT_NEAR(drive_torque(s, {1e-5}, r, t_pos).si(), 4.6667e-7, 1e-11);
  EXPECT_NEAR(drive_torque(s, {1e-5}, r, t_neg).si(), -4.6667e-7, 1e-11);
  EXPECT_EQ(drive_torque(square(0.0), {1e-5}, r, t_pos).si(), 0.0);
  EXPECT_NEAR(drive_torque(square(0.14), {1e-5}, r, t_pos).si(), 2.0 * drive_torque(s, {1e-5}, r, t_pos).si(),
              1e-20);
}

TEST(DriveTorque, ProfileHook) {
  const auto r = units::resistance(1.5);
  const DriveSignal s = square(0.07);
  const double t = 0.25 / s.frequency;
  const TorqueProfile half = [](double phi) { return std::cos(phi); };
  EXPECT_NEAR(drive_torque(s, {1e-5}, r, t, half, units::pi / 3.0).si(), 0.5 * drive_torque(s, {1e-5}, r, t).si(),
              1e-20);
}

TEST(DriveSignal, WaveformValues) {
  const DriveSignal s = square(0.07);
  EXPECT_DOUBLE_EQ(s.voltage_at(0.1 * s.period()), 0.07);
  EXPECT_DOUBLE_EQ(s.voltage_at(0.6 * s.period()), -0.07);
  EXPECT_DOUBLE_EQ(s.voltage_at(3.1 * s.period()), 0.07);
  DriveSignal sine{Waveform::sine, 0.07, 100.0};
  EXPECT_NEAR(sine.voltage_at(0.0025), 0.07, 1e-15);
  EXPECT_DOUBLE_EQ(s.rms(), 0.07);
  DriveSignal bad{Waveform::square, 0.07, 0.0};
  EXPECT_THROW(bad.validate(), SpecError);
}

TEST(Calibration, PaperConfigFixedPoint) {
  const auto& cfg = test_support::paper_config();
  auto sim = cfg.sim_config();
  const auto cal = calibrate_torque_constant(45.0 * deg, sim);
  EXPECT_GT(cal.k_t.k_t, 0.0);
  sim.k_t = cal.k_t;
  const auto steady = dynamics::steady_state(sim, {1e-4, 10, 20, 3000});
  EXPECT_NEAR(steady.amplitude / (45.0 * deg), 1.0, 0.01);
}

TEST(Calibration, LinearRegimeScaling) {
  auto sim = dynamics::linearized(test_support::paper_config().sim_config());
  const auto a = calibrate_torque_constant(2.0 * deg, sim);
  const auto b = calibrate_torque_constant(4.0 * deg, sim);
  EXPECT_NEAR(b.k_t.k_t / a.k_t.k_t, 2.0, 0.01);
}

TEST(Calibration, VanishingTarget) {
  auto sim = dynamics::linearized(test_support::paper_config().sim_config());
  EXPECT_THROW(calibrate_torque_constant(0.0, sim), std::invalid_argument);
  const auto tiny = calibrate_torque_constant(1e-3 * deg, sim);
  const auto small = calibrate_torque_constant(1.0 * deg, sim);
  EXPECT_NEAR(tiny.k_t.k_t / small.k_t.k_t, 1e-3, 2e-5);
}
