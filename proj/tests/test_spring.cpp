#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flapkit/spring.hpp"

using namespace flapkit;
using namespace flapkit::spring;
using units::pi;

namespace {

const Quantity kMagnet = units::mass(0.26e-6);
const Quantity kArc = units::length(1.4e-3);

double bare_inertia() { return 0.26e-6 * 1.4e-3 * 1.4e-3; }

SpringSpec table_spring() {
  return {16, 1e-3, 0.1e-3, 12.7e-6, MaterialDatabase::defaults().get("stainless_steel"), 1.0};
}

DesignConstraints table_box() {
  DesignConstraints c;
  c.thickness = 12.7e-6;
  c.width_min = c.width_max = 0.1e-3;
  c.width_steps = 1;
  c.length_min = 0.2e-3;
  c.length_max = 1.5e-3;
  c.n_beams_min = 1;
  c.n_beams_max = 32;
  return c;
}

}  // namespace

TEST(RequiredStiffness, PaperSizing) {
  const Quantity k = required_stiffness(kMagnet, kArc, units::frequency(130.0));
  EXPECT_EQ(k.dimension(), Dimension::torsional_stiffness);
  // 0.26e-6 * (1.4e-3)^2 * (2 pi 130)^2
  EXPECT_NEAR(convert(k, "uNm"), 0.3399976, 1e-6);
  EXPECT_NEAR(convert(k, "uNm") / 0.34, 1.0, 0.015);
}

TEST(RequiredStiffness, ZeroAndQuadratic) {
  EXPECT_EQ(required_stiffness(kMagnet, kArc, units::frequency(0.0)).si(), 0.0);
  const double k130 = required_stiffness(kMagnet, kArc, units::frequency(130.0)).si();
  const double k260 = required_stiffness(kMagnet, kArc, units::frequency(260.0)).si();
  EXPECT_NEAR(k260 / k130, 4.0, 1e-12);
  EXPECT_NEAR(k260 / 1e-6, 1.36, 0.01);
}

TEST(ResonanceFrequency, Examples) {
  const double k034 = required_stiffness(kMagnet, kArc, units::frequency(130.0)).si();
  EXPECT_NEAR(resonance_frequency(OscillatorSpec::from_point_mass(k034, 0.26e-6, 1.4e-3)).si(), 130.0, 1e-9);
  const double f08 = resonance_frequency(OscillatorSpec::from_point_mass(0.8e-6, 0.26e-6, 1.4e-3)).si();
  EXPECT_NEAR(f08, std::sqrt(0.8e-6 / bare_inertia()) / (2 * pi), 1e-9);
  EXPECT_NEAR(f08, 199.4, 0.05);
  const double f4 = resonance_frequency(OscillatorSpec::from_point_mass(3.2e-6, 0.26e-6, 1.4e-3)).si();
  EXPECT_NEAR(f4 / f08, 2.0, 1e-12);
}

TEST(ResonanceFrequency, ExactInverseProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> m(1e-8, 1e-5), r(1e-4, 1e-2), f(10.0, 1000.0);
  for (int i = 0; i < 200; ++i) {
    const double mm = m(rng), rr = r(rng), ff = f(rng);
    const double k = required_stiffness(units::mass(mm), units::length(rr), units::frequency(ff)).si();
    const double back = resonance_frequency(OscillatorSpec::from_point_mass(k, mm, rr)).si();
    ASSERT_NEAR(back / ff, 1.0, 1e-9);
  }
}

TEST(EffectiveInertia, Examples) {
  const double i = effective_inertia_from_resonance(units::stiffness(0.8e-6), units::frequency(132.3)).si();
  EXPECT_NEAR(i, 0.8e-6 / std::pow(2 * pi * 132.3, 2), 1e-24);
  EXPECT_NEAR(i / 1.158e-12, 1.0, 1e-3);
  EXPECT_NEAR(i / bare_inertia(), 2.27, 0.01);

  const Quantity k034 = required_stiffness(kMagnet, kArc, units::frequency(130.0));
  EXPECT_NEAR(effective_inertia_from_resonance(k034, units::frequency(130.0)).si() / bare_inertia(), 1.0, 1e-12);

  const double i2 = effective_inertia_from_resonance(units::stiffness(0.8e-6), units::frequency(264.6)).si();
  EXPECT_NEAR(i / i2, 4.0, 1e-12);
}

TEST(StiffnessFromResonance, InverseOfInertia) {
  const Quantity i = units::inertia(bare_inertia());
  const double k = stiffness_from_resonance(i, units::frequency(132.3)).si();
  EXPECT_NEAR(resonance_frequency({k, bare_inertia(), 1.4e-3, 0.26e-6}).si(), 132.3, 1e-9);
}

TEST(BeamBank, TableSpec) {
  const double k = beam_bank_stiffness(table_spring()).si();
  // 193e9 * 0.1e-3 * (12.7e-6)^3 / 12 / (16 * 1e-3)
  const double oracle = 193e9 * 0.1e-3 * std::pow(12.7e-6, 3) / 12.0 / (16 * 1e-3);
  EXPECT_NEAR(k, oracle, 1e-18);
  EXPECT_NEAR(k / 1e-6, 0.21, 0.01);
  EXPECT_NEAR(std::log10(0.8e-6 / k), 0.0, 1.0);  // same order as the 0.8 uNm design
}

TEST(BeamBank, ScalingLaws) {
  SpringSpec s = table_spring();
  const double k0 = beam_bank_stiffness(s).si();
  s.beam_thickness *= 2.0;
  EXPECT_NEAR(beam_bank_stiffness(s).si() / k0, 8.0, 1e-12);
  SpringSpec many = table_spring();
  many.n_beams = 1'000'000;
  EXPECT_NEAR(beam_bank_stiffness(many).si() / k0, 16.0 / 1e6, 1e-12);
}

TEST(BeamBank, MonotoneProperty) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> up(1.01, 3.0);
  const double k0 = beam_bank_stiffness(table_spring()).si();
  for (int i = 0; i < 50; ++i) {
    const double s = up(rng);
    SpringSpec w = table_spring(), t = table_spring(), l = table_spring(), n = table_spring();
    w.beam_width *= s;
    t.beam_thickness *= s;
    l.beam_length *= s;
    n.n_beams = static_cast<int>(std::ceil(n.n_beams * s));
    ASSERT_GT(beam_bank_stiffness(w).si(), k0);
    ASSERT_GT(beam_bank_stiffness(t).si(), k0);
    ASSERT_LT(beam_bank_stiffness(l).si(), k0);
    ASSERT_LT(beam_bank_stiffness(n).si(), k0);
  }
}

TEST(BeamBank, TopologyCalibration) {
  const double f = calibrate_topology_factor(table_spring(), units::stiffness(0.8e-6));
  EXPECT_NEAR(f, 3.9, 0.05);
  SpringSpec s = table_spring();
  s.topology_factor = f;
  EXPECT_NEAR(beam_bank_stiffness(s).si(), 0.8e-6, 1e-18);
}

TEST(DesignSpring, RecoversTableSpec) {
  // In the series model only n * l matters, so every bank with n * l = 16 mm
  // has the same footprint; capping the length at 1 mm makes 16 x 1 mm the
  // fewest-beam solution.
  const double target = beam_bank_stiffness(table_spring()).si();
  auto box = table_box();
  box.length_max = 1e-3;
  const auto d = design_spring(units::stiffness(target), table_spring().material, box);
  EXPECT_EQ(d.spec.n_beams, 16);
  EXPECT_NEAR(d.spec.beam_length, 1e-3, 0.02e-3);
  EXPECT_LE(std::abs(d.relative_error), 0.02);
}

TEST(DesignSpring, FreeLengthPrefersFewerBeams) {
  const double target = beam_bank_stiffness(table_spring()).si();
  const auto d = design_spring(units::stiffness(target), table_spring().material, table_box());
  EXPECT_NEAR(d.spec.n_beams * d.spec.beam_length / 16e-3, 1.0, 0.02);
  EXPECT_EQ(d.spec.n_beams, static_cast<int>(std::ceil(16e-3 / table_box().length_max * 0.98)));
  EXPECT_LE(d.spec.footprint(), table_spring().footprint() * 1.02);
}

TEST(DesignSpring, ForwardVerifiesProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logk(std::log(0.1e-6), std::log(2e-6));
  for (int i = 0; i < 20; ++i) {
    const double target = std::exp(logk(rng));
    const auto d = design_spring(units::stiffness(target), table_spring().material, table_box());
    ASSERT_NEAR(beam_bank_stiffness(d.spec).si() / target, 1.0, 0.02);
    ASSERT_NEAR(d.achieved_stiffness, beam_bank_stiffness(d.spec).si(), 1e-20);
    ASSERT_GE(d.spec.beam_length, table_box().length_min);
    ASSERT_LE(d.spec.beam_length, table_box().length_max);
  }
}

TEST(DesignSpring, TopologyFactorIsApplied) {
  const auto d = design_spring(units::stiffness(0.8e-6), table_spring().material, table_box(), 3.886);
  EXPECT_DOUBLE_EQ(d.spec.topology_factor, 3.886);
  EXPECT_NEAR(beam_bank_stiffness(d.spec).si() / 0.8e-6, 1.0, 0.02);
}

TEST(DesignSpring, InfeasibleReportsNearest) {
  const auto box = table_box();
  try {
    design_spring(units::stiffness(1000.0 * 0.8e-6), table_spring().material, box);
    FAIL() << "expected InfeasibleDesign";
  } catch (const InfeasibleDesign& e) {
    SpringSpec stiffest = table_spring();
    stiffest.n_beams = box.n_beams_min;
    stiffest.beam_length = box.length_min;
    EXPECT_NEAR(e.nearest() / beam_bank_stiffness(stiffest).si(), 1.0, 1e-9);
  }
  EXPECT_THROW(design_spring(units::stiffness(0.8e-6 / 1e4), table_spring().material, box), InfeasibleDesign);
}
