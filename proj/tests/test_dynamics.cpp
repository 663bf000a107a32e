#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "flapkit/calibration.hpp"
#include "flapkit/dynamics.hpp"
#include "support.hpp"

using namespace flapkit;
using namespace flapkit::dynamics;
using units::deg;
using units::pi;

namespace {

// Stop-free, aero-free oscillator with k = 0.34 uNm and the bare magnet inertia.
SimConfig bare_linear(double frequency = 130.0, double zeta = 0.01) {
  SimConfig cfg = linearized(test_support::paper_config().sim_config());
  cfg.oscillator = spring::OscillatorSpec::from_point_mass(0.34e-6, 0.26e-6, 1.4e-3);
  cfg.oscillator.damping_ratio = zeta;
  cfg.k_t.k_t = 1e-7;
  cfg = retuned(cfg, frequency);
  return cfg;
}

// Closed-form response of I x'' + c x' + k x = F sin(w t) from rest.
struct DrivenOscillator {
  double k, inertia, zeta, force, omega;

  double operator()(double t) const {
    const double wn = std::sqrt(k / inertia);
    const double c = 2.0 * zeta * std::sqrt(k * inertia);
    const double d = k - inertia * omega * omega;
    const double e = c * omega;
    const double a = force * d / (d * d + e * e);
    const double b = -force * e / (d * d + e * e);
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double c1 = -b;
    const double c2 = (-a * omega + zeta * wn * c1) / wd;
    return a * std::sin(omega * t) + b * std::cos(omega * t) +
           std::exp(-zeta * wn * t) * (c1 * std::cos(wd * t) + c2 * std::sin(wd * t));
  }
  double steady_amplitude() const {
    const double c = 2.0 * zeta * std::sqrt(k * inertia);
    const double d = k - inertia * omega * omega;
    return force / std::hypot(d, c * omega);
  }
};

SimConfig calibrated_paper() {
  static const SimConfig cfg = [] {
    SimConfig c = test_support::paper_config().sim_config();
    c.k_t = actuator::calibrate_torque_constant(45.0 * deg, c).k_t;
    return c;
  }();
  return cfg;
}

double rms_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(Step, EquilibriumStaysAtRest) {
  SimConfig cfg = test_support::paper_config().sim_config();
  cfg.k_t.k_t = 0.0;
  SimState s;
  for (int i = 0; i < 2000; ++i) s = step(s, cfg);
  EXPECT_EQ(s.stroke_angle, 0.0);
  EXPECT_EQ(s.stroke_rate, 0.0);
  EXPECT_EQ(s.pitch_angle, 0.0);
  EXPECT_EQ(s.pitch_rate, 0.0);
}

TEST(Step, ProjectsPitchOntoStop) {
  SimConfig cfg = test_support::paper_config().sim_config();
  cfg.k_t.k_t = 1e-7;
  SimState s;
  s.pitch_angle = 40.0 * deg;
  s.pitch_rate = 50.0;
  const SimState next = step(s, cfg);
  EXPECT_LE(next.pitch_angle, cfg.stops.positive_limit + 1e-12);
  EXPECT_LE(next.pitch_rate, 0.0);
  s.pitch_angle = -60.0 * deg;
  s.pitch_rate = -50.0;
  EXPECT_GE(step(s, cfg).pitch_angle, -cfg.stops.negative_limit - 1e-12);
}

TEST(Step, RestitutionReflectsRate) {
  SimConfig cfg = test_support::paper_config().sim_config();
  cfg.stops = wing::PitchStopSpec::symmetric(30.0 * deg, 0.5);
  SimState s;
  s.pitch_angle = 30.0 * deg - 1e-9;
  s.pitch_rate = 100.0;
  const SimState next = step(s, cfg);
  EXPECT_DOUBLE_EQ(next.pitch_angle, 30.0 * deg);
  EXPECT_LT(next.pitch_rate, 0.0);
}

TEST(Step, GuardRaisesNumericalFailure) {
  SimConfig cfg = bare_linear();
  cfg.k_t.k_t = 1e-3;
  try {
    simulate(cfg, 20);
    FAIL() << "expected NumericalFailure";
  } catch (const NumericalFailure& e) {
    EXPECT_LE(std::abs(e.last_valid().stroke_angle), 0.5 * pi);
    EXPECT_GT(e.last_valid().time, 0.0);
  }
}

TEST(SimConfig, RejectsCoarseStep) {
  SimConfig cfg = bare_linear();
  cfg.dt = 2.0 / (1000.0 * cfg.drive.frequency);
  EXPECT_THROW(cfg.validate(), SpecError);
  EXPECT_THROW(simulate(bare_linear(), 0), std::invalid_argument);
}

TEST(SimConfig, WholeStepsPerCycle) {
  SimConfig cfg = bare_linear();
  cfg.drive.frequency = 132.3;
  cfg.dt = 7.5e-6;
  EXPECT_EQ(cfg.steps_per_cycle(), 1008);
  EXPECT_NEAR(cfg.effective_dt() * cfg.steps_per_cycle(), 1.0 / 132.3, 1e-15);
  EXPECT_LE(cfg.effective_dt(), cfg.dt);
}

TEST(Rk4, MatchesDrivenOscillatorOracle) {
  SimConfig cfg = bare_linear(120.0, 0.02);
  cfg.drive.waveform = actuator::Waveform::sine;
  const DrivenOscillator exact{cfg.oscillator.stiffness, cfg.oscillator.inertia, 0.02,
                               cfg.k_t.k_t * cfg.drive.amplitude / cfg.coil_resistance, 2 * pi * 120.0};
  const auto series = simulate(cfg, 50);
  double worst = 0.0;
  for (const auto& s : series.samples) worst = std::max(worst, std::abs(s.state.stroke_angle - exact(s.state.time)));
  EXPECT_LT(worst / exact.steady_amplitude(), 1e-3);

  const int n = series.steps_per_cycle;
  double lo = 1e9, hi = -1e9;
  for (int i = static_cast<int>(series.samples.size()) - n; i < static_cast<int>(series.samples.size()); ++i) {
    lo = std::min(lo, series.samples[i].state.stroke_angle);
    hi = std::max(hi, series.samples[i].state.stroke_angle);
  }
  double lo_x = 1e9, hi_x = -1e9;
  for (int i = static_cast<int>(series.samples.size()) - n; i < static_cast<int>(series.samples.size()); ++i) {
    const double x = exact(series.samples[i].state.time);
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
  }
  EXPECT_NEAR((hi - lo) / (hi_x - lo_x), 1.0, 1e-3);
}

TEST(Simulate, Deterministic) {
  const SimConfig cfg = calibrated_paper();
  const auto a = simulate(cfg, 5);
  const auto b = simulate(cfg, 5);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ASSERT_EQ(a.samples[i].state.stroke_angle, b.samples[i].state.stroke_angle);
    ASSERT_EQ(a.samples[i].state.pitch_angle, b.samples[i].state.pitch_angle);
    ASSERT_EQ(a.samples[i].loads.lift, b.samples[i].loads.lift);
  }
}

TEST(Simulate, EnergyAuditClosesEachSteadyCycle) {
  const SimConfig cfg = calibrated_paper();
  const auto series = simulate(cfg, 200);
  for (int c = 150; c < series.cycles(); ++c) {
    const EnergyAudit a = series.audit_cycle(c);
    ASSERT_LT(std::abs(a.residual()) / a.electrical, 0.02) << c;
    ASSERT_LT(std::abs(a.mechanical_residual()) / a.drive, 0.02) << c;
    ASSERT_GT(a.aero, 0.0);
    ASSERT_GE(a.stop, -1e-18);
  }
}

TEST(Simulate, EnergyAuditQuasiStatic) {
  SimConfig cfg = calibrated_paper();
  cfg.pitch_model = PitchModel::quasi_static;
  const auto series = simulate(cfg, 60);
  const EnergyAudit a = series.audit_cycle(series.cycles() - 1);
  EXPECT_LT(std::abs(a.mechanical_residual()) / a.drive, 0.02);
}

TEST(Simulate, PitchRespectsStops) {
  const SimConfig cfg = calibrated_paper();
  const auto series = simulate(cfg, 60);
  for (const auto& s : series.samples) {
    ASSERT_LE(s.state.pitch_angle, cfg.stops.positive_limit + 0.1 * deg);
    ASSERT_GE(s.state.pitch_angle, -cfg.stops.negative_limit - 0.1 * deg);
  }
}

TEST(Simulate, StopFreePitchHasHalfWaveSymmetry) {
  SimConfig cfg = test_support::paper_config().sim_config();
  cfg.stops.enabled = false;
  cfg.pitch_misalignment = 0.0;
  cfg.k_t = actuator::calibrate_torque_constant(45.0 * deg, cfg).k_t;
  const auto series = simulate(cfg, 150);
  const int n = series.steps_per_cycle;
  ASSERT_EQ(n % 2, 0);
  const auto last = series.samples.end() - n;
  std::vector<double> first, second;
  for (int i = 0; i < n / 2; ++i) {
    first.push_back(last[i].state.pitch_angle);
    second.push_back(-last[i + n / 2].state.pitch_angle);
  }
  EXPECT_LT(rms_difference(first, second), 0.01);
}

TEST(Simulate, SteadyStateIsPeriodic) {
  const SimConfig cfg = calibrated_paper();
  const auto series = simulate(cfg, 200);
  const int n = series.steps_per_cycle;
  const auto end = series.samples.end();
  std::vector<double> a, b;
  for (int i = 0; i < n; ++i) {
    a.push_back((end - 2 * n + i)->state.stroke_angle);
    b.push_back((end - n + i)->state.stroke_angle);
  }
  EXPECT_LT(rms_difference(a, b), 0.005);
}

TEST(SteadyState, HalvingDtConverges) {
  const SimConfig cfg = calibrated_paper();
  SimConfig half = cfg;
  half.dt = 0.5 * cfg.effective_dt();
  const SettleOptions tight{1e-5, 10, 30, 4000};
  const auto a = steady_state(cfg, tight);
  const auto b = steady_state(half, tight);
  EXPECT_NEAR(a.amplitude / b.amplitude, 1.0, 1e-3);
}

TEST(SteadyState, OffResonanceAttenuates) {
  const SimConfig cfg = calibrated_paper();
  const auto at = steady_state(cfg);
  const auto below = steady_state(retuned(cfg, 0.5 * cfg.drive.frequency));
  EXPECT_TRUE(at.settled);
  EXPECT_LT(below.amplitude, at.amplitude);
}

TEST(SteadyState, QuasiStaticPitchVanishesAtStrokeExtremes) {
  SimConfig cfg = test_support::paper_config().sim_config();
  cfg.pitch_model = PitchModel::quasi_static;
  cfg.k_t = actuator::calibrate_torque_constant(45.0 * deg, cfg).k_t;
  const auto r = steady_state(cfg);
  for (const auto& s : r.last_cycle) {
    if (std::abs(s.state.stroke_angle) > 0.99 * r.amplitude) ASSERT_LT(std::abs(s.state.pitch_angle), 5.0 * deg);
  }
  EXPECT_GT(r.mean_lift, 0.0);
}

TEST(Sweep, LinearPeakNearAnalyticResonance) {
  const SimConfig cfg = bare_linear();
  const auto pts = frequency_sweep(cfg, 120.0, 140.0, 21);
  ASSERT_EQ(pts.size(), 21u);
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_TRUE(pts[i].error.empty());
    if (pts[i].amplitude > pts[best].amplitude) best = i;
  }
  EXPECT_NEAR(pts[best].frequency, spring::resonance_frequency(cfg.oscillator).si(), 1.0);
  for (std::size_t i = 1; i <= best; ++i) EXPECT_GT(pts[i].amplitude, pts[i - 1].amplitude);
  for (std::size_t i = best + 1; i < pts.size(); ++i) EXPECT_LT(pts[i].amplitude, pts[i - 1].amplitude);
}

TEST(Sweep, ParallelMatchesSerial) {
  const SimConfig cfg = bare_linear();
  const auto serial = frequency_sweep(cfg, 125.0, 135.0, 6, {}, 1);
  const auto parallel = frequency_sweep(cfg, 125.0, 135.0, 6, {}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].frequency, parallel[i].frequency);
    EXPECT_EQ(serial[i].amplitude, parallel[i].amplitude);
  }
}

TEST(Sweep, SinglePointMatchesSteadyState) {
  const SimConfig cfg = bare_linear();
  const auto pts = frequency_sweep(cfg, 128.0, 128.0, 1);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].amplitude, steady_state(retuned(cfg, 128.0)).amplitude);
}

TEST(Sweep, FailedPointsAreFlagged) {
  SimConfig cfg = bare_linear();
  cfg.k_t.k_t = 2e-6;  // overdrives the stroke past the guard near resonance
  const auto pts = frequency_sweep(cfg, 60.0, 130.0, 3);
  EXPECT_TRUE(pts.front().error.empty());
  EXPECT_FALSE(pts.back().error.empty());
}

TEST(Sweep, ThreadCap) {
  EXPECT_GE(sweep_threads(0), 1u);
  EXPECT_EQ(sweep_threads(1), 1u);
}

TEST(FindResonance, BareMagnet) {
  const SimConfig cfg = bare_linear();
  EXPECT_NEAR(find_resonance(cfg, 110.0, 150.0).si(), 130.0, 0.1);
}

TEST(FindResonance, ScaleInvariance) {
  SimConfig cfg = bare_linear();
  SimConfig scaled = cfg;
  scaled.oscillator.stiffness *= 3.0;
  scaled.oscillator.inertia *= 3.0;
  scaled.k_t.k_t *= 3.0;
  EXPECT_NEAR(find_resonance(scaled, 110.0, 150.0).si(), find_resonance(cfg, 110.0, 150.0).si(), 0.1);
}

TEST(FindResonance, AddedInertiaLowersResonance) {
  SimConfig cfg = bare_linear();
  SimConfig heavy = cfg;
  heavy.oscillator.inertia *= 1.2;
  EXPECT_LT(find_resonance(heavy, 100.0, 150.0).si(), find_resonance(cfg, 100.0, 150.0).si());
}

TEST(FindResonance, EdgePeakIsBracketError) {
  EXPECT_THROW(find_resonance(bare_linear(), 140.0, 170.0), BracketError);
}
