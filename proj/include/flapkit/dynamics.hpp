#pragma once

// Two-degree-of-freedom flapping simulation: the driven stroke oscillator and
// passive wing pitch on a flexure with hard stops.
//
//   I_s phi''  = tau_drive - k phi - c_s phi' - tau_aero,stroke
//   I_p psi''  = -k_f (psi - psi_0) - c_p psi' + tau_aero,pitch
//
// integrated with fixed-step RK4. Stop contact is resolved after each step by
// projecting pitch back onto the limit and reflecting its rate scaled by the
// restitution coefficient. Work done by each term is integrated alongside the
// state so the energy books can be audited per cycle.
//
// Electrical input is counted as the resistive loss V^2/R plus the power the
// drive torque delivers to the stroke (an ideal transducer without back-EMF).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flapkit/actuator.hpp"
#include "flapkit/aero.hpp"
#include "flapkit/spring.hpp"
#include "flapkit/wing.hpp"

namespace flapkit::dynamics {

struct SimState {
  double time = 0.0;
  double stroke_angle = 0.0;
  double stroke_rate = 0.0;
  double pitch_angle = 0.0;
  double pitch_rate = 0.0;
};

enum class PitchModel {
  dynamic,       // pitch inertia integrated
  quasi_static,  // pitch solved from flexure/aero torque balance each evaluation
};

struct SimConfig {
  spring::OscillatorSpec oscillator;
  wing::WingSpec wing;
  wing::FlexureSpec flexure;
  wing::PitchStopSpec stops;
  aero::AeroConfig aero;
  actuator::DriveSignal drive;
  actuator::TorqueConstant k_t;
  double coil_resistance = 1.5;  // Ohm
  double dt = 1e-6;              // s, at most 1/(1000 f_drive)
  double pitch_damping_ratio = 0.3;
  double pitch_misalignment = 0.0;  // flexure rest angle, rad
  PitchModel pitch_model = PitchModel::dynamic;
  actuator::TorqueProfile torque_profile;

  void validate() const;
  /// Steps per drive period; dt is shortened so each period holds a whole
  /// number of steps.
  int steps_per_cycle() const;
  double effective_dt() const;
};

/// Copy of `cfg` driven at `frequency`, with dt tightened as needed.
SimConfig retuned(const SimConfig& cfg, double frequency);

/// Copy of `cfg` with aerodynamics and pitch stops switched off.
SimConfig linearized(const SimConfig& cfg);

class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, const SimState& last_valid)
      : std::runtime_error(what), last_valid_(last_valid) {}
  const SimState& last_valid() const noexcept { return last_valid_; }

 private:
  SimState last_valid_;
};

/// Cumulative work, J. `aero` is the work absorbed by the air, `stop` the
/// mechanical energy removed by stop contacts.
struct EnergyLedger {
  double drive = 0.0;
  double aero = 0.0;
  double damping = 0.0;
  double stop = 0.0;
  double joule = 0.0;
};

struct Sample {
  SimState state;
  aero::Loads loads;
  double tau_drive = 0.0;  // N*m
  double p_joule = 0.0;    // W
  double p_elec = 0.0;     // W
  double p_aero = 0.0;     // W, |tau_aero,stroke * stroke_rate|
};

class Simulator {
 public:
  explicit Simulator(SimConfig cfg, SimState initial = {});

  void step();
  const SimState& state() const { return state_; }
  const EnergyLedger& ledger() const { return ledger_; }
  /// Loads and powers at the current state.
  Sample sample() const;
  /// Stored mechanical energy at the current state. Pitch terms are left out
  /// in the quasi-static model.
  double stored_energy() const;
  const SimConfig& config() const { return cfg_; }

 private:
  struct Eval;
  Eval evaluate(double t, const double* y) const;
  double quasi_static_pitch(double stroke_rate) const;

  SimConfig cfg_;
  double dt_;
  double stroke_inertia_, stroke_stiffness_, stroke_damping_;
  double pitch_inertia_, pitch_stiffness_, pitch_damping_;
  SimState state_;
  EnergyLedger ledger_;
};

/// One RK4 step with stop resolution. Throws NumericalFailure on NaN or a
/// stroke beyond the +-90 degree guard.
SimState step(const SimState& state, const SimConfig& cfg);

struct EnergyAudit {
  double electrical = 0.0;
  double joule = 0.0;
  double drive = 0.0;
  double aero = 0.0;
  double damping = 0.0;
  double stop = 0.0;
  double stored_change = 0.0;
  /// electrical - (joule + aero + damping + stop + stored_change)
  double residual() const { return electrical - (joule + aero + damping + stop + stored_change); }
  /// Same balance on the mechanical side only, relative to drive work.
  double mechanical_residual() const { return drive - (aero + damping + stop + stored_change); }
};

struct TimeSeries {
  double dt = 0.0;
  int steps_per_cycle = 0;
  std::vector<Sample> samples;  // one per step, after the step
  EnergyLedger ledger;
  // Ledger and stored energy at the start of the run and after each cycle.
  std::vector<EnergyLedger> cycle_ledgers;
  std::vector<double> cycle_stored_energy;

  int cycles() const { return static_cast<int>(cycle_ledgers.size()) - 1; }
  /// Energy books for cycle `index` (0-based).
  EnergyAudit audit_cycle(int index) const;
};

/// Runs `n_cycles` whole drive periods from `initial`.
TimeSeries simulate(const SimConfig& cfg, int n_cycles, const SimState& initial = {});

struct SettleOptions {
  double tolerance = 0.005;  // relative amplitude drift over `window` cycles
  int window = 10;
  int min_cycles = 20;
  int max_cycles = 2000;
};


struct SteadyResult {
  double frequency = 0.0;
  double amplitude = 0.0;  // rad, half peak-to-peak stroke over the last cycle
  double mean_lift = 0.0;
  double mean_aero_power = 0.0;
  double mean_drive_power = 0.0;
  double mean_joule_power = 0.0;
  double mean_electrical_power = 0.0;
  double pitch_max = 0.0;
  double pitch_min = 0.0;
  int cycles = 0;
  bool settled = false;
  double dt = 0.0;
  EnergyAudit last_cycle_audit;
  std::vector<Sample> last_cycle;
  std::vector<double> amplitude_history;
};

/// Simulates from rest until the stroke amplitude settles or max_cycles is
/// reached (`settled` false).
SteadyResult steady_state(const SimConfig& cfg, const SettleOptions& opts = {});

struct SweepPoint {
  double frequency = 0.0;
  double amplitude = 0.0;
  double mean_lift = 0.0;
  double mean_aero_power = 0.0;
  double mean_electrical_power = 0.0;
  double mean_joule_power = 0.0;
  bool settled = false;
  std::string error;  // non-empty when the point failed numerically
};

/// Thread count for sweeps: `requested` (0 = hardware concurrency), capped by
/// the FLAPKIT_THREADS environment variable when set.
unsigned sweep_threads(unsigned requested);

/// Linearly spaced steady-state sweep, ordered by frequency regardless of
/// worker scheduling.
std::vector<SweepPoint> frequency_sweep(const SimConfig& cfg, double f_min, double f_max, int n_points,
                                        const SettleOptions& opts = {}, unsigned threads = 1);

class BracketError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ResonanceOptions {
  int coarse_points = 11;
  double tolerance = 0.1;  // Hz, final bracket width
  SettleOptions settle{1e-4, 10, 30, 4000};
  unsigned threads = 1;
};

/// Coarse sweep of [f_lo, f_hi] followed by golden-section refinement of the
/// amplitude peak. Throws BracketError when the peak is on the bracket edge.
Quantity find_resonance(const SimConfig& cfg, double f_lo, double f_hi, const ResonanceOptions& opts = {});

}  // namespace flapkit::dynamics
