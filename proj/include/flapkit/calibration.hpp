#pragma once

// Torque-constant calibration. The magnet/coil coupling is not modelled from
// field geometry; instead k_t is chosen so the simulated steady stroke
// amplitude matches an observed one.

#include <stdexcept>

#include "flapkit/dynamics.hpp"

namespace flapkit::actuator {

class CalibrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationOptions {
  double rel_tolerance = 1e-3;  // on the amplitude
  int max_iterations = 60;
  double initial_guess = 1e-7;  // N*m/A
  dynamics::SettleOptions settle{5e-4, 10, 20, 3000};
};

struct CalibrationResult {
  TorqueConstant k_t;
  double achieved_amplitude = 0.0;  // rad
  int simulations = 0;
};

/// Bisection on k_t (after geometric bracketing) until the steady stroke
/// amplitude at the configured drive matches `target_amplitude` to
/// `rel_tolerance`. Runs that trip the stroke guard count as overshoot.
/// Throws std::invalid_argument for a non-positive target and
/// CalibrationFailure when no bracket or no convergence is reached.
CalibrationResult calibrate_torque_constant(double target_amplitude, const dynamics::SimConfig& cfg,
                                            const CalibrationOptions& opts = {});

}  // namespace flapkit::actuator
