#include "flapkit/calibration.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace flapkit::actuator {

CalibrationResult calibrate_torque_constant(double target_amplitude, const dynamics::SimConfig& cfg,
                                            const CalibrationOptions& opts) {
  if (!(target_amplitude > 0.0)) throw std::invalid_argument("calibration target amplitude must be positive");
  if (cfg.drive.amplitude <= 0.0) throw CalibrationFailure("calibration needs a non-zero drive voltage");

  CalibrationResult result;
  auto amplitude_at = [&](double k_t) {
    dynamics::SimConfig trial = cfg;
    trial.k_t.k_t = k_t;
    ++result.simulations;
    try {
      return dynamics::steady_state(trial, opts.settle).amplitude;
    } catch (const dynamics::NumericalFailure&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto close_enough = [&](double amp) {
    return std::abs(amp - target_amplitude) <= opts.rel_tolerance * target_amplitude;
  };

  double lo = 0.0;
  double hi = opts.initial_guess;
  double amp_hi = amplitude_at(hi);
  int iterations = 0;
  while (amp_hi < target_amplitude) {
    if (close_enough(amp_hi)) return {{hi}, amp_hi, result.simulations};
    if (++iterations > opts.max_iterations) {
      throw CalibrationFailure(fmt::format("no k_t up to {:.4g} N*m/A reaches the target amplitude", hi));
    }
    lo = hi;
    hi *= 2.0;
    amp_hi = amplitude_at(hi);
  }
  if (close_enough(amp_hi)) return {{hi}, amp_hi, result.simulations};

  for (; iterations <= opts.max_iterations; ++iterations) {
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    const double amp = amplitude_at(mid);
    if (close_enough(amp)) return {{mid}, amp, result.simulations};
    (amp < target_amplitude ? lo : hi) = mid;
  }
  throw CalibrationFailure(fmt::format("k_t calibration did not converge within {} iterations (bracket [{:.6g}, {:.6g}])",
                                       opts.max_iterations, lo, hi));
}

}  // namespace flapkit::actuator
