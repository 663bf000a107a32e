#include "flapkit/dynamics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit::dynamics {

using units::deg;
using units::pi;

namespace {

constexpr double kStrokeGuard = 0.5 * pi;

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// State vector layout for the RK4 integrator: four mechanical states
// followed by the running work integrals.
enum Slot { kPhi, kPhiRate, kPsi, kPsiRate, kWDrive, kWAero, kWDamp, kWJoule, kSlots };
using Vec = std::array<double, kSlots>;

}  // namespace

struct Simulator::Eval {
  Vec rate{};
  aero::Loads loads;
  double tau_drive = 0.0;
  double p_joule = 0.0;
  double pitch = 0.0;
};

void SimConfig::validate() const {
  oscillator.validate();
  wing.validate();
  flexure.validate();
  if (stops.enabled) stops.validate();
  aero.validate();
  drive.validate();
  if (!(coil_resistance > 0.0)) throw SpecError("coil resistance must be positive");
  if (k_t.k_t < 0.0) throw SpecError("torque constant must be non-negative");
  if (!(dt > 0.0)) throw SpecError("dt must be positive");
  const double dt_max = 1.0 / (1000.0 * drive.frequency);
  if (dt > dt_max * (1.0 + 1e-9)) {
    throw SpecError(fmt::format("dt {:.4g} s exceeds 1/(1000 f) = {:.4g} s", dt, dt_max));
  }
  if (pitch_damping_ratio < 0.0) throw SpecError("pitch damping ratio must be non-negative");
  if (pitch_model == PitchModel::dynamic && !(wing::wing_pitch_inertia(wing).si() > 0.0)) {
    throw SpecError("dynamic pitch model needs a positive wing pitch inertia");
  }
}

int SimConfig::steps_per_cycle() const {
  return static_cast<int>(std::ceil(drive.period() / dt - 1e-9));
}

double SimConfig::effective_dt() const { return drive.period() / steps_per_cycle(); }

SimConfig retuned(const SimConfig& cfg, double frequency) {
  SimConfig out = cfg;
  out.drive.frequency = frequency;
  const int steps = std::max(1000, static_cast<int>(std::ceil(1.0 / (frequency * cfg.dt) - 1e-9)));
  out.dt = 1.0 / (frequency * steps);
  return out;
}

SimConfig linearized(const SimConfig& cfg) {
  SimConfig out = cfg;
  out.aero.enabled = false;
  out.stops.enabled = false;
  return out;
}

Simulator::Simulator(SimConfig cfg, SimState initial) : cfg_(std::move(cfg)), state_(initial) {
  cfg_.validate();
  dt_ = cfg_.effective_dt();
  stroke_inertia_ = cfg_.oscillator.inertia;
  stroke_stiffness_ = cfg_.oscillator.stiffness;
  stroke_damping_ = 2.0 * cfg_.oscillator.damping_ratio * std::sqrt(stroke_stiffness_ * stroke_inertia_);
  pitch_inertia_ = wing::wing_pitch_inertia(cfg_.wing).si();
  pitch_stiffness_ = wing::flexure_stiffness(cfg_.flexure).si();
  pitch_damping_ = 2.0 * cfg_.pitch_damping_ratio * std::sqrt(pitch_stiffness_ * pitch_inertia_);
  if (!std::isfinite(state_.stroke_angle) || std::abs(state_.stroke_angle) > kStrokeGuard) {
    throw NumericalFailure("initial stroke angle outside the +-90 degree guard", state_);
  }
  if (cfg_.pitch_model == PitchModel::quasi_static) {
    state_.pitch_angle = quasi_static_pitch(state_.stroke_rate);
    state_.pitch_rate = 0.0;
  }
}

double Simulator::quasi_static_pitch(double stroke_rate) const {
  const double rest = cfg_.pitch_misalignment;
  double pitch = rest;
  const double s = sign(stroke_rate);
  if (cfg_.aero.enabled && s != 0.0) {
    const double pressure = aero::pressure_force(stroke_rate, cfg_.wing, cfg_.aero);
    auto normal_coeff = [&](double psi) {
      const double alpha = aero::angle_of_attack(stroke_rate, psi);
      const aero::Coefficients c = aero::force_coefficients(alpha, cfg_.aero);
      return c.lift * std::cos(alpha) + c.drag * std::sin(alpha);
    };
    auto imbalance = [&](double psi) {
      return pitch_stiffness_ * (psi - rest) - s * pressure * normal_coeff(psi) * cfg_.wing.cop_distance;
    };
    double lo = -0.5 * pi;
    double hi = 0.5 * pi;
    if (imbalance(hi) < 0.0) {
      pitch = hi;
    } else if (imbalance(lo) > 0.0) {
      pitch = lo;
    } else {
      // Illinois false position; the imbalance is increasing through its root.
      double f_lo = imbalance(lo);
      double f_hi = imbalance(hi);
      int side = 0;
      pitch = 0.5 * (lo + hi);
      for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
        pitch = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        const double f = imbalance(pitch);
        if (f == 0.0) break;
        if (f > 0.0) {
          hi = pitch;
          f_hi = f;
          if (side == 1) f_lo *= 0.5;
          side = 1;
        } else {
          lo = pitch;
          f_lo = f;
          if (side == -1) f_hi *= 0.5;
          side = -1;
        }
      }
    }
  }
  if (cfg_.stops.enabled) pitch = std::clamp(pitch, -cfg_.stops.negative_limit, cfg_.stops.positive_limit);
  return pitch;
}

Simulator::Eval Simulator::evaluate(double t, const double* y) const {
  Eval e;
  const double phi = y[kPhi];
  const double phi_rate = y[kPhiRate];
  const bool quasi_static = cfg_.pitch_model == PitchModel::quasi_static;
  const double psi = quasi_static ? quasi_static_pitch(phi_rate) : y[kPsi];
  const double psi_rate = quasi_static ? 0.0 : y[kPsiRate];

  const double current = cfg_.drive.voltage_at(t) / cfg_.coil_resistance;
  const double weight = cfg_.torque_profile ? cfg_.torque_profile(phi) : 1.0;
  e.tau_drive = weight * cfg_.k_t.k_t * current;
  e.p_joule = current * current * cfg_.coil_resistance;
  e.loads = aero::blade_element_loads({phi, phi_rate, psi, psi_rate}, cfg_.wing, cfg_.aero);
  e.pitch = psi;

  const double stroke_damping = stroke_damping_ * phi_rate;
  e.rate[kPhi] = phi_rate;
  e.rate[kPhiRate] =
      (e.tau_drive - stroke_stiffness_ * phi - stroke_damping - e.loads.stroke_torque) / stroke_inertia_;
  e.rate[kWDrive] = e.tau_drive * phi_rate;
  e.rate[kWAero] = e.loads.stroke_torque * phi_rate;
  e.rate[kWDamp] = stroke_damping * phi_rate;
  e.rate[kWJoule] = e.p_joule;
  if (!quasi_static) {
    const double pitch_damping = pitch_damping_ * psi_rate;
    e.rate[kPsi] = psi_rate;
    e.rate[kPsiRate] = (-pitch_stiffness_ * (psi - cfg_.pitch_misalignment) - pitch_damping +
                        e.loads.pitch_torque) / pitch_inertia_;
    e.rate[kWAero] -= e.loads.pitch_torque * psi_rate;
    e.rate[kWDamp] += pitch_damping * psi_rate;
  }
  return e;
}

double Simulator::stored_energy() const {
  const auto& s = state_;
  double e = 0.5 * stroke_inertia_ * s.stroke_rate * s.stroke_rate +
             0.5 * stroke_stiffness_ * s.stroke_angle * s.stroke_angle;
  if (cfg_.pitch_model == PitchModel::dynamic) {
    const double dpsi = s.pitch_angle - cfg_.pitch_misalignment;
    e += 0.5 * pitch_inertia_ * s.pitch_rate * s.pitch_rate + 0.5 * pitch_stiffness_ * dpsi * dpsi;
  }
  return e;
}

void Simulator::step() {
  const SimState before = state_;
  const double t = state_.time;
  const double h = dt_;
  Vec y{state_.stroke_angle, state_.stroke_rate, state_.pitch_angle, state_.pitch_rate, 0, 0, 0, 0};

  auto advance = [&](const Vec& base, const Vec& rate, double scale) {
    Vec out;
    for (int i = 0; i < kSlots; ++i) out[i] = base[i] + scale * rate[i];
    return out;
  };
  const Vec k1 = evaluate(t, y.data()).rate;
  const Vec k2 = evaluate(t + 0.5 * h, advance(y, k1, 0.5 * h).data()).rate;
  const Vec k3 = evaluate(t + 0.5 * h, advance(y, k2, 0.5 * h).data()).rate;
  const Vec k4 = evaluate(t + h, advance(y, k3, h).data()).rate;
  for (int i = 0; i < kSlots; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  for (double v : y) {
    if (!std::isfinite(v)) throw NumericalFailure(fmt::format("non-finite state at t = {:.9g} s", t), before);
  }
  if (std::abs(y[kPhi]) > kStrokeGuard) {
    throw NumericalFailure(fmt::format("stroke angle {:.4g} deg beyond the +-90 degree guard at t = {:.9g} s",
                                       y[kPhi] / deg, t),
                           before);
  }

  state_.time = t + h;
  state_.stroke_angle = y[kPhi];
  state_.stroke_rate = y[kPhiRate];
  ledger_.drive += y[kWDrive];
  ledger_.aero += y[kWAero];
  ledger_.damping += y[kWDamp];
  ledger_.joule += y[kWJoule];

  if (cfg_.pitch_model == PitchModel::quasi_static) {
    const double pitch = quasi_static_pitch(state_.stroke_rate);
    state_.pitch_rate = (pitch - state_.pitch_angle) / h;
    state_.pitch_angle = pitch;
    return;
  }

  state_.pitch_angle = y[kPsi];
  state_.pitch_rate = y[kPsiRate];
  if (!cfg_.stops.enabled) return;
  const double upper = cfg_.stops.positive_limit;
  const double lower = -cfg_.stops.negative_limit;
  if (state_.pitch_angle > upper || state_.pitch_angle < lower) {
    const double energy_before = stored_energy();
    const bool high = state_.pitch_angle > upper;
    state_.pitch_angle = high ? upper : lower;
    if ((high && state_.pitch_rate > 0.0) || (!high && state_.pitch_rate < 0.0)) {
      state_.pitch_rate = -cfg_.stops.restitution * state_.pitch_rate;
    }
    ledger_.stop += energy_before - stored_energy();
  }
}

Sample Simulator::sample() const {
  Vec y{state_.stroke_angle, state_.stroke_rate, state_.pitch_angle, state_.pitch_rate, 0, 0, 0, 0};
  const Eval e = evaluate(state_.time, y.data());
  Sample s;
  s.state = state_;
  s.loads = e.loads;
  s.tau_drive = e.tau_drive;
  s.p_joule = e.p_joule;
  s.p_elec = e.p_joule + e.tau_drive * state_.stroke_rate;
  s.p_aero = std::abs(e.loads.stroke_torque * state_.stroke_rate);
  return s;
}

SimState step(const SimState& state, const SimConfig& cfg) {
  Simulator sim(cfg, state);
  sim.step();
  return sim.state();
}

TimeSeries simulate(const SimConfig& cfg, int n_cycles, const SimState& initial) {
  if (n_cycles < 1) throw std::invalid_argument("simulate: n_cycles must be at least 1");
  Simulator sim(cfg, initial);
  TimeSeries ts;
  ts.dt = cfg.effective_dt();
  ts.steps_per_cycle = cfg.steps_per_cycle();
  const std::size_t total = static_cast<std::size_t>(n_cycles) * ts.steps_per_cycle;
  ts.samples.reserve(total);
  ts.cycle_ledgers.push_back(sim.ledger());
  ts.cycle_stored_energy.push_back(sim.stored_energy());
  for (int c = 0; c < n_cycles; ++c) {
    for (int i = 0; i < ts.steps_per_cycle; ++i) {
      sim.step();
      ts.samples.push_back(sim.sample());
    }
    ts.cycle_ledgers.push_back(sim.ledger());
    ts.cycle_stored_energy.push_back(sim.stored_energy());
  }
  ts.ledger = sim.ledger();
  return ts;
}

EnergyAudit TimeSeries::audit_cycle(int index) const {
  if (index < 0 || index >= cycles()) throw std::out_of_range("audit_cycle: no such cycle");
  const EnergyLedger& a = cycle_ledgers[index];
  const EnergyLedger& b = cycle_ledgers[index + 1];
  EnergyAudit audit;
  audit.joule = b.joule - a.joule;
  audit.drive = b.drive - a.drive;
  audit.electrical = audit.joule + audit.drive;
  audit.aero = b.aero - a.aero;
  audit.damping = b.damping - a.damping;
  audit.stop = b.stop - a.stop;
  audit.stored_change = cycle_stored_energy[index + 1] - cycle_stored_energy[index];
  return audit;
}

SteadyResult steady_state(const SimConfig& cfg, const SettleOptions& opts) {
  Simulator sim(cfg);
  const int n = cfg.steps_per_cycle();
  const double period = cfg.drive.period();
  SteadyResult out;
  out.frequency = cfg.drive.frequency;
  out.dt = cfg.effective_dt();
  std::vector<Sample> cycle;
  cycle.reserve(n);

  for (int c = 1; c <= opts.max_cycles; ++c) {
    const EnergyLedger start = sim.ledger();
    const double stored_start = sim.stored_energy();
    cycle.clear();
    double lo = sim.state().stroke_angle;
    double hi = lo;
    for (int i = 0; i < n; ++i) {
      sim.step();
      cycle.push_back(sim.sample());
      lo = std::min(lo, sim.state().stroke_angle);
      hi = std::max(hi, sim.state().stroke_angle);
    }
    const double amp = 0.5 * (hi - lo);
    out.amplitude_history.push_back(amp);
    out.cycles = c;

    const EnergyLedger& end = sim.ledger();
    EnergyAudit audit;
    audit.joule = end.joule - start.joule;
    audit.drive = end.drive - start.drive;
    audit.electrical = audit.joule + audit.drive;
    audit.aero = end.aero - start.aero;
    audit.damping = end.damping - start.damping;
    audit.stop = end.stop - start.stop;
    audit.stored_change = sim.stored_energy() - stored_start;
    out.last_cycle_audit = audit;

    bool settled = false;
    if (c >= opts.min_cycles && c > opts.window) {
      const auto& h = out.amplitude_history;
      const double ref = std::max(amp, 1e-300);
      const double far = h[h.size() - 1 - opts.window];
      const double near = h[h.size() - 1 - std::max(1, opts.window / 2)];
      settled = (std::abs(amp - far) <= opts.tolerance * ref && std::abs(amp - near) <= opts.tolerance * ref) ||
                amp == 0.0;
    }
    if (settled || c == opts.max_cycles) {
      out.settled = settled;
      out.amplitude = amp;
      std::vector<aero::LoadSample> loads;
      loads.reserve(cycle.size());
      out.pitch_max = -1e300;
      out.pitch_min = 1e300;
      for (const auto& s : cycle) {
        loads.push_back({s.loads, s.state.stroke_rate});
        out.pitch_max = std::max(out.pitch_max, s.state.pitch_angle);
        out.pitch_min = std::min(out.pitch_min, s.state.pitch_angle);
      }
      const aero::CycleAverage avg = aero::cycle_average(loads, out.dt, period);
      out.mean_lift = avg.mean_lift;
      out.mean_aero_power = avg.mean_aero_power;
      out.mean_drive_power = audit.drive / period;
      out.mean_joule_power = audit.joule / period;
      out.mean_electrical_power = audit.electrical / period;
      out.last_cycle = std::move(cycle);
      break;
    }
  }
  return out;
}

unsigned sweep_threads(unsigned requested) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* env = std::getenv("FLAPKIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return std::max(1u, n);
}

std::vector<SweepPoint> frequency_sweep(const SimConfig& cfg, double f_min, double f_max, int n_points,
                                        const SettleOptions& opts, unsigned threads) {
  if (n_points < 1) throw std::invalid_argument("frequency_sweep: need at least one point");
  if (!(f_min > 0.0) || f_max < f_min || (n_points > 1 && !(f_min < f_max))) {
    throw std::invalid_argument("frequency_sweep: need 0 < f_min < f_max");
  }
  std::vector<SweepPoint> points(n_points);
  for (int i = 0; i < n_points; ++i) {
    points[i].frequency = n_points == 1 ? f_min : f_min + (f_max - f_min) * i / (n_points - 1);
  }

  auto run = [&](SweepPoint& p) {
    try {
      const SteadyResult r = steady_state(retuned(cfg, p.frequency), opts);
      p.amplitude = r.amplitude;
      p.mean_lift = r.mean_lift;
      p.mean_aero_power = r.mean_aero_power;
      p.mean_electrical_power = r.mean_electrical_power;
      p.mean_joule_power = r.mean_joule_power;
      p.settled = r.settled;
    } catch (const NumericalFailure& e) {
      p.error = e.what();
    }
  };

  const unsigned workers = std::min<unsigned>(threads == 0 ? 1 : threads, n_points);
  if (workers <= 1) {
    for (auto& p : points) run(p);
    return points;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n_points; i = next++) run(points[i]);
    });
  }
  pool.clear();
  return points;
}

Quantity find_resonance(const SimConfig& cfg, double f_lo, double f_hi, const ResonanceOptions& opts) {
  if (opts.coarse_points < 3) throw std::invalid_argument("find_resonance: need at least 3 coarse points");
  const auto coarse = frequency_sweep(cfg, f_lo, f_hi, opts.coarse_points, opts.settle, opts.threads);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (!coarse[i].error.empty()) {
      throw BracketError(fmt::format("find_resonance: point {:.4g} Hz failed: {}", coarse[i].frequency,
                                     coarse[i].error));
    }
    if (coarse[i].amplitude > coarse[peak].amplitude) peak = i;
  }
  if (peak == 0 || peak + 1 == coarse.size()) {
    throw BracketError(fmt::format("no interior amplitude maximum in [{:.4g}, {:.4g}] Hz", f_lo, f_hi));
  }

  auto amplitude = [&](double f) { return steady_state(retuned(cfg, f), opts.settle).amplitude; };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = coarse[peak - 1].frequency;
  double b = coarse[peak + 1].frequency;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = amplitude(c);
  double fd = amplitude(d);
  while (b - a > opts.tolerance) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = amplitude(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = amplitude(d);
    }
  }
  return units::frequency(0.5 * (a + b));
}

}  // namespace flapkit::dynamics
