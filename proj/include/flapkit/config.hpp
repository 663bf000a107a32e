#pragma once

// Project configuration: the JSON document every CLI command reads.
//
// Dimensioned values are strings with a mandatory unit suffix ("0.3mm",
// "70mV"); plain numbers are accepted only for dimensionless fields. Unknown
// keys are rejected with their JSON-pointer location.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flapkit/actuator.hpp"
#include "flapkit/budget.hpp"
#include "flapkit/dynamics.hpp"
#include "flapkit/materials.hpp"
#include "flapkit/spring.hpp"
#include "flapkit/wing.hpp"

namespace flapkit::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& location, const std::string& message)
      : std::runtime_error(location + ": " + message), location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// How the stroke oscillator's stiffness and inertia are closed.
enum class Closure {
  point_mass,       // inertia = m r^2 + extra, stiffness as given
  infer_inertia,    // stiffness as given, inertia from the observed resonance
  infer_stiffness,  // inertia = m r^2 + extra, stiffness from the observed resonance
};

struct OscillatorSection {
  double point_mass = 0.0;
  double arc_radius = 0.0;
  double design_frequency = 0.0;
  double stiffness = 0.0;
  std::optional<double> observed_resonance;
  double extra_inertia = 0.0;
  Closure closure = Closure::point_mass;
  double damping_ratio = 0.0;
};

struct DriveSection {
  actuator::DriveSignal signal;
  std::optional<double> torque_constant;  // unset: calibrate
  double target_stroke_amplitude = 0.0;   // rad, calibration target
  std::optional<double> coil_resistance;  // unset: coil model
};

struct SimulationSection {
  double dt = 0.0;
  int cycles = 200;
  dynamics::PitchModel pitch_model = dynamics::PitchModel::dynamic;
  double pitch_damping_ratio = 0.3;
  double pitch_misalignment = 0.0;
};

struct FlexureDesignSection {
  double average_lift = 0.0;   // N
  double max_deflection = 0.0; // rad
  int n_parts = 3;
};

struct BudgetSection {
  std::vector<std::pair<std::string, double>> table_masses;  // published component masses, kg
  std::optional<double> printed_net;
  double specific_power = 29.0;   // W/kg
  double vehicle_mass = 0.0;      // kg, mass the specific power is quoted for
  double designed_lift = 0.0;     // kg, per wing
  budget::Derating derating;
  double muscle_efficiency = 0.17;
};

struct ProjectConfig {
  MaterialDatabase materials = MaterialDatabase::defaults();
  actuator::MagnetSpec magnet;
  actuator::CoilSpec coil;
  spring::SpringSpec spring;
  std::optional<spring::DesignConstraints> spring_design;
  OscillatorSection oscillator;
  wing::WingSpec wing;
  wing::FlexureSpec flexure;
  FlexureDesignSection flexure_design;
  wing::PitchStopSpec stops;
  aero::AeroConfig aero;
  DriveSection drive;
  SimulationSection simulation;
  BudgetSection budget;
  /// Published figures keyed by name, SI units.
  std::map<std::string, Quantity> published;
  std::string output_dir = "out";

  nlohmann::json source;  // the document as read
  std::string hash;       // SHA-256 of the canonical dump of `source`

  spring::OscillatorSpec oscillator_spec() const;
  double coil_resistance() const;
  /// Simulation config; k_t is zero when the config asks for calibration.
  dynamics::SimConfig sim_config() const;
  bool needs_calibration() const { return !drive.torque_constant.has_value(); }
};

ProjectConfig parse_config(const nlohmann::json& doc);
ProjectConfig load_config(const std::filesystem::path& path);

/// Hex SHA-256 of `text`.
std::string sha256_hex(const std::string& text);

/// Dimension expected for each recognised key of the "published" section.
const std::map<std::string, Dimension>& published_keys();

}  // namespace flapkit::config
