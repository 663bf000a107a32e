#include "flapkit/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flapkit/actuator.hpp"
#include "flapkit/budget.hpp"
#include "flapkit/spring.hpp"
#include "flapkit/wing.hpp"

namespace flapkit::budget {

using nlohmann::json;
using units::deg;

namespace {

constexpr double kMg = 1e-6;

Comparison relative(std::string name, std::string unit, double published, double computed, double tol) {
  const double lo = published * (1.0 - tol);
  const double hi = published * (1.0 + tol);
  return {std::move(name), std::move(unit), published, computed, std::min(lo, hi), std::max(lo, hi),
          fmt::format("+-{:g}%", 100.0 * tol)};
}

Comparison absolute(std::string name, std::string unit, double published, double computed, double tol) {
  std::string label = fmt::format("+-{:g} {}", tol, unit);
  return {std::move(name), std::move(unit), published, computed, published - tol, published + tol, std::move(label)};
}

Comparison band(std::string name, std::string unit, double published, double computed, double lo, double hi) {
  std::string label = fmt::format("[{:g}, {:g}] {}", lo, hi, unit);
  return {std::move(name), std::move(unit), published, computed, lo, hi, std::move(label)};
}

Comparison info(std::string name, std::string unit, double published, double computed) {
  return {std::move(name), std::move(unit), published, computed, std::nullopt, std::nullopt, "reported only"};
}

// Published value in `unit`, or NaN when the config does not carry it.
double published(const config::ProjectConfig& cfg, const std::string& key, std::string_view unit) {
  auto it = cfg.published.find(key);
  if (it == cfg.published.end()) return std::nan("");
  return unit.empty() ? it->second.si() : convert(it->second, unit);
}

void push(std::vector<Comparison>& out, Comparison c) {
  if (!std::isnan(c.published)) out.push_back(std::move(c));
}

json comparison_json(const Comparison& c) {
  json j{{"name", c.name},
         {"unit", c.unit},
         {"published", c.published},
         {"computed", c.computed},
         {"relative_delta", c.relative_delta()},
         {"tolerance", c.tolerance},
         {"verdict", c.checked() ? (c.pass() ? "pass" : "fail") : "info"}};
  if (c.checked()) {
    j["lower"] = *c.lower;
    j["upper"] = *c.upper;
  }
  return j;
}

}  // namespace

DesignReport build_report(const config::ProjectConfig& cfg, const std::optional<json>& sim_summary) {
  DesignReport rep;
  auto& cmp = rep.comparisons;
  json doc;
  doc["schema"] = "flapkit.design-report/1";
  doc["config_hash"] = cfg.hash;
  doc["materials_version"] = std::string(MaterialDatabase::kVersion);

  // Actuator and mass budget.
  const double magnet_mass = actuator::magnet_mass(cfg.magnet).si();
  const double wire_length = actuator::coil_wire_length(cfg.coil).si();
  const double coil_model_r = actuator::coil_resistance(cfg.coil).si();
  const double coil_mass = actuator::coil_mass(cfg.coil).si();

  MassBudget table;
  MassBudget model;
  table.printed_net = cfg.budget.printed_net;
  for (const auto& [name, mass] : cfg.budget.table_masses) {
    table.add({name, mass, mass, "table"});
    if (name == "magnet") {
      model.add({name, magnet_mass, mass, "geometry"});
    } else if (name == "coil") {
      model.add({name, coil_mass, mass, "geometry"});
    } else {
      model.add({name, mass, mass, "table"});
    }
  }
  auto budget_json = [](const MassBudget& b) {
    json entries = json::array();
    for (const auto& e : b.entries) {
      json j{{"component", e.component}, {"mass_mg", e.mass / kMg}, {"source", e.source}};
      if (e.reference) {
        j["published_mg"] = *e.reference / kMg;
        j["delta_mg"] = (e.mass - *e.reference) / kMg;
      }
      entries.push_back(j);
    }
    json j{{"entries", entries}, {"sum_mg", b.net / kMg}};
    if (b.printed_net) j["printed_net_mg"] = *b.printed_net / kMg;
    return j;
  };
  doc["mass_budget"] = {{"published", budget_json(table)}, {"model", budget_json(model)}};
  for (const auto& w : table.warnings()) rep.warnings.push_back(w);
  for (const auto& w : model.warnings()) rep.warnings.push_back(w);
  push(cmp, relative("magnet mass", "mg", published(cfg, "magnet_mass", "mg"), magnet_mass / kMg, 0.05));
  push(cmp, info("coil mass", "mg", published(cfg, "coil_mass", "mg"), coil_mass / kMg));
  push(cmp, info("net mass (component sum)", "mg", published(cfg, "net_mass", "mg"), table.net / kMg));

  // Stiffness chain.
  const auto& osc_cfg = cfg.oscillator;
  const double required_k = spring::required_stiffness(units::mass(osc_cfg.point_mass),
                                                       units::length(osc_cfg.arc_radius),
                                                       units::frequency(osc_cfg.design_frequency))
                                .si();
  spring::SpringSpec analytic = cfg.spring;
  analytic.topology_factor = 1.0;
  const double analytic_k = spring::beam_bank_stiffness(analytic).si();
  const double configured_k = spring::beam_bank_stiffness(cfg.spring).si();
  const double calibrated_factor = spring::calibrate_topology_factor(cfg.spring, units::stiffness(osc_cfg.stiffness));
  doc["stiffness_chain"] = {
      {"target_uNm", required_k / 1e-6},
      {"design_choice_uNm", osc_cfg.stiffness / 1e-6},
      {"beam_bank_analytic_uNm", analytic_k / 1e-6},
      {"beam_bank_configured_uNm", configured_k / 1e-6},
      {"topology_factor", cfg.spring.topology_factor},
      {"topology_factor_to_design", calibrated_factor},
      {"beam_model_mode", cfg.spring.topology_factor == 1.0 ? "analytic" : "calibrated"},
      {"design_to_analytic_ratio", osc_cfg.stiffness / analytic_k},
  };
  push(cmp, relative("required spring stiffness", "uNm", published(cfg, "required_stiffness", "uNm"),
                     required_k / 1e-6, 0.015));

  // Resonance chain.
  const spring::OscillatorSpec osc = cfg.oscillator_spec();
  const double bare_inertia = osc_cfg.point_mass * osc_cfg.arc_radius * osc_cfg.arc_radius;
  const double f_bare_target =
      spring::resonance_frequency(spring::OscillatorSpec::from_point_mass(required_k, osc_cfg.point_mass,
                                                                          osc_cfg.arc_radius))
          .si();
  const double f_bare_design =
      spring::resonance_frequency(spring::OscillatorSpec::from_point_mass(osc_cfg.stiffness, osc_cfg.point_mass,
                                                                          osc_cfg.arc_radius))
          .si();
  const double f_model = spring::resonance_frequency(osc).si();
  json resonance{{"bare_magnet_at_target_stiffness_hz", f_bare_target},
                 {"bare_magnet_at_design_stiffness_hz", f_bare_design},
                 {"model_resonance_hz", f_model},
                 {"stiffness_uNm", osc.stiffness / 1e-6},
                 {"inertia_kg_m2", osc.inertia},
                 {"bare_magnet_inertia_kg_m2", bare_inertia},
                 {"inertia_ratio_to_bare", osc.inertia / bare_inertia}};
  if (osc_cfg.observed_resonance) {
    const double eff = spring::effective_inertia_from_resonance(units::stiffness(osc_cfg.stiffness),
                                                                units::frequency(*osc_cfg.observed_resonance))
                           .si();
    resonance["observed_hz"] = *osc_cfg.observed_resonance;
    resonance["effective_inertia_kg_m2"] = eff;
    resonance["effective_to_bare_ratio"] = eff / bare_inertia;
  }
  doc["resonance_chain"] = resonance;
  push(cmp, relative("stroke resonance", "Hz", published(cfg, "resonance", "Hz"), f_model, 0.01));

  // Flexure chain.
  const double avg_lift = cfg.flexure_design.average_lift;
  json flex;
  const double k_flex = wing::flexure_stiffness(cfg.flexure).si();
  const double pitch_inertia = wing::wing_pitch_inertia(cfg.wing).si();
  const double f_pitch = wing::pitch_resonance(cfg.flexure, cfg.wing).si();
  const wing::Planform planform = wing::wing_planform(cfg.wing.length, cfg.wing.aspect_ratio);
  flex["flexure_stiffness_Nm_per_rad"] = k_flex;
  flex["flexure_width_um"] = cfg.flexure.total_width / 1e-6;
  flex["flexure_part_width_um"] = cfg.flexure.part_width() / 1e-6;
  flex["flexure_parts"] = cfg.flexure.n_parts;
  flex["mean_chord_mm"] = planform.mean_chord / 1e-3;
  flex["wing_area_mm2"] = planform.area / 1e-6;
  flex["pitch_inertia_kg_m2"] = pitch_inertia;
  flex["pitch_resonance_hz"] = f_pitch;
  flex["pitch_to_stroke_frequency_ratio"] = f_pitch / cfg.drive.signal.frequency;
  if (f_pitch < 5.0 * cfg.drive.signal.frequency) {
    rep.warnings.push_back(fmt::format(
        "wing pitch resonance {:.1f} Hz is not well above the {:.1f} Hz stroke frequency; pitch will not follow "
        "the aerodynamic load quasi-statically",
        f_pitch, cfg.drive.signal.frequency));
  }
  if (avg_lift > 0.0) {
    const Quantity normal = wing::peak_normal_force(units::force(avg_lift));
    const Quantity torque = wing::max_aero_torque(normal, units::length(cfg.wing.cop_distance));
    const double deflection = cfg.flexure_design.max_deflection;
    const Quantity thickness = units::length(cfg.flexure.thickness);
    const Quantity flex_length = units::length(cfg.flexure.length);
    const wing::FlexureSpec designed = wing::design_flexure(torque, units::angle(deflection), thickness,
                                                            cfg.flexure.material, flex_length,
                                                            cfg.flexure_design.n_parts);
    flex["design_average_lift_mN"] = avg_lift / 1e-3;
    flex["peak_normal_force_mN"] = normal.si() / 1e-3;
    flex["max_aero_torque_uNm"] = torque.si() / 1e-6;
    flex["designed_width_um"] = designed.total_width / 1e-6;
    flex["designed_part_width_um"] = designed.part_width() / 1e-6;
    flex["deflection_at_max_torque_deg"] = torque.si() / k_flex / deg;
    push(cmp, relative("peak normal force", "mN", published(cfg, "peak_normal_force", "mN"), normal.si() / 1e-3,
                       0.02));
    push(cmp, relative("max aerodynamic torque", "uNm", published(cfg, "max_aero_torque", "uNm"),
                       torque.si() / 1e-6, 0.02));
    // The published width was sized from the torque rounded to two figures.
    const double rounded_torque = published(cfg, "max_aero_torque", "");
    if (!std::isnan(rounded_torque)) {
      const wing::FlexureSpec from_rounded =
          wing::design_flexure(units::torque(rounded_torque), units::angle(deflection), thickness,
                               cfg.flexure.material, flex_length, cfg.flexure_design.n_parts);
      flex["designed_width_from_rounded_torque_um"] = from_rounded.total_width / 1e-6;
      const double w_pub = published(cfg, "flexure_width", "um");
      push(cmp, band("flexure width (rounded torque)", "um", w_pub, from_rounded.total_width / 1e-6, w_pub,
                     w_pub + 10.0));
    }
    push(cmp, info("flexure width (unrounded torque)", "um", published(cfg, "flexure_width", "um"),
                   designed.total_width / 1e-6));
  }
  doc["flexure_chain"] = flex;

  // Power chain.
  const double r_used = cfg.coil_resistance();
  const double joule = actuator::joule_power(cfg.drive.signal, units::resistance(r_used)).si();
  const double p_vehicle = specific_power_requirement(units::mass(cfg.budget.vehicle_mass), cfg.budget.specific_power).si();
  const double p_designed =
      specific_power_requirement(units::mass(cfg.budget.designed_lift), cfg.budget.specific_power).si();
  const Expectation expected =
      derated_expectation(units::mass(cfg.budget.designed_lift), units::power(p_designed), cfg.budget.derating);
  const double eff = efficiency(expected.power, units::power(joule));
  json power{{"coil_wire_length_mm", wire_length / 1e-3},
             {"coil_resistance_model_ohm", coil_model_r},
             {"coil_resistance_used_ohm", r_used},
             {"drive_rms_mV", cfg.drive.signal.rms() / 1e-3},
             {"joule_loss_mW", joule / 1e-3},
             {"specific_power_w_per_kg", cfg.budget.specific_power},
             {"required_power_uW", p_vehicle / 1e-6},
             {"designed_lift_per_wing_mg", cfg.budget.designed_lift / kMg},
             {"designed_power_uW", p_designed / 1e-6},
             {"lift_factor", cfg.budget.derating.lift_factor},
             {"power_factor", cfg.budget.derating.power_factor},
             {"expected_lift_mg", expected.lift.si() / kMg},
             {"expected_mech_power_uW", expected.power.si() / 1e-6},
             {"efficiency", eff},
             {"muscle_efficiency", cfg.budget.muscle_efficiency},
             {"muscle_to_device_ratio", cfg.budget.muscle_efficiency / eff}};
  doc["power_chain"] = power;
  push(cmp, band("coil resistance (model)", "Ohm", published(cfg, "coil_resistance", "Ohm"), coil_model_r, 1.3, 1.7));
  push(cmp, relative("joule loss", "mW", published(cfg, "joule_loss", "mW"), joule / 1e-3, 0.02));
  push(cmp, relative("power for 1 mg", "uW", published(cfg, "required_power_1mg", "uW"), p_vehicle / 1e-6, 1e-9));
  push(cmp, relative("expected mechanical power", "uW", published(cfg, "mech_power", "uW"),
                     expected.power.si() / 1e-6, 0.02));
  push(cmp, relative("expected lift", "mg", published(cfg, "expected_lift", "mg"), expected.lift.si() / kMg, 1e-9));
  push(cmp, absolute("efficiency", "%", published(cfg, "efficiency", "%"), 100.0 * eff, 0.03));

  // Simulation.
  if (sim_summary) {
    const json& s = *sim_summary;
    doc["simulation"] = s;
    if (s.value("config_hash", std::string{}) != cfg.hash) {
      rep.warnings.push_back("simulation summary was produced from a different config");
    }
    const double amp = s.at("stroke_amplitude_deg").get<double>();
    const double pmax = s.at("pitch_max_deg").get<double>();
    const double pmin = s.at("pitch_min_deg").get<double>();
    const double lift_mg = s.at("mean_lift_mgf").get<double>();
    push(cmp, absolute("stroke amplitude", "deg", published(cfg, "stroke_amplitude", "deg"), amp, 1.0));
    push(cmp, absolute("positive pitch extreme", "deg", published(cfg, "pitch_positive", "deg"), pmax, 1.0));
    push(cmp, absolute("negative pitch extreme", "deg", published(cfg, "pitch_negative", "deg"), -pmin, 1.0));
    push(cmp, band("mean lift vs expected lift", "mg", published(cfg, "expected_lift", "mg"), lift_mg, 0.1, 1.2));
    const double avg_lift_mg = lift_to_mass(published(cfg, "average_lift", "N")) / kMg;
    push(cmp, band("mean lift vs design average lift", "mg", avg_lift_mg, lift_mg, 0.1, 1.2));
    push(cmp, info("simulated aerodynamic power", "uW", published(cfg, "mech_power", "uW"),
                   s.at("mean_aero_power_w").get<double>() / 1e-6));
  } else {
    rep.warnings.push_back("no simulation summary supplied; report covers budget chains only");
  }

  json comparisons = json::array();
  for (const auto& c : cmp) comparisons.push_back(comparison_json(c));
  doc["comparisons"] = comparisons;
  doc["warnings"] = rep.warnings;
  rep.document = std::move(doc);
  return rep;
}

std::string DesignReport::to_text() const {
  std::string out = fmt::format("flapkit design report\nconfig {}\n\n", document.value("config_hash", std::string{}));
  out += fmt::format("{:<34} {:>12} {:>12} {:>9}  {:<20} {}\n", "quantity", "published", "computed", "delta",
                     "tolerance", "verdict");
  for (const auto& c : comparisons) {
    const std::string verdict = c.checked() ? (c.pass() ? "pass" : "FAIL") : "info";
    out += fmt::format("{:<34} {:>12.5g} {:>12.5g} {:>+8.2f}%  {:<20} {}  [{}]\n", c.name, c.published, c.computed,
                       100.0 * c.relative_delta(), c.tolerance, verdict, c.unit);
  }
  if (!warnings.empty()) {
    out += "\nwarnings:\n";
    for (const auto& w : warnings) out += "  - " + w + "\n";
  }
  return out;
}

json simulation_summary(const config::ProjectConfig& cfg, const dynamics::SimConfig& used,
                        const dynamics::TimeSeries& series, bool calibrated) {
  const int n = series.steps_per_cycle;
  const int cycles = series.cycles();
  const auto first = series.samples.end() - n;
  double phi_max = -1e300, phi_min = 1e300, psi_max = -1e300, psi_min = 1e300;
  double psi_at_max = 0.0, psi_at_min = 0.0;
  double lift = 0.0, aero_power = 0.0;
  for (auto it = first; it != series.samples.end(); ++it) {
    const auto& s = it->state;
    if (s.stroke_angle > phi_max) {
      phi_max = s.stroke_angle;
      psi_at_max = s.pitch_angle;
    }
    if (s.stroke_angle < phi_min) {
      phi_min = s.stroke_angle;
      psi_at_min = s.pitch_angle;
    }
    psi_max = std::max(psi_max, s.pitch_angle);
    psi_min = std::min(psi_min, s.pitch_angle);
    lift += it->loads.lift / n;
    aero_power += it->p_aero / n;
  }
  const dynamics::EnergyAudit audit = series.audit_cycle(cycles - 1);
  const double period = used.drive.period();
  const double f_linear = spring::resonance_frequency(used.oscillator).si();
  const double p_elec = audit.electrical / period;
  json j{{"schema", "flapkit.sim-summary/1"},
         {"config_hash", cfg.hash},
         {"cycles", cycles},
         {"dt_s", series.dt},
         {"pitch_model", used.pitch_model == dynamics::PitchModel::dynamic ? "dynamic" : "quasi_static"},
         {"drive_frequency_hz", used.drive.frequency},
         {"linear_resonance_hz", f_linear},
         {"detuning", used.drive.frequency / f_linear - 1.0},
         {"torque_constant_nm_per_a", used.k_t.k_t},
         {"torque_constant_calibrated", calibrated},
         {"stroke_amplitude_deg", 0.5 * (phi_max - phi_min) / deg},
         {"pitch_max_deg", psi_max / deg},
         {"pitch_min_deg", psi_min / deg},
         {"pitch_at_stroke_max_deg", psi_at_max / deg},
         {"pitch_at_stroke_min_deg", psi_at_min / deg},
         {"mean_lift_n", lift},
         {"mean_lift_mgf", lift_to_mass(lift) / kMg},
         {"mean_aero_power_w", aero_power},
         {"mean_drive_power_w", audit.drive / period},
         {"mean_joule_power_w", audit.joule / period},
         {"mean_electrical_power_w", p_elec},
         {"efficiency", p_elec > 0.0 ? audit.drive / audit.electrical : 0.0},
         {"energy_audit_residual", audit.electrical != 0.0 ? audit.residual() / audit.electrical : 0.0},
         {"mechanical_audit_residual", audit.drive != 0.0 ? audit.mechanical_residual() / audit.drive : 0.0}};
  return j;
}

}  // namespace flapkit::budget
