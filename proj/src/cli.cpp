#include "flapkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "flapkit/calibration.hpp"
#include "flapkit/config.hpp"
#include "flapkit/errors.hpp"
#include "flapkit/report.hpp"

namespace flapkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using units::deg;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string config_path;
  std::string out_dir;
};

fs::path output_dir(const Common& c, const config::ProjectConfig& cfg) {
  fs::path dir = c.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json state_json(const dynamics::SimState& s) {
  return {{"time_s", s.time},
          {"stroke_angle_deg", s.stroke_angle / deg},
          {"stroke_rate_deg_per_s", s.stroke_rate / deg},
          {"pitch_angle_deg", s.pitch_angle / deg},
          {"pitch_rate_deg_per_s", s.pitch_rate / deg}};
}

// Simulation config ready to run: k_t calibrated when the config asks for it.
struct Prepared {
  dynamics::SimConfig sim;
  bool calibrated = false;
};

Prepared prepare(const config::ProjectConfig& cfg, std::ostream& out) {
  Prepared p{cfg.sim_config(), false};
  if (cfg.needs_calibration()) {
    const auto result = actuator::calibrate_torque_constant(cfg.drive.target_stroke_amplitude, p.sim);
    p.sim.k_t = result.k_t;
    p.calibrated = true;
    out << fmt::format("calibrated k_t = {:.6g} N*m/A ({} simulations, amplitude {:.3f} deg)\n", result.k_t.k_t,
                       result.simulations, result.achieved_amplitude / deg);
  }
  return p;
}

int cmd_design_spring(const Common& c, const std::optional<std::string>& freq,
                      const std::optional<std::string>& stiff, std::ostream& out) {
  if (freq.has_value() == stiff.has_value()) throw UsageError("give exactly one of --target-freq or --target-stiffness");
  const auto cfg = config::load_config(c.config_path);
  if (!cfg.spring_design) throw config::ConfigError("/spring/design", "no design constraints in config");

  json doc{{"schema", "flapkit.spring-design/1"}, {"config_hash", cfg.hash}};
  Quantity target;
  if (freq) {
    const Quantity f = parse_quantity(*freq, Dimension::frequency);
    target = spring::required_stiffness(units::mass(cfg.oscillator.point_mass),
                                        units::length(cfg.oscillator.arc_radius), f);
    doc["target_frequency_hz"] = f.si();
  } else {
    target = parse_quantity(*stiff, Dimension::torsional_stiffness);
  }
  out << fmt::format("target stiffness {:.4g} uNm\n", convert(target, "uNm"));
  doc["target_stiffness_uNm"] = convert(target, "uNm");

  const fs::path dir = output_dir(c, cfg);
  try {
    const auto d = spring::design_spring(target, cfg.spring.material, *cfg.spring_design, cfg.spring.topology_factor);
    doc["spring"] = {{"n_beams", d.spec.n_beams},
                     {"beam_length_um", d.spec.beam_length / 1e-6},
                     {"beam_width_um", d.spec.beam_width / 1e-6},
                     {"beam_thickness_um", d.spec.beam_thickness / 1e-6},
                     {"material", d.spec.material.name},
                     {"topology_factor", d.spec.topology_factor},
                     {"footprint_mm2", d.spec.footprint() / 1e-6}};
    doc["achieved_stiffness_uNm"] = d.achieved_stiffness / 1e-6;
    doc["relative_error"] = d.relative_error;
    doc["candidates_evaluated"] = d.candidates_evaluated;
    out << fmt::format("spring: {} beams, {:.1f} um x {:.1f} um x {:.1f} um ({}), k = {:.4g} uNm ({:+.2f}%)\n",
                       d.spec.n_beams, d.spec.beam_length / 1e-6, d.spec.beam_width / 1e-6,
                       d.spec.beam_thickness / 1e-6, d.spec.material.name, d.achieved_stiffness / 1e-6,
                       100.0 * d.relative_error);
    write_file(dir / "spring_design.json", dump(doc));
    return kSuccess;
  } catch (const InfeasibleDesign& e) {
    doc["infeasible"] = {{"message", e.what()}, {"nearest_uNm", e.nearest() / 1e-6}, {"hint", e.hint()}};
    write_file(dir / "spring_design.json", dump(doc));
    throw;
  }
}

std::string sample_header() {
  return "time_s,stroke_deg,stroke_rate_deg_s,pitch_deg,pitch_rate_deg_s,lift_n,drag_n,aero_stroke_torque_nm,"
         "aero_pitch_torque_nm,drive_torque_nm,p_joule_w,p_elec_w,p_aero_w\n";
}

std::string sample_row(const dynamics::Sample& s) {
  return fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n",
                     s.state.time, s.state.stroke_angle / deg, s.state.stroke_rate / deg, s.state.pitch_angle / deg,
                     s.state.pitch_rate / deg, s.loads.lift, s.loads.drag, s.loads.stroke_torque,
                     s.loads.pitch_torque, s.tau_drive, s.p_joule, s.p_elec, s.p_aero);
}

int cmd_simulate(const Common& c, std::optional<int> cycles_flag, int stride, std::ostream& out) {
  if (cycles_flag && *cycles_flag < 1) throw UsageError("--cycles must be at least 1");
  if (stride < 1) throw UsageError("--stride must be at least 1");
  const auto cfg = config::load_config(c.config_path);
  const fs::path dir = output_dir(c, cfg);
  const int cycles = cycles_flag.value_or(cfg.simulation.cycles);

  Prepared p;
  try {
    p = prepare(cfg, out);
    const auto series = dynamics::simulate(p.sim, cycles);

    std::string csv = fmt::format("# config_hash: {}\n", cfg.hash) + sample_header();
    for (std::size_t i = 0; i < series.samples.size(); i += static_cast<std::size_t>(stride)) {
      csv += sample_row(series.samples[i]);
    }
    write_file(dir / "timeseries.csv", csv);

    const json summary = budget::simulation_summary(cfg, p.sim, series, p.calibrated);
    write_file(dir / "summary.json", dump(summary));
    out << fmt::format("stroke amplitude {:.2f} deg, pitch [{:.2f}, {:.2f}] deg, detuning {:+.3f}%\n",
                       summary["stroke_amplitude_deg"].get<double>(), summary["pitch_min_deg"].get<double>(),
                       summary["pitch_max_deg"].get<double>(), 100.0 * summary["detuning"].get<double>());
    out << fmt::format("mean lift {:.4g} mgf, aero power {:.4g} uW, electrical {:.4g} mW, joule {:.4g} mW\n",
                       summary["mean_lift_mgf"].get<double>(), summary["mean_aero_power_w"].get<double>() / 1e-6,
                       summary["mean_electrical_power_w"].get<double>() / 1e-3,
                       summary["mean_joule_power_w"].get<double>() / 1e-3);
    out << "wrote " << (dir / "timeseries.csv").string() << " and " << (dir / "summary.json").string() << "\n";
    return kSuccess;
  } catch (const dynamics::NumericalFailure& e) {
    json fail{{"schema", "flapkit.failure/1"},
              {"config_hash", cfg.hash},
              {"error", e.what()},
              {"last_valid_state", state_json(e.last_valid())}};
    write_file(dir / "failure.json", dump(fail));
    throw;
  }
}

int cmd_sweep(const Common& c, const std::string& from, const std::string& to, int points, unsigned parallel,
              std::ostream& out) {
  if (points < 1) throw UsageError("--points must be at least 1");
  const double f_lo = parse_quantity(from, Dimension::frequency).si();
  const double f_hi = parse_quantity(to, Dimension::frequency).si();
  if (!(f_lo > 0.0) || f_hi < f_lo || (points > 1 && f_hi == f_lo)) throw UsageError("invalid frequency range");
  const auto cfg = config::load_config(c.config_path);
  const fs::path dir = output_dir(c, cfg);

  const Prepared p = prepare(cfg, out);
  const auto sweep = dynamics::frequency_sweep(p.sim, f_lo, f_hi, points, {}, dynamics::sweep_threads(parallel));

  std::string csv = fmt::format("# config_hash: {}\n", cfg.hash);
  csv += "frequency_hz,amplitude_deg,mean_lift_mgf,mean_aero_power_w,mean_electrical_power_w,mean_joule_power_w,"
         "settled,errors\n";
  std::string dat = fmt::format("# config_hash: {}\n# frequency_hz amplitude_deg\n", cfg.hash);
  const dynamics::SweepPoint* peak = nullptr;
  int failures = 0;
  for (const auto& pt : sweep) {
    std::string error = pt.error;
    std::replace(error.begin(), error.end(), ',', ';');
    csv += fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{},{}\n", pt.frequency, pt.amplitude / deg,
                       budget::lift_to_mass(pt.mean_lift) / 1e-6, pt.mean_aero_power, pt.mean_electrical_power,
                       pt.mean_joule_power, pt.settled ? 1 : 0, error);
    if (!pt.error.empty()) {
      ++failures;
      continue;
    }
    dat += fmt::format("{:.9g} {:.9g}\n", pt.frequency, pt.amplitude / deg);
    if (!peak || pt.amplitude > peak->amplitude) peak = &pt;
  }
  write_file(dir / "sweep.csv", csv);
  write_file(dir / "sweep.dat", dat);
  if (peak) out << fmt::format("peak amplitude {:.2f} deg at {:.2f} Hz\n", peak->amplitude / deg, peak->frequency);
  if (failures > 0) out << fmt::format("{} of {} points failed; see the errors column\n", failures, points);
  out << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.dat").string() << "\n";
  return kSuccess;
}

int cmd_report(const Common& c, const std::string& summary_path, const std::string& format, std::ostream& out,
               std::ostream& err) {
  const auto cfg = config::load_config(c.config_path);
  const fs::path dir = output_dir(c, cfg);
  std::optional<json> summary;
  if (!summary_path.empty()) {
    std::ifstream in(summary_path);
    if (in) {
      try {
        summary = json::parse(in);
      } catch (const json::parse_error& e) {
        throw config::ConfigError(summary_path, e.what());
      }
    } else {
      err << "warning: simulation summary " << summary_path << " not found; writing a budget-only report\n";
    }
  }
  const auto rep = budget::build_report(cfg, summary);
  if (format == "json") {
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  }
  if (format == "json" || format == "both") {
    write_file(dir / "report.json", dump(rep.document));
    out << "wrote " << (dir / "report.json").string() << "\n";
  }
  if (format == "text" || format == "both") {
    const std::string text = rep.to_text();
    write_file(dir / "report.txt", text);
    out << text;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flapkit: design, simulation and budget toolkit for a resonant flapping-wing actuator", "flapkit"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_path, "Project config (JSON)")->required();
    sub->add_option("-o,--out", common.out_dir, "Output directory (default: output_dir from the config)");
  };

  auto* design = app.add_subcommand("design-spring", "Size the stroke spring for a target frequency or stiffness");
  add_common(design);
  std::optional<std::string> target_freq, target_stiff;
  design->add_option("--target-freq", target_freq, "Target resonance, e.g. 130Hz");
  design->add_option("--target-stiffness", target_stiff, "Target stiffness, e.g. 0.8uNm");

  auto* simulate = app.add_subcommand("simulate", "Simulate the configured drive from rest");
  add_common(simulate);
  std::optional<int> cycles;
  int stride = 1;
  simulate->add_option("--cycles", cycles, "Drive cycles (default: simulation.cycles)");
  simulate->add_option("--stride", stride, "Write every n-th step to the CSV");

  auto* sweep = app.add_subcommand("sweep", "Steady-state stroke amplitude over a frequency range");
  add_common(sweep);
  std::string from, to;
  int points = 0;
  unsigned parallel = 1;
  sweep->add_option("--from", from, "Lowest frequency, e.g. 100Hz")->required();
  sweep->add_option("--to", to, "Highest frequency, e.g. 170Hz")->required();
  sweep->add_option("--points", points, "Number of frequencies")->required();
  sweep->add_option("--parallel", parallel, "Worker threads (0: all cores, capped by FLAPKIT_THREADS)");

  auto* report = app.add_subcommand("report", "Compare computed figures with the published ones");
  add_common(report);
  std::string summary_path, format = "both";
  report->add_option("--summary", summary_path, "Simulation summary written by simulate");
  report->add_option("--format", format, "json, text or both")->check(CLI::IsMember({"json", "text", "both"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (design->parsed()) return cmd_design_spring(common, target_freq, target_stiff, out);
    if (simulate->parsed()) return cmd_simulate(common, cycles, stride, out);
    if (sweep->parsed()) return cmd_sweep(common, from, to, points, parallel, out);
    if (report->parsed()) return cmd_report(common, summary_path, format, out, err);
  } catch (const InfeasibleDesign& e) {
    err << "infeasible: " << e.what() << "\n";
    err << fmt::format("nearest achievable: {:.6g} (SI); {}\n", e.nearest(), e.hint());
    return kInfeasible;
  } catch (const dynamics::NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    err << "last valid state: " << state_json(e.last_valid()).dump() << "\n";
    return kNumericalFailure;
  } catch (const actuator::CalibrationFailure& e) {
    err << "calibration failed: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const config::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnitError& e) {
    err << "unit error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SpecError& e) {
    err << "invalid specification: " << e.what() << "\n";
    return kConfigError;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace flapkit::cli
