#include "flapkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "flapkit/errors.hpp"

namespace flapkit::config {

using nlohmann::json;

namespace {

// Strict reader over one JSON object. Every key must be consumed before
// finish(), otherwise it is reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(location(), "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  Quantity quantity(const std::string& key, Dimension dim) {
    const json& v = take(key);
    if (dim == Dimension::dimensionless && v.is_number()) return {v.get<double>(), dim};
    if (!v.is_string()) {
      throw ConfigError(location(key), fmt::format("expected a string with a {} unit suffix", to_string(dim)));
    }
    try {
      return parse_quantity(v.get<std::string>(), dim);
    } catch (const UnitError& e) {
      throw ConfigError(location(key), e.what());
    }
  }
  double si(const std::string& key, Dimension dim) { return quantity(key, dim).si(); }
  double si_or(const std::string& key, Dimension dim, double fallback) {
    return has(key) ? si(key, dim) : fallback;
  }
  std::optional<double> optional_si(const std::string& key, Dimension dim) {
    if (!has(key)) return std::nullopt;
    return si(key, dim);
  }

  double number(const std::string& key) {
    const json& v = take(key);
    if (!v.is_number()) throw ConfigError(location(key), "expected a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) {
    const json& v = take(key);
    if (!v.is_number_integer()) throw ConfigError(location(key), "expected an integer");
    return v.get<int>();
  }
  int integer_or(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = take(key);
    if (!v.is_boolean()) throw ConfigError(location(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = take(key);
    if (!v.is_string()) throw ConfigError(location(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  Section section(const std::string& key) { return Section(take(key), location(key)); }

  const json& raw(const std::string& key) { return take(key); }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (auto it = node_.begin(); it != node_.end(); ++it) out.push_back(it.key());
    return out;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(location(it.key()), "unknown key");
    }
  }

  std::string location(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "/" : path_;
    return path_ + "/" + key;
  }

 private:
  const json& take(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError(location(key), "missing required key");
    used_.insert(key);
    return node_.at(key);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename F>
auto checked(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const SpecError& e) {
    throw ConfigError(where, e.what());
  }
}

MaterialSpec material_ref(Section& s, const std::string& key, const MaterialDatabase& db) {
  const std::string name = s.string(key);
  if (!db.contains(name)) throw ConfigError(s.location(key), fmt::format("unknown material '{}'", name));
  return db.get(name);
}

void parse_materials(Section s, MaterialDatabase& db) {
  for (const auto& name : s.keys()) {
    Section m = s.section(name);
    MaterialSpec spec = db.contains(name) ? db.get(name) : MaterialSpec{name, 0.0, 0.0, {}, {}};
    spec.elastic_modulus = m.si_or("elastic_modulus", Dimension::pressure, spec.elastic_modulus);
    spec.density = m.si_or("density", Dimension::density, spec.density);
    if (m.has("resistivity")) spec.resistivity = m.si("resistivity", Dimension::resistivity);
    if (m.has("stock_thickness")) spec.stock_thickness = m.si("stock_thickness", Dimension::length);
    m.finish();
    checked(m.location(), [&] {
      db.override_material(spec);
      return 0;
    });
  }
  s.finish();
}

aero::CoefficientModel parse_coefficients(Section s, aero::CoefficientModel m) {
  m.cl_offset = s.number_or("cl_offset", m.cl_offset);
  m.cl_amplitude = s.number_or("cl_amplitude", m.cl_amplitude);
  m.cl_rate = s.number_or("cl_rate", m.cl_rate);
  m.cl_phase_deg = s.number_or("cl_phase_deg", m.cl_phase_deg);
  m.cd_offset = s.number_or("cd_offset", m.cd_offset);
  m.cd_amplitude = s.number_or("cd_amplitude", m.cd_amplitude);
  m.cd_rate = s.number_or("cd_rate", m.cd_rate);
  m.cd_phase_deg = s.number_or("cd_phase_deg", m.cd_phase_deg);
  s.finish();
  return m;
}

}  // namespace

const std::map<std::string, Dimension>& published_keys() {
  static const std::map<std::string, Dimension> keys{
      {"arc_radius", Dimension::length},
      {"average_lift", Dimension::force},
      {"coil_mass", Dimension::mass},
      {"coil_resistance", Dimension::resistance},
      {"design_frequency", Dimension::frequency},
      {"design_stiffness", Dimension::torsional_stiffness},
      {"drive_amplitude", Dimension::voltage},
      {"efficiency", Dimension::dimensionless},
      {"expected_lift", Dimension::mass},
      {"flexure_length", Dimension::length},
      {"flexure_modulus", Dimension::pressure},
      {"flexure_part_width", Dimension::length},
      {"flexure_width", Dimension::length},
      {"joule_loss", Dimension::power},
      {"magnet_mass", Dimension::mass},
      {"max_aero_torque", Dimension::torque},
      {"mech_power", Dimension::power},
      {"muscle_efficiency", Dimension::dimensionless},
      {"net_mass", Dimension::mass},
      {"peak_normal_force", Dimension::force},
      {"pitch_negative", Dimension::angle},
      {"pitch_positive", Dimension::angle},
      {"required_power_1mg", Dimension::power},
      {"required_stiffness", Dimension::torsional_stiffness},
      {"resonance", Dimension::frequency},
      {"stroke_amplitude", Dimension::angle},
      {"wing_length", Dimension::length},
  };
  return keys;
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

ProjectConfig parse_config(const json& doc) {
  ProjectConfig cfg;
  cfg.source = doc;
  cfg.hash = sha256_hex(doc.dump());
  Section root(doc, "");

  const std::string schema = root.string("schema");
  if (schema != "flapkit.config/1") {
    throw ConfigError("/schema", fmt::format("unsupported schema '{}', expected 'flapkit.config/1'", schema));
  }
  if (root.has("materials")) parse_materials(root.section("materials"), cfg.materials);
  const MaterialDatabase& db = cfg.materials;

  {
    Section s = root.section("magnet");
    cfg.magnet.height = s.si("height", Dimension::length);
    cfg.magnet.diameter = s.si("diameter", Dimension::length);
    cfg.magnet.material = material_ref(s, "material", db);
    s.finish();
    checked(s.location(), [&] { cfg.magnet.validate(); return 0; });
  }
  {
    Section s = root.section("coil");
    cfg.coil.wire_diameter = s.si("wire_diameter", Dimension::length);
    cfg.coil.layers = s.integer("layers");
    cfg.coil.turns_per_layer = s.integer("turns_per_layer");
    cfg.coil.inner_diameter = s.si("inner_diameter", Dimension::length);
    cfg.coil.height = s.si("height", Dimension::length);
    cfg.coil.material = material_ref(s, "material", db);
    s.finish();
    checked(s.location(), [&] { cfg.coil.validate(); return 0; });
  }
  {
    Section s = root.section("spring");
    cfg.spring.n_beams = s.integer("n_beams");
    cfg.spring.beam_length = s.si("beam_length", Dimension::length);
    cfg.spring.beam_width = s.si("beam_width", Dimension::length);
    cfg.spring.beam_thickness = s.si("beam_thickness", Dimension::length);
    cfg.spring.material = material_ref(s, "material", db);
    cfg.spring.topology_factor = s.number_or("topology_factor", 1.0);
    if (s.has("design")) {
      Section d = s.section("design");
      spring::DesignConstraints c;
      c.thickness = d.si_or("thickness", Dimension::length, cfg.spring.beam_thickness);
      c.width_min = d.si("width_min", Dimension::length);
      c.width_max = d.si("width_max", Dimension::length);
      c.width_steps = d.integer_or("width_steps", 1);
      c.length_min = d.si("length_min", Dimension::length);
      c.length_max = d.si("length_max", Dimension::length);
      c.n_beams_min = d.integer("n_beams_min");
      c.n_beams_max = d.integer("n_beams_max");
      c.rel_tolerance = d.number_or("tolerance", 0.02);
      d.finish();
      checked(d.location(), [&] { c.validate(); return 0; });
      cfg.spring_design = c;
    }
    s.finish();
    checked(s.location(), [&] { cfg.spring.validate(); return 0; });
  }
  {
    Section s = root.section("oscillator");
    auto& o = cfg.oscillator;
    o.point_mass = s.si("point_mass", Dimension::mass);
    o.arc_radius = s.si("arc_radius", Dimension::length);
    o.design_frequency = s.si("design_frequency", Dimension::frequency);
    o.stiffness = s.si("stiffness", Dimension::torsional_stiffness);
    o.observed_resonance = s.optional_si("observed_resonance", Dimension::frequency);
    o.extra_inertia = s.si_or("extra_inertia", Dimension::inertia, 0.0);
    o.damping_ratio = s.number_or("damping_ratio", 0.0);
    const std::string closure = s.string_or("closure", "point_mass");
    if (closure == "point_mass") {
      o.closure = Closure::point_mass;
    } else if (closure == "infer_inertia") {
      o.closure = Closure::infer_inertia;
    } else if (closure == "infer_stiffness") {
      o.closure = Closure::infer_stiffness;
    } else {
      throw ConfigError(s.location("closure"), "expected point_mass, infer_inertia or infer_stiffness");
    }
    if (o.closure != Closure::point_mass && !o.observed_resonance) {
      throw ConfigError(s.location("observed_resonance"), "required by the selected closure");
    }
    s.finish();
    checked(s.location(), [&] { cfg.oscillator_spec().validate(); return 0; });
  }
  {
    Section s = root.section("wing");
    auto& w = cfg.wing;
    w.length = s.si("length", Dimension::length);
    w.aspect_ratio = s.number("aspect_ratio");
    w.mass = s.si("mass", Dimension::mass);
    w.n_veins = s.integer_or("n_veins", 0);
    w.vein_width = s.si_or("vein_width", Dimension::length, 0.0);
    w.membrane_thickness = s.si_or("membrane_thickness", Dimension::length, 0.0);
    w.adhesive_thickness = s.si_or("adhesive_thickness", Dimension::length, 0.0);
    w.cop_distance = s.si("cop_distance", Dimension::length);
    w.leading_edge_mass_fraction = s.number_or("leading_edge_mass_fraction", 0.0);
    w.root_offset = s.si_or("root_offset", Dimension::length, 0.0);
    s.finish();
    checked(s.location(), [&] { w.validate(); return 0; });
  }
  {
    Section s = root.section("flexure");
    auto& f = cfg.flexure;
    f.length = s.si("length", Dimension::length);
    f.thickness = s.si("thickness", Dimension::length);
    f.n_parts = s.integer_or("n_parts", 1);
    f.material = material_ref(s, "material", db);
    const bool has_total = s.has("total_width");
    const std::optional<double> part = s.optional_si("part_width", Dimension::length);
    if (has_total) f.total_width = s.si("total_width", Dimension::length);
    if (!has_total && !part) throw ConfigError(s.location("total_width"), "total_width or part_width is required");
    if (!has_total) f.total_width = *part * f.n_parts;
    if (part && std::abs(*part * f.n_parts - f.total_width) > 1e-6) {
      throw ConfigError(s.location("part_width"),
                        fmt::format("{} parts of {:.4g} um do not make up {:.4g} um within 1 um", f.n_parts,
                                    *part * 1e6, f.total_width * 1e6));
    }
    if (s.has("design")) {
      Section d = s.section("design");
      cfg.flexure_design.average_lift = d.si("average_lift", Dimension::force);
      cfg.flexure_design.max_deflection = d.si("max_deflection", Dimension::angle);
      cfg.flexure_design.n_parts = d.integer_or("n_parts", f.n_parts);
      d.finish();
    }
    s.finish();
    checked(s.location(), [&] { f.validate(); return 0; });
  }
  {
    Section s = root.section("stops");
    auto& st = cfg.stops;
    st.enabled = s.boolean_or("enabled", true);
    st.positive_limit = s.si("positive_limit", Dimension::angle);
    st.negative_limit = s.si("negative_limit", Dimension::angle);
    st.restitution = s.number_or("restitution", 0.0);
    s.finish();
    checked(s.location(), [&] { st.validate(); return 0; });
  }
  if (root.has("aero")) {
    Section s = root.section("aero");
    auto& a = cfg.aero;
    a.enabled = s.boolean_or("enabled", true);
    a.air_density = s.si_or("air_density", Dimension::density, a.air_density);
    a.n_blade_elements = s.integer_or("n_blade_elements", a.n_blade_elements);
    if (s.has("coefficients")) a.coefficients = parse_coefficients(s.section("coefficients"), a.coefficients);
    s.finish();
    checked(s.location(), [&] { a.validate(); return 0; });
  }
  {
    Section s = root.section("drive");
    auto& d = cfg.drive;
    const std::string wf = s.string_or("waveform", "square");
    if (wf == "square") {
      d.signal.waveform = actuator::Waveform::square;
    } else if (wf == "sine") {
      d.signal.waveform = actuator::Waveform::sine;
    } else {
      throw ConfigError(s.location("waveform"), "expected square or sine");
    }
    d.signal.amplitude = s.si("amplitude", Dimension::voltage);
    d.signal.frequency = s.si("frequency", Dimension::frequency);
    if (s.has("torque_constant")) {
      const json& v = s.raw("torque_constant");
      if (v.is_string() && v.get<std::string>() == "auto") {
        d.torque_constant.reset();
      } else if (v.is_string()) {
        try {
          d.torque_constant = parse_quantity(v.get<std::string>(), Dimension::torque_constant).si();
        } catch (const UnitError& e) {
          throw ConfigError(s.location("torque_constant"), e.what());
        }
      } else {
        throw ConfigError(s.location("torque_constant"), "expected \"auto\" or a value such as \"0.3uNm/A\"");
      }
    }
    d.target_stroke_amplitude = s.si_or("target_stroke_amplitude", Dimension::angle, 45.0 * units::deg);
    if (s.has("coil_resistance")) {
      const json& v = s.raw("coil_resistance");
      if (v.is_string() && v.get<std::string>() == "model") {
        d.coil_resistance.reset();
      } else if (v.is_string()) {
        try {
          d.coil_resistance = parse_quantity(v.get<std::string>(), Dimension::resistance).si();
        } catch (const UnitError& e) {
          throw ConfigError(s.location("coil_resistance"), e.what());
        }
      } else {
        throw ConfigError(s.location("coil_resistance"), "expected \"model\" or a value such as \"1.5Ohm\"");
      }
    }
    s.finish();
    checked(s.location(), [&] { d.signal.validate(); return 0; });
  }
  {
    Section s = root.section("simulation");
    auto& sim = cfg.simulation;
    sim.dt = s.si_or("dt", Dimension::time, 1.0 / (1000.0 * cfg.drive.signal.frequency));
    sim.cycles = s.integer_or("cycles", 200);
    const std::string model = s.string_or("pitch_model", "dynamic");
    if (model == "dynamic") {
      sim.pitch_model = dynamics::PitchModel::dynamic;
    } else if (model == "quasi_static") {
      sim.pitch_model = dynamics::PitchModel::quasi_static;
    } else {
      throw ConfigError(s.location("pitch_model"), "expected dynamic or quasi_static");
    }
    sim.pitch_damping_ratio = s.number_or("pitch_damping_ratio", sim.pitch_damping_ratio);
    sim.pitch_misalignment = s.si_or("pitch_misalignment", Dimension::angle, 0.0);
    s.finish();
    if (sim.cycles < 1) throw ConfigError(s.location("cycles"), "must be at least 1");
  }
  if (root.has("budget")) {
    Section s = root.section("budget");
    auto& b = cfg.budget;
    if (s.has("table_masses")) {
      Section t = s.section("table_masses");
      for (const auto& name : t.keys()) b.table_masses.emplace_back(name, t.si(name, Dimension::mass));
      t.finish();
    }
    b.printed_net = s.optional_si("printed_net", Dimension::mass);
    b.specific_power = s.number_or("specific_power_w_per_kg", b.specific_power);
    b.vehicle_mass = s.si_or("vehicle_mass", Dimension::mass, 1e-6);
    b.designed_lift = s.si_or("designed_lift_per_wing", Dimension::mass, 0.5e-6);
    b.derating.lift_factor = s.number_or("lift_factor", b.derating.lift_factor);
    b.derating.power_factor = s.number_or("power_factor", b.derating.power_factor);
    b.muscle_efficiency = s.number_or("muscle_efficiency", b.muscle_efficiency);
    s.finish();
    checked(s.location(), [&] { b.derating.validate(); return 0; });
  }
  if (root.has("published")) {
    Section s = root.section("published");
    const auto& keys = published_keys();
    for (const auto& name : s.keys()) {
      auto it = keys.find(name);
      if (it == keys.end()) continue;  // reported by finish()
      cfg.published.emplace(name, s.quantity(name, it->second));
    }
    s.finish();
  }
  cfg.output_dir = root.string_or("output_dir", cfg.output_dir);
  root.finish();

  checked("/simulation", [&] { cfg.sim_config().validate(); return 0; });
  return cfg;
}

ProjectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return parse_config(doc);
}

spring::OscillatorSpec ProjectConfig::oscillator_spec() const {
  const auto& o = oscillator;
  spring::OscillatorSpec osc =
      spring::OscillatorSpec::from_point_mass(o.stiffness, o.point_mass, o.arc_radius, o.extra_inertia);
  if (o.closure == Closure::infer_inertia) {
    osc.inertia =
        spring::effective_inertia_from_resonance(units::stiffness(o.stiffness), units::frequency(*o.observed_resonance))
            .si();
  } else if (o.closure == Closure::infer_stiffness) {
    osc.stiffness =
        spring::stiffness_from_resonance(units::inertia(osc.inertia), units::frequency(*o.observed_resonance)).si();
  }
  osc.damping_ratio = o.damping_ratio;
  return osc;
}

double ProjectConfig::coil_resistance() const {
  return drive.coil_resistance ? *drive.coil_resistance : actuator::coil_resistance(coil).si();
}

dynamics::SimConfig ProjectConfig::sim_config() const {
  dynamics::SimConfig sc;
  sc.oscillator = oscillator_spec();
  sc.wing = wing;
  sc.flexure = flexure;
  sc.stops = stops;
  sc.aero = aero;
  sc.drive = drive.signal;
  sc.k_t.k_t = drive.torque_constant.value_or(0.0);
  sc.coil_resistance = coil_resistance();
  sc.dt = simulation.dt;
  sc.pitch_damping_ratio = simulation.pitch_damping_ratio;
  sc.pitch_misalignment = simulation.pitch_misalignment;
  sc.pitch_model = simulation.pitch_model;
  return sc;
}

}  // namespace flapkit::config
