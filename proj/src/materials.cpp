#include "flapkit/materials.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "flapkit/errors.hpp"

namespace flapkit {

void MaterialSpec::validate() const {
  auto positive = [&](double v, std::string_view field) {
    if (!(v > 0.0)) throw SpecError(fmt::format("material '{}': {} must be positive", name, field));
  };
  if (name.empty()) throw SpecError("material name must not be empty");
  positive(elastic_modulus, "elastic_modulus");
  positive(density, "density");
  if (resistivity) positive(*resistivity, "resistivity");
  if (stock_thickness) positive(*stock_thickness, "stock_thickness");
}

MaterialDatabase MaterialDatabase::defaults() {
  MaterialDatabase db;
  // Handbook values except the polyester modulus and steel stock thickness,
  // which the device design fixes.
  db.materials_ = {
      {"polyester", 2.5e9, 1390.0, std::nullopt, 1.5e-6},
      {"stainless_steel", 193e9, 8000.0, 7.2e-7, 12.7e-6},
      {"copper", 117e9, 8960.0, 1.68e-8, std::nullopt},
      {"ndfeb_n52", 160e9, 7500.0, 1.4e-6, std::nullopt},
      {"carbon_fiber", 135e9, 1600.0, std::nullopt, 30e-6},
  };
  return db;
}

const MaterialSpec& MaterialDatabase::get(std::string_view name) const {
  auto it = std::find_if(materials_.begin(), materials_.end(),
                         [&](const MaterialSpec& m) { return m.name == name; });
  if (it == materials_.end()) throw SpecError(fmt::format("unknown material '{}'", name));
  return *it;
}

bool MaterialDatabase::contains(std::string_view name) const {
  return std::any_of(materials_.begin(), materials_.end(),
                     [&](const MaterialSpec& m) { return m.name == name; });
}

void MaterialDatabase::override_material(MaterialSpec spec) {
  spec.validate();
  auto it = std::find_if(materials_.begin(), materials_.end(),
                         [&](const MaterialSpec& m) { return m.name == spec.name; });
  if (it == materials_.end()) {
    materials_.push_back(std::move(spec));
  } else {
    *it = std::move(spec);
  }
}

}  // namespace flapkit
