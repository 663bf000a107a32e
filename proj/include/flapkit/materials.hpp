#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flapkit {

/// Bulk material properties in SI units.
struct MaterialSpec {
  std::string name;
  double elastic_modulus = 0.0;            // Pa
  double density = 0.0;                    // kg/m^3
  std::optional<double> resistivity;       // Ohm*m, conductors only
  std::optional<double> stock_thickness;   // m, sheet stock where it matters

  /// Throws SpecError unless every present value is strictly positive.
  void validate() const;
};

/// Read-only default material set. Copies may be overridden from config.
class MaterialDatabase {
 public:
  static constexpr std::string_view kVersion = "flapkit-materials-1";

  /// Built-in defaults: polyester, stainless_steel, copper, ndfeb_n52,
  /// carbon_fiber.
  static MaterialDatabase defaults();

  const MaterialSpec& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::vector<MaterialSpec>& all() const { return materials_; }

  /// Replaces (or adds) a material after validating it.
  void override_material(MaterialSpec spec);

 private:
  std::vector<MaterialSpec> materials_;
};

}  // namespace flapkit
