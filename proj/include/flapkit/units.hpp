#pragma once

// Dimension-tagged scalar quantities.
//
// Values are always stored in SI base units. Customary units (mg, mm, uNm,
// uW, mV, ...) exist only at I/O boundaries through parse_quantity/convert.
// The set of dimensions is closed: a product or quotient whose exponent
// signature is not one of the registered dimensions throws DimensionError.

#include <array>
#include <string>
#include <string_view>

#include "flapkit/errors.hpp"

namespace flapkit {

enum class Dimension {
  dimensionless,
  angle,
  length,
  area,
  volume,
  mass,
  time,
  frequency,
  angular_rate,
  inertia,
  torque,
  torsional_stiffness,
  force,
  power,
  voltage,
  current,
  resistance,
  pressure,
  density,
  resistivity,
  torque_constant,
};

std::string_view to_string(Dimension d);

class Quantity {
 public:
  constexpr Quantity() = default;
  constexpr Quantity(double value, Dimension dim) : value_(value), dim_(dim) {}

  constexpr double si() const { return value_; }
  constexpr Dimension dimension() const { return dim_; }

  Quantity operator-() const { return {-value_, dim_}; }
  Quantity operator+(const Quantity& rhs) const;
  Quantity operator-(const Quantity& rhs) const;
  Quantity operator*(const Quantity& rhs) const;
  Quantity operator/(const Quantity& rhs) const;
  Quantity operator*(double s) const { return {value_ * s, dim_}; }
  Quantity operator/(double s) const { return {value_ / s, dim_}; }
  friend Quantity operator*(double s, const Quantity& q) { return q * s; }

  // Ordering requires matching dimensions.
  bool operator<(const Quantity& rhs) const;
  bool operator==(const Quantity& rhs) const;

 private:
  double value_ = 0.0;
  Dimension dim_ = Dimension::dimensionless;
};

// Throws DimensionError unless both quantities share a dimension.
void require_same_dimension(const Quantity& a, const Quantity& b, std::string_view context);

/// True iff |a-b| <= rel_tol * max(|a|,|b|), with a 1e-18 SI absolute floor
/// near zero. Throws DimensionError on mismatch, std::invalid_argument for
/// rel_tol <= 0.
bool approx_eq(const Quantity& a, const Quantity& b, double rel_tol);

/// SI value of one `unit` and the dimension it measures.
struct UnitInfo {
  std::string_view symbol;
  Dimension dimension;
  double scale;
};

/// Looks up a unit symbol. `expected` disambiguates symbols shared between
/// dimensions (a torque unit read as torsional stiffness is taken per radian).
UnitInfo lookup_unit(std::string_view symbol, Dimension expected);

/// Expresses `q` in `unit`. Throws UnitError if the unit does not measure
/// q's dimension.
double convert(const Quantity& q, std::string_view unit);

/// Builds a quantity from a value expressed in `unit`.
Quantity from_unit(double value, std::string_view unit, Dimension expected);

/// Parses strings like "0.3mm", "70 mV", "0.8uNm". The unit suffix is
/// mandatory unless `expected` is dimensionless.
Quantity parse_quantity(std::string_view text, Dimension expected);

/// Canonical display unit for a dimension ("mg" for mass, "uNm" for torque...).
std::string_view display_unit(Dimension d);

/// "0.34 uNm" style rendering in the display unit, `precision` significant digits.
std::string format_quantity(const Quantity& q, int precision = 6);

namespace units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg = pi / 180.0;
inline constexpr double standard_gravity = 9.80665;

inline Quantity length(double m) { return {m, Dimension::length}; }
inline Quantity mass(double kg) { return {kg, Dimension::mass}; }
inline Quantity frequency(double hz) { return {hz, Dimension::frequency}; }
inline Quantity stiffness(double nm_per_rad) { return {nm_per_rad, Dimension::torsional_stiffness}; }
inline Quantity torque(double nm) { return {nm, Dimension::torque}; }
inline Quantity power(double w) { return {w, Dimension::power}; }
inline Quantity voltage(double v) { return {v, Dimension::voltage}; }
inline Quantity resistance(double ohm) { return {ohm, Dimension::resistance}; }
inline Quantity inertia(double kgm2) { return {kgm2, Dimension::inertia}; }
inline Quantity angle(double rad) { return {rad, Dimension::angle}; }
inline Quantity force(double n) { return {n, Dimension::force}; }

}  // namespace units

}  // namespace flapkit
