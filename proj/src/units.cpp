#include "flapkit/units.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace flapkit {
namespace {

// Exponents of mass, length, time, current, angle.
using Signature = std::array<int, 5>;

struct DimensionInfo {
  Dimension dim;
  std::string_view name;
  Signature sig;
  std::string_view display;
};

constexpr std::array<DimensionInfo, 21> kDimensions{{
    {Dimension::dimensionless, "dimensionless", {0, 0, 0, 0, 0}, ""},
    {Dimension::angle, "angle", {0, 0, 0, 0, 1}, "deg"},
    {Dimension::length, "length", {0, 1, 0, 0, 0}, "mm"},
    {Dimension::area, "area", {0, 2, 0, 0, 0}, "mm2"},
    {Dimension::volume, "volume", {0, 3, 0, 0, 0}, "mm3"},
    {Dimension::mass, "mass", {1, 0, 0, 0, 0}, "mg"},
    {Dimension::time, "time", {0, 0, 1, 0, 0}, "ms"},
    {Dimension::frequency, "frequency", {0, 0, -1, 0, 0}, "Hz"},
    {Dimension::angular_rate, "angular rate", {0, 0, -1, 0, 1}, "rad/s"},
    {Dimension::inertia, "inertia", {1, 2, 0, 0, 0}, "kg*m2"},
    {Dimension::torque, "torque", {1, 2, -2, 0, 0}, "uNm"},
    {Dimension::torsional_stiffness, "torsional stiffness", {1, 2, -2, 0, -1}, "uNm/rad"},
    {Dimension::force, "force", {1, 1, -2, 0, 0}, "mN"},
    {Dimension::power, "power", {1, 2, -3, 0, 0}, "uW"},
    {Dimension::voltage, "voltage", {1, 2, -3, -1, 0}, "mV"},
    {Dimension::current, "current", {0, 0, 0, 1, 0}, "mA"},
    {Dimension::resistance, "resistance", {1, 2, -3, -2, 0}, "Ohm"},
    {Dimension::pressure, "pressure", {1, -1, -2, 0, 0}, "GPa"},
    {Dimension::density, "density", {1, -3, 0, 0, 0}, "kg/m3"},
    {Dimension::resistivity, "resistivity", {1, 3, -3, -2, 0}, "Ohm*m"},
    {Dimension::torque_constant, "torque constant", {1, 2, -2, -1, 0}, "uNm/A"},
}};

const DimensionInfo& info(Dimension d) {
  for (const auto& i : kDimensions) {
    if (i.dim == d) return i;
  }
  throw std::logic_error("unregistered dimension");
}

Dimension combine(Dimension a, Dimension b, int sign, char op) {
  Signature s = info(a).sig;
  const Signature& t = info(b).sig;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += sign * t[i];
  for (const auto& i : kDimensions) {
    if (i.sig == s) return i.dim;
  }
  throw DimensionError(fmt::format("{} {} {} has no registered dimension", info(a).name, op,
                                   info(b).name));
}

constexpr double kPi = units::pi;

// Symbols that share a scale are listed separately so "um" and "µm" both parse.
constexpr UnitInfo kUnits[] = {
    {"", Dimension::dimensionless, 1.0},
    {"%", Dimension::dimensionless, 1e-2},
    {"rad", Dimension::angle, 1.0},
    {"mrad", Dimension::angle, 1e-3},
    {"deg", Dimension::angle, kPi / 180.0},
    {"m", Dimension::length, 1.0},
    {"cm", Dimension::length, 1e-2},
    {"mm", Dimension::length, 1e-3},
    {"um", Dimension::length, 1e-6},
    {"µm", Dimension::length, 1e-6},
    {"nm", Dimension::length, 1e-9},
    {"m2", Dimension::area, 1.0},
    {"mm2", Dimension::area, 1e-6},
    {"m3", Dimension::volume, 1.0},
    {"mm3", Dimension::volume, 1e-9},
    {"kg", Dimension::mass, 1.0},
    {"g", Dimension::mass, 1e-3},
    {"mg", Dimension::mass, 1e-6},
    {"ug", Dimension::mass, 1e-9},
    {"µg", Dimension::mass, 1e-9},
    {"s", Dimension::time, 1.0},
    {"ms", Dimension::time, 1e-3},
    {"us", Dimension::time, 1e-6},
    {"µs", Dimension::time, 1e-6},
    {"Hz", Dimension::frequency, 1.0},
    {"kHz", Dimension::frequency, 1e3},
    {"rad/s", Dimension::angular_rate, 1.0},
    {"kg*m2", Dimension::inertia, 1.0},
    {"kg·m²", Dimension::inertia, 1.0},
    {"mg*mm2", Dimension::inertia, 1e-12},
    {"N*m", Dimension::torque, 1.0},
    {"Nm", Dimension::torque, 1.0},
    {"mNm", Dimension::torque, 1e-3},
    {"uNm", Dimension::torque, 1e-6},
    {"µNm", Dimension::torque, 1e-6},
    {"nNm", Dimension::torque, 1e-9},
    {"Nm/rad", Dimension::torsional_stiffness, 1.0},
    {"mNm/rad", Dimension::torsional_stiffness, 1e-3},
    {"uNm/rad", Dimension::torsional_stiffness, 1e-6},
    {"µNm/rad", Dimension::torsional_stiffness, 1e-6},
    {"nNm/rad", Dimension::torsional_stiffness, 1e-9},
    {"N", Dimension::force, 1.0},
    {"mN", Dimension::force, 1e-3},
    {"uN", Dimension::force, 1e-6},
    {"µN", Dimension::force, 1e-6},
    {"W", Dimension::power, 1.0},
    {"mW", Dimension::power, 1e-3},
    {"uW", Dimension::power, 1e-6},
    {"µW", Dimension::power, 1e-6},
    {"V", Dimension::voltage, 1.0},
    {"mV", Dimension::voltage, 1e-3},
    {"uV", Dimension::voltage, 1e-6},
    {"A", Dimension::current, 1.0},
    {"mA", Dimension::current, 1e-3},
    {"Ohm", Dimension::resistance, 1.0},
    {"ohm", Dimension::resistance, 1.0},
    {"Ω", Dimension::resistance, 1.0},
    {"mOhm", Dimension::resistance, 1e-3},
    {"Pa", Dimension::pressure, 1.0},
    {"kPa", Dimension::pressure, 1e3},
    {"MPa", Dimension::pressure, 1e6},
    {"GPa", Dimension::pressure, 1e9},
    {"kg/m3", Dimension::density, 1.0},
    {"g/cm3", Dimension::density, 1e3},
    {"Ohm*m", Dimension::resistivity, 1.0},
    {"ohm*m", Dimension::resistivity, 1.0},
    {"Ω·m", Dimension::resistivity, 1.0},
    {"nOhm*m", Dimension::resistivity, 1e-9},
    {"Nm/A", Dimension::torque_constant, 1.0},
    {"mNm/A", Dimension::torque_constant, 1e-3},
    {"uNm/A", Dimension::torque_constant, 1e-6},
    {"µNm/A", Dimension::torque_constant, 1e-6},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Dimension d) { return info(d).name; }

void require_same_dimension(const Quantity& a, const Quantity& b, std::string_view context) {
  if (a.dimension() != b.dimension()) {
    throw DimensionError(fmt::format("{}: {} vs {}", context, info(a.dimension()).name,
                                     info(b.dimension()).name));
  }
}

Quantity Quantity::operator+(const Quantity& rhs) const {
  require_same_dimension(*this, rhs, "addition");
  return {value_ + rhs.value_, dim_};
}

Quantity Quantity::operator-(const Quantity& rhs) const {
  require_same_dimension(*this, rhs, "subtraction");
  return {value_ - rhs.value_, dim_};
}

Quantity Quantity::operator*(const Quantity& rhs) const {
  return {value_ * rhs.value_, combine(dim_, rhs.dim_, +1, '*')};
}

Quantity Quantity::operator/(const Quantity& rhs) const {
  return {value_ / rhs.value_, combine(dim_, rhs.dim_, -1, '/')};
}

bool Quantity::operator<(const Quantity& rhs) const {
  require_same_dimension(*this, rhs, "comparison");
  return value_ < rhs.value_;
}

bool Quantity::operator==(const Quantity& rhs) const {
  require_same_dimension(*this, rhs, "comparison");
  return value_ == rhs.value_;
}

bool approx_eq(const Quantity& a, const Quantity& b, double rel_tol) {
  require_same_dimension(a, b, "approx_eq");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("approx_eq: rel_tol must be positive");
  const double diff = std::abs(a.si() - b.si());
  const double scale = std::max(std::abs(a.si()), std::abs(b.si()));
  return diff <= std::max(rel_tol * scale, 1e-18);
}

UnitInfo lookup_unit(std::string_view symbol, Dimension expected) {
  for (const auto& u : kUnits) {
    if (u.symbol != symbol) continue;
    if (u.dimension == expected) return u;
    // Stiffness is customarily quoted in torque units with "per radian" implied.
    if (expected == Dimension::torsional_stiffness && u.dimension == Dimension::torque) {
      return {u.symbol, expected, u.scale};
    }
    throw UnitError(fmt::format("unit '{}' measures {}, expected {}", symbol,
                                info(u.dimension).name, info(expected).name));
  }
  throw UnitError(fmt::format("unknown unit '{}' (expected a {} unit)", symbol,
                              info(expected).name));
}

double convert(const Quantity& q, std::string_view unit) {
  return q.si() / lookup_unit(unit, q.dimension()).scale;
}

Quantity from_unit(double value, std::string_view unit, Dimension expected) {
  return {value * lookup_unit(unit, expected).scale, expected};
}

Quantity parse_quantity(std::string_view text, Dimension expected) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || !std::isfinite(value)) {
    throw UnitError(fmt::format("'{}' does not start with a number", text));
  }
  const std::string_view suffix = trim(s.substr(static_cast<std::size_t>(ptr - s.data())));
  if (suffix.empty() && expected != Dimension::dimensionless) {
    throw UnitError(fmt::format("'{}' is missing a {} unit suffix", text, info(expected).name));
  }
  return from_unit(value, suffix, expected);
}

std::string_view display_unit(Dimension d) { return info(d).display; }

std::string format_quantity(const Quantity& q, int precision) {
  const std::string_view unit = display_unit(q.dimension());
  const double v = unit.empty() ? q.si() : convert(q, unit);
  if (unit.empty()) return fmt::format("{:.{}g}", v, precision);
  return fmt::format("{:.{}g} {}", v, precision, unit);
}

}  // namespace flapkit
