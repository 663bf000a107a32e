#pragma once

#include <stdexcept>
#include <string>

namespace flapkit {

/// Arithmetic or comparison between quantities of incompatible dimension.
class DimensionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Unparseable or dimension-incompatible unit string.
class UnitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A spec struct violates one of its invariants.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An inverse design problem has no solution inside its constraint box.
/// `nearest` carries the closest achievable value of the designed quantity
/// in SI units, `hint` a human-readable remedy.
class InfeasibleDesign : public std::runtime_error {
 public:
  InfeasibleDesign(const std::string& what, double nearest, std::string hint = {})
      : std::runtime_error(what), nearest_(nearest), hint_(std::move(hint)) {}

  double nearest() const noexcept { return nearest_; }
  const std::string& hint() const noexcept { return hint_; }

 private:
  double nearest_;
  std::string hint_;
};

}  // namespace flapkit
