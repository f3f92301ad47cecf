#pragma once

// Unit-suffixed quantities ("1.1mT", "144Gcm", "1.8A", "20uHz", "0.5pi").
// Values resolve to SI; bare numbers are taken as SI already.

#include <string>

namespace nqsim {

enum class Dimension {
  none,
  field,           // T
  field_integral,  // T m
  length,          // m
  voltage,         // V
  electric_field,  // V/m
  frequency,       // Hz
  time,            // s
  angle,           // rad
  velocity,        // m/s
};

std::string to_string(Dimension d);
// Canonical SI unit suffix used when emitting ("" for none).
std::string si_suffix(Dimension d);

// Throws ConfigError naming the offending token.
double parse_quantity(const std::string& text, Dimension dim, const std::string& pointer = "");

}  // namespace nqsim
