#include "nqsim/units.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <utility>

#include "nqsim/errors.hpp"
#include "nqsim/qcore.hpp"

namespace nqsim {

std::string to_string(Dimension d) {
  switch (d) {
    case Dimension::none: return "dimensionless";
    case Dimension::field: return "magnetic field";
    case Dimension::field_integral: return "field integral";
    case Dimension::length: return "length";
    case Dimension::voltage: return "voltage";
    case Dimension::electric_field: return "electric field";
    case Dimension::frequency: return "frequency";
    case Dimension::time: return "time";
    case Dimension::angle: return "angle";
    case Dimension::velocity: return "velocity";
  }
  return "dimensionless";
}

std::string si_suffix(Dimension d) {
  switch (d) {
    case Dimension::none: return "";
    case Dimension::field: return "T";
    case Dimension::field_integral: return "Tm";
    case Dimension::length: return "m";
    case Dimension::voltage: return "V";
    case Dimension::electric_field: return "V/m";
    case Dimension::frequency: return "Hz";
    case Dimension::time: return "s";
    case Dimension::angle: return "rad";
    case Dimension::velocity: return "m/s";
  }
  return "";
}

namespace {

const std::map<std::string, double>& table(Dimension d) {
  static const std::map<Dimension, std::map<std::string, double>> t = {
      {Dimension::none, {{"", 1.0}, {"%", 0.01}}},
      {Dimension::field, {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"nT", 1e-9}, {"G", 1e-4}, {"mG", 1e-7}}},
      {Dimension::field_integral, {{"Tm", 1.0}, {"mTm", 1e-3}, {"Gcm", 1e-6}, {"Gm", 1e-4}}},
      {Dimension::length,
       {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"A", 1e-10}, {"\xC3\x85", 1e-10}}},
      {Dimension::voltage, {{"V", 1.0}, {"kV", 1e3}, {"MV", 1e6}}},
      {Dimension::electric_field, {{"V/m", 1.0}, {"kV/m", 1e3}, {"MV/m", 1e6}, {"V/cm", 1e2}, {"kV/cm", 1e5}}},
      {Dimension::frequency, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"mHz", 1e-3}, {"uHz", 1e-6}}},
      {Dimension::time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}},
      {Dimension::angle, {{"rad", 1.0}, {"mrad", 1e-3}, {"deg", kPi / 180.0}, {"pi", kPi}}},
      {Dimension::velocity, {{"m/s", 1.0}, {"km/s", 1e3}}},
  };
  return t.at(d);
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim, const std::string& pointer) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(pointer, "empty quantity");
  double value = 1.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const char* p = first;
  if (*p == '+') ++p;
  auto res = std::from_chars(p, last, value);
  std::string suffix;
  if (res.ec == std::errc()) {
    suffix = trim(std::string(res.ptr, last));
  } else {
    // A bare "pi" or "-pi" carries an implicit 1.
    value = 1.0;
    std::string rest(p, last);
    if (!rest.empty() && rest[0] == '-') {
      value = -1.0;
      rest = rest.substr(1);
    }
    if (dim != Dimension::angle || rest != "pi") throw ConfigError(pointer, "not a number: '" + s + "'");
    suffix = rest;
  }
  const auto& units = table(dim);
  auto it = units.find(suffix);
  if (it == units.end())
    throw ConfigError(pointer, "unknown unit '" + suffix + "' in '" + s + "' (expected " + to_string(dim) + ")");
  double out = value * it->second;
  if (!std::isfinite(out)) throw ConfigError(pointer, "non-finite quantity '" + s + "'");
  return out;
}

}  // namespace nqsim
