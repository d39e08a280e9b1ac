#pragma once

#include <array>
#include <charconv>
#include <complex>
#include <string>

/// Locale-independent shortest-round-trip number formatting, shared by the probe
/// shorthand printer and the CSV writer so output is byte-deterministic.
namespace phaselim::detail {

inline std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string format_complex(std::complex<double> v) {
  std::string out = format_double(v.real());
  if (v.imag() != 0.0) {
    if (v.imag() >= 0.0) out += '+';
    out += format_double(v.imag());
    out += 'i';
  }
  return out;
}

}  // namespace phaselim::detail
