#pragma once

#include <string_view>

// Internal units: time in ns, angular frequency in 1/ns, hbar = 1.
//
// Frequencies are quoted the way superconducting-qubit parameters usually
// are ("5 GHz", "105.6 MHz") and the quoted number is used directly as the
// angular frequency in 1/ns, without a factor 2*pi. k_B T is measured in the
// same quoted unit, so beta = h / (k_B T).
namespace qheom::units {

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K

/// k_B T / h in GHz.
double thermal_frequency_ghz(double kelvin);

/// Inverse temperature in ns for a temperature in kelvin.
double beta_ns(double kelvin);

/// Parses "5 GHz", "10kHz", "105.6 MHz", "1e-5 GHz" into the internal
/// frequency unit. Throws std::invalid_argument on a missing or unknown
/// suffix.
double parse_frequency(std::string_view text);

/// Parses "50 mK", "0.05 K".
double parse_temperature_kelvin(std::string_view text);

/// Parses "15 ns", "2.5 us", "132ns".
double parse_time_ns(std::string_view text);

}  // namespace qheom::units
