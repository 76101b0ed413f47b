#include "qheom/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>
#include <utility>

namespace qheom::units {

double thermal_frequency_ghz(double kelvin) {
  if (!(kelvin > 0.0)) throw std::invalid_argument("temperature must be positive");
  return kBoltzmann * kelvin / kPlanck * 1e-9;
}

double beta_ns(double kelvin) { return 1.0 / thermal_frequency_ghz(kelvin); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <std::size_t N>
double parse_with_units(std::string_view text, const std::array<std::pair<std::string_view, double>, N>& table,
                        const char* what) {
  std::string_view s = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{}) throw std::invalid_argument(std::string("cannot parse ") + what + " '" + std::string(text) + "'");
  std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
  for (const auto& [name, scale] : table)
    if (suffix == name) return value * scale;
  throw std::invalid_argument(std::string("missing or unknown unit in ") + what + " '" + std::string(text) + "'");
}

}  // namespace

double parse_frequency(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, double>, 4> kTable{{
      {"GHz", 1.0}, {"MHz", 1e-3}, {"kHz", 1e-6}, {"Hz", 1e-9}}};
  return parse_with_units(text, kTable, "frequency");
}

double parse_temperature_kelvin(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, double>, 2> kTable{{{"K", 1.0}, {"mK", 1e-3}}};
  return parse_with_units(text, kTable, "temperature");
}

double parse_time_ns(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, double>, 4> kTable{{
      {"ns", 1.0}, {"us", 1e3}, {"ms", 1e6}, {"ps", 1e-3}}};
  return parse_with_units(text, kTable, "time");
}

}  // namespace qheom::units
