#include "qheom/control.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qheom::control {

double axis_phase(Axis axis) { return axis == Axis::X ? 0.0 : 0.5 * kPi; }

char axis_label(Axis axis) { return axis == Axis::X ? 'X' : 'Y'; }

Axis parse_axis(char label) {
  if (label == 'X' || label == 'x') return Axis::X;
  if (label == 'Y' || label == 'y') return Axis::Y;
  throw std::invalid_argument(std::string("unknown pulse axis '") + label + "'");
}

std::vector<Axis> parse_pattern(const std::string& text) {
  std::vector<Axis> out;
  for (char c : text) out.push_back(parse_axis(c));
  if (out.empty()) throw std::invalid_argument("empty pulse axis pattern");
  return out;
}

void PulseSchedule::validate() const {
  if (!(total_time >= 0.0)) throw std::invalid_argument("schedule total_time must be >= 0");
  double previous_end = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.duration > 0.0)) throw std::invalid_argument("pulse " + std::to_string(i + 1) + ": duration must be > 0");
    if (!(s.amplitude >= 0.0)) throw std::invalid_argument("pulse " + std::to_string(i + 1) + ": amplitude must be >= 0");
    if (s.start < previous_end - 1e-9)
      throw std::invalid_argument("pulse " + std::to_string(i + 1) + " overlaps the previous pulse or starts before 0");
    previous_end = s.end();
  }
  if (previous_end > total_time + 1e-9) throw std::invalid_argument("last pulse ends after total_time");
}

namespace {

CMatrix axis_operator(Axis axis) { return axis == Axis::X ? pauli::x() : pauli::y(); }

}  // namespace

CMatrix drive_hamiltonian(double t, const PulseSchedule& schedule) {
  CMatrix h = CMatrix::Zero(2, 2);
  if (schedule.ideal) return h;
  for (const auto& s : schedule.segments)
    if (t >= s.start && t < s.end()) return 0.5 * s.amplitude * axis_operator(s.axis);
  return h;
}

CMatrix ideal_pi_unitary(Axis axis) { return unitary_exp(axis_operator(axis), 0.5 * kPi); }

PulseSchedule cpmg_schedule(std::size_t n, const std::vector<Axis>& pattern, double tau, double delta_t, double t1,
                            bool ideal) {
  if (n > 0 && pattern.empty()) throw std::invalid_argument("cpmg: empty axis pattern");
  if (!(tau > 0.0) || !(delta_t >= 0.0) || !(t1 >= 0.0)) throw std::invalid_argument("cpmg: need tau > 0, delta_t >= 0, t1 >= 0");
  PulseSchedule s;
  s.ideal = ideal;
  for (std::size_t j = 0; j < n; ++j)
    s.segments.push_back({t1 + static_cast<double>(j) * (delta_t + tau), tau, kPi / tau, pattern[j % pattern.size()]});
  s.total_time = n == 0 ? 2.0 * t1 : 2.0 * t1 + static_cast<double>(n) * tau + static_cast<double>(n - 1) * delta_t;
  s.validate();
  return s;
}

PulseSchedule udd_schedule(std::size_t n, double total, double tau, const std::vector<Axis>& pattern, bool ideal) {
  if (n > 0 && pattern.empty()) throw std::invalid_argument("udd: empty axis pattern");
  if (!(total > 0.0) || !(tau > 0.0)) throw std::invalid_argument("udd: need total > 0 and tau > 0");
  PulseSchedule s;
  s.ideal = ideal;
  s.total_time = total;
  for (std::size_t j = 1; j <= n; ++j) {
    const double x = std::sin(kPi * static_cast<double>(j) / static_cast<double>(2 * n + 2));
    s.segments.push_back({total * x * x - 0.5 * tau, tau, kPi / tau, pattern[(j - 1) % pattern.size()]});
  }
  if (!s.segments.empty() && s.segments.front().start < 0.0)
    throw std::invalid_argument("udd: first pulse would start before t = 0");
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("udd: pulses overlap for this total time and width (") + e.what() + ")");
  }
  return s;
}

CMatrix integrate_segment(const PulseSegment& segment, std::size_t steps) {
  const CMatrix h = 0.5 * segment.amplitude * axis_operator(segment.axis);
  const CMatrix gen = -kI * h;
  CMatrix u = CMatrix::Identity(2, 2);
  const double dt = segment.duration / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const CMatrix k1 = gen * u;
    const CMatrix k2 = gen * (u + 0.5 * dt * k1);
    const CMatrix k3 = gen * (u + 0.5 * dt * k2);
    const CMatrix k4 = gen * (u + dt * k3);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

PiCalibration calibrate_pi_pulse(double tau, Axis axis) {
  if (!(tau > 0.0)) throw std::invalid_argument("calibrate_pi_pulse: tau must be > 0");
  PiCalibration c;
  c.amplitude = kPi / tau;
  const CMatrix u = integrate_segment({0.0, tau, c.amplitude, axis}, 2000);
  c.fidelity = unitary_overlap(ideal_pi_unitary(axis), u);
  return c;
}

heom::Hamiltonian schedule_hamiltonian(const PulseSchedule& schedule, std::size_t embed_qubit, std::size_t num_qubits) {
  return [schedule, embed_qubit, num_qubits](double t) {
    const CMatrix h = drive_hamiltonian(t, schedule);
    return num_qubits == 1 ? h : embed(h, embed_qubit, num_qubits);
  };
}

heom::PropagationPlan schedule_plan(const PulseSchedule& schedule, std::vector<double> sample_times,
                                    std::size_t embed_qubit, std::size_t num_qubits) {
  heom::PropagationPlan plan;
  plan.sample_times = std::move(sample_times);
  for (const auto& s : schedule.segments) {
    if (schedule.ideal) {
      const CMatrix u = ideal_pi_unitary(s.axis);
      plan.kicks.push_back({s.center(), num_qubits == 1 ? u : embed(u, embed_qubit, num_qubits)});
    } else {
      plan.breakpoints.push_back(s.start);
      plan.breakpoints.push_back(s.end());
    }
  }
  return plan;
}

}  // namespace qheom::control
