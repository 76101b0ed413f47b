#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qheom/heom.hpp"
#include "qheom/linalg.hpp"

namespace qheom::control {

enum class Axis { X, Y };

double axis_phase(Axis axis);
char axis_label(Axis axis);
/// 'X' or 'Y'; throws std::invalid_argument otherwise.
Axis parse_axis(char label);
/// "XY" -> {X, Y}.
std::vector<Axis> parse_pattern(const std::string& text);

/// Rectangular drive segment in the rotating frame.
struct PulseSegment {
  double start = 0.0;      // ns
  double duration = 0.0;   // ns
  double amplitude = 0.0;  // Omega, 1/ns
  Axis axis = Axis::X;

  double end() const noexcept { return start + duration; }
  double center() const noexcept { return start + 0.5 * duration; }
};

struct PulseSchedule {
  std::vector<PulseSegment> segments;
  double total_time = 0.0;
  /// Segments act as instantaneous pi rotations at their centers; the drive
  /// is off everywhere.
  bool ideal = false;

  /// Throws std::invalid_argument on unordered, overlapping or out-of-range
  /// segments.
  void validate() const;
};

/// (Omega / 2)(sigma_x cos(phi) + sigma_y sin(phi)) inside a segment
/// [start, end), zero outside or for ideal schedules.
CMatrix drive_hamiltonian(double t, const PulseSchedule& schedule);

/// exp(-i (pi/2)(sigma_x cos(phi) + sigma_y sin(phi))).
CMatrix ideal_pi_unitary(Axis axis);

/// Pulse j (1-based) starts at t1 + (j - 1)(delta_t + tau); the pattern is
/// cycled over the pulses. Amplitude pi / tau.
PulseSchedule cpmg_schedule(std::size_t n, const std::vector<Axis>& pattern, double tau, double delta_t, double t1,
                            bool ideal);

/// Uhrig timing: pulse j centered at total * sin^2(pi j / (2n + 2)).
PulseSchedule udd_schedule(std::size_t n, double total, double tau, const std::vector<Axis>& pattern, bool ideal);

struct PiCalibration {
  double amplitude = 0.0;
  double fidelity = 0.0;  // |Tr(U_target^dagger U)| / 2
};

/// Omega = pi / tau, checked by integrating the Schroedinger equation.
PiCalibration calibrate_pi_pulse(double tau, Axis axis);

/// Noiseless propagator of a single segment by fixed-step RK4 on U.
CMatrix integrate_segment(const PulseSegment& segment, std::size_t steps);

/// Hamiltonian and propagation plan (breakpoints or kicks) for a schedule.
/// `embed_qubit` / `num_qubits` place the drive on one qubit of a register.
heom::Hamiltonian schedule_hamiltonian(const PulseSchedule& schedule, std::size_t embed_qubit = 0,
                                       std::size_t num_qubits = 1);
heom::PropagationPlan schedule_plan(const PulseSchedule& schedule, std::vector<double> sample_times,
                                    std::size_t embed_qubit = 0, std::size_t num_qubits = 1);

}  // namespace qheom::control
