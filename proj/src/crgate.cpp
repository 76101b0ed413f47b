#include "qheom/crgate.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace qheom::crgate {

CrParams CrParams::table_four() {
  CrParams p;
  p.detuning = 0.5148;
  p.coupling = 0.05;
  p.duration = 132.0;
  p.amplitude = 0.1056;
  p.rz_pre_1 = -0.750050 * kPi;
  p.rz_post_1 = -0.093750 * kPi;
  p.rz_pre_2 = 0.593800 * kPi;
  p.rz_post_2 = 0.593800 * kPi;
  return p;
}

void CrParams::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("cr.duration must be > 0");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("cr.amplitude must be >= 0");
  for (double v : {detuning, coupling, rz_pre_1, rz_post_1, rz_pre_2, rz_post_2})
    if (!std::isfinite(v)) throw std::invalid_argument("cr parameters must be finite");
}

bool CrParams::dispersive_advisory() const {
  return !(std::abs(detuning) >= 5.0 * std::abs(coupling) && std::abs(detuning) >= 5.0 * std::abs(amplitude));
}

namespace {

CMatrix in_pulse_hamiltonian(const CrParams& p, double omega) {
  using pauli::string;
  return 0.5 * p.detuning * string("ZI") + p.coupling * (string("XX") + string("YY")) + 0.5 * omega * string("XI");
}

}  // namespace

CMatrix cr_hamiltonian(double t, const CrParams& p) {
  const bool on = t >= 0.0 && t < p.duration;
  return in_pulse_hamiltonian(p, on ? p.amplitude : 0.0);
}

CMatrix ideal_unitary() { return unitary_exp(pauli::string("ZX"), 0.25 * kPi); }

double cr_area_condition(const CrParams& p, double theta) {
  if (p.detuning == 0.0) throw std::invalid_argument("area condition undefined for zero detuning");
  return p.coupling * p.amplitude * p.duration / p.detuning - theta;
}

double seed_amplitude(double detuning, double coupling, double duration, double theta) {
  if (coupling == 0.0 || duration == 0.0) throw std::invalid_argument("seed amplitude needs g != 0 and tau > 0");
  return theta * detuning / (coupling * duration);
}

CMatrix rz(double theta) {
  CMatrix r = CMatrix::Zero(2, 2);
  r(0, 0) = std::exp(cplx(0.0, -0.5 * theta));
  r(1, 1) = std::exp(cplx(0.0, 0.5 * theta));
  return r;
}

CMatrix pre_rotation(const CrParams& p) { return kron(rz(p.rz_pre_1), rz(p.rz_pre_2)); }

CMatrix post_rotation(const CrParams& p) { return kron(rz(p.rz_post_1), rz(p.rz_post_2)); }

CMatrix cr_propagator(const CrParams& p, double t) {
  if (t < 0.0 || t > p.duration * (1.0 + 1e-12)) throw std::invalid_argument("cr_propagator: t outside [0, tau]");
  return unitary_exp(in_pulse_hamiltonian(p, p.amplitude), t);
}

CMatrix calibrated_propagator(const CrParams& p, double t) { return post_rotation(p) * cr_propagator(p, t) * pre_rotation(p); }

PauliProjection pauli_projection(const CMatrix& d) {
  std::size_t n = 0;
  while ((Eigen::Index{1} << n) < d.rows()) ++n;
  if ((Eigen::Index{1} << n) != d.rows() || d.rows() != d.cols()) throw std::invalid_argument("pauli_projection: need a qubit operator");
  PauliProjection out;
  out.labels = pauli::labels(n);
  const CMatrix herm = 0.5 * (d + d.adjoint());
  const CMatrix anti = (d - d.adjoint()) / cplx(0.0, 2.0);
  const double dim = static_cast<double>(d.rows());
  for (const auto& label : out.labels) {
    const CMatrix p = pauli::string(label);
    out.hermitian.push_back((p * herm).trace().real() / dim);
    out.anti_hermitian.push_back((p * anti).trace().real() / dim);
  }
  return out;
}

namespace {

double fidelity_of(const CrParams& p) { return unitary_overlap(ideal_unitary(), calibrated_propagator(p, p.duration)); }

// Golden-section maximization of f on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, int iterations) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a), fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}

}  // namespace

CrParams optimize_rotations(const CrParams& params, std::size_t grid) {
  if (grid < 4) throw std::invalid_argument("rotation grid needs at least 4 points");
  CrParams best = params;
  const CMatrix u = cr_propagator(params, params.duration);
  const CMatrix target = ideal_unitary();
  auto score = [&](const CrParams& p) { return unitary_overlap(target, post_rotation(p) * u * pre_rotation(p)); };
  std::array<double CrParams::*, 4> angles{&CrParams::rz_pre_1, &CrParams::rz_pre_2, &CrParams::rz_post_1,
                                           &CrParams::rz_post_2};
  double current = score(best);
  const double step = 2.0 * kPi / static_cast<double>(grid);
  for (int sweep = 0; sweep < 6; ++sweep) {
    const double before = current;
    for (auto member : angles) {
      CrParams trial = best;
      double arg_best = best.*member;
      for (std::size_t i = 0; i < grid; ++i) {
        trial.*member = -kPi + step * static_cast<double>(i);
        const double s = score(trial);
        if (s > current + 1e-15) current = s, arg_best = trial.*member;
      }
      trial.*member = arg_best;
      const double refined = golden_max(
          [&](double x) {
            CrParams q = trial;
            q.*member = x;
            return score(q);
          },
          arg_best - step, arg_best + step, 60);
      CrParams q = trial;
      q.*member = refined;
      if (score(q) >= current) trial.*member = refined, current = score(q);
      trial.*member = wrap_angle(trial.*member);
      best = trial;
    }
    if (current - before < 1e-13) break;
  }
  return best;
}

Calibration calibrate(const CrParams& seed, const SearchConfig& search) {
  seed.validate();
  Calibration out;
  CrParams p = seed;
  if (p.amplitude == 0.0 && p.coupling != 0.0) p.amplitude = seed_amplitude(p.detuning, p.coupling, p.duration, search.theta);
  p = optimize_rotations(p, search.rz_grid);
  double best = fidelity_of(p);

  std::array<double, 3> steps{search.amplitude_step, search.duration_step, search.detuning_step};
  std::array<double CrParams::*, 3> members{&CrParams::amplitude, &CrParams::duration, &CrParams::detuning};
  std::size_t iteration = 0;
  while (iteration < search.max_iterations && best < search.target_fidelity) {
    ++iteration;
    bool improved = false;
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (steps[m] <= 0.0) continue;
      for (double sign : {1.0, -1.0}) {
        CrParams trial = p;
        trial.*members[m] *= 1.0 + sign * steps[m];
        if (!(trial.duration > 0.0) || trial.amplitude < 0.0) continue;
        trial = optimize_rotations(trial, search.rz_grid);
        const double f = fidelity_of(trial);
        if (f > best + 1e-12) {
          best = f, p = trial, improved = true;
          break;
        }
      }
    }
    if (!improved)
      for (double& s : steps) s *= search.shrink;
  }

  out.params = p;
  out.report.fidelity = best;
  out.report.iterations = iteration;
  out.report.converged = best >= search.target_fidelity;
  // Global phase is not physical; align it before taking the difference.
  const CMatrix u = calibrated_propagator(p, p.duration);
  const cplx overlap = (ideal_unitary().adjoint() * u).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : cplx(1.0);
  out.report.residuals = pauli_projection(phase * u - ideal_unitary());
  return out;
}

}  // namespace qheom::crgate
