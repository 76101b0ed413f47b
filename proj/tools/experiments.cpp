#include "experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace qheom::cli {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + '\n';
}

bool static_only(NoiseMode m) { return m == NoiseMode::TotalStatic; }
bool hierarchical(NoiseMode m) { return m == NoiseMode::Full1f || m == NoiseMode::CutoffPlusStatic; }

heom::PropagatorConfig propagator_for(const ExperimentConfig& config, const NoiseSetup& noise) {
  heom::PropagatorConfig p = config.propagator();
  if (static_only(noise.mode)) {
    p.depth = config.solver.static_depth;
    p.importance_threshold = 0.0;
  }
  return p;
}

// Oracle |rho_01| for a |+> start under pure dephasing.
std::vector<double> dephasing_reference(const ExperimentConfig& config, const NoiseSetup& noise,
                                        const std::vector<double>& times) {
  std::vector<double> out;
  const bath::QuadratureConfig qc;
  std::optional<bath::Spectrum> spectrum;
  if (hierarchical(noise.mode) && config.bath.model.eta > 0.0) spectrum = bath::make_spectrum(config.bath.model, qc);
  for (double t : times) {
    switch (noise.mode) {
      case NoiseMode::None: out.push_back(0.5); break;
      case NoiseMode::Lindblad: out.push_back(analytics::lindblad_coherence(t, config.bath.t_phi)); break;
      case NoiseMode::TotalStatic: out.push_back(analytics::gaussian_static_coherence(t, noise.static_variance)); break;
      case NoiseMode::Full1f:
      case NoiseMode::CutoffPlusStatic: {
        const double gamma = spectrum ? analytics::dephasing_exponent(t, *spectrum, qc) : 0.0;
        const double extra = noise.mode == NoiseMode::CutoffPlusStatic ? 2.0 * noise.static_variance * t * t : 0.0;
        out.push_back(0.5 * std::exp(-gamma - extra));
        break;
      }
    }
  }
  return out;
}

std::vector<double> coherence(const heom::Trajectory& tr) {
  std::vector<double> out;
  for (const auto& s : tr) out.push_back(std::abs(s.rho(0, 1)));
  return out;
}

}  // namespace

std::vector<double> sample_grid(double t0, double t_end, double step) {
  if (!(step > 0.0) || t_end < t0) throw std::invalid_argument("sample_grid: need step > 0 and t_end >= t0");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t0) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(t0 + step * static_cast<double>(i));
  if (t_end - out.back() > 1e-9 * std::max(1.0, t_end)) out.push_back(t_end);
  return out;
}

CMatrix plus_state() { return CMatrix::Constant(2, 2, 0.5); }

NoiseSetup build_noise(const ExperimentConfig& config, std::size_t num_qubits, double span) {
  NoiseSetup n;
  n.mode = config.bath.noise;
  const auto& b = config.bath;
  const double horizon = b.fit_horizon.value_or(span);
  bath::ExponentialSeries series;
  switch (n.mode) {
    case NoiseMode::None: return n;
    case NoiseMode::Lindblad:
      for (std::size_t q = 0; q < num_qubits; ++q)
        n.lindblad.push_back({embed(pauli::z(), q, num_qubits), 1.0 / (2.0 * b.t_phi)});
      return n;
    case NoiseMode::TotalStatic:
      n.static_variance = b.static_variance.value_or(bath::band_variance(b.model, 0.0, INFINITY));
      series.static_variance = n.static_variance;
      break;
    case NoiseMode::Full1f:
    case NoiseMode::CutoffPlusStatic: {
      bath::FitConfig fc;
      fc.max_terms = b.max_terms;
      if (b.model.eta > 0.0) {
        n.fit = bath::fit_exponentials(b.model, horizon, b.fit_tolerance, fc);
        series = n.fit->series;
      }
      if (n.mode == NoiseMode::CutoffPlusStatic) {
        n.static_variance = b.static_variance.value_or(bath::band_variance(b.model, 0.0, b.model.omega_lc));
        series.static_variance += n.static_variance;
      }
      break;
    }
  }
  for (std::size_t q = 0; q < num_qubits; ++q) n.channels.push_back(heom::DissipationChannel::on_qubit(q, num_qubits, series));
  const auto p = propagator_for(config, n);
  heom::HierarchyOptions o;
  o.depth = p.depth;
  o.layout = p.layout;
  o.importance_threshold = p.importance_threshold;
  o.horizon = span;
  o.max_size = p.max_size;
  n.hierarchy_size = heom::Hierarchy(heom::build_modes(n.channels, p.layout), o).size();
  return n;
}

heom::Trajectory evolve(const ExperimentConfig& config, const NoiseSetup& noise, const CMatrix& rho0,
                        const heom::Hamiltonian& hamiltonian, double t0, double t_end, heom::PropagationPlan plan) {
  if (noise.mode == NoiseMode::Lindblad)
    return heom::lindblad_simulate(rho0, hamiltonian, noise.lindblad, t0, t_end, std::move(plan), config.solver.dt);
  return heom::simulate(rho0, hamiltonian, noise.channels, t0, t_end, std::move(plan), propagator_for(config, noise));
}

DephasingResult run_free_dephasing(const ExperimentConfig& config) {
  DephasingResult r;
  const double t_end = config.output.t_end;
  r.noise = build_noise(config, 1, t_end);
  heom::PropagationPlan plan;
  plan.sample_times = sample_grid(0.0, t_end, config.output.sample_step);
  r.trajectory = evolve(config, r.noise, plus_state(), [](double) { return CMatrix::Zero(2, 2).eval(); }, 0.0, t_end, plan);
  std::vector<double> times;
  for (const auto& s : r.trajectory) times.push_back(s.t);
  r.reference = dephasing_reference(config, r.noise, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(std::abs(r.trajectory[i].rho(0, 1)) - r.reference[i]));
  return r;
}

control::PulseSchedule make_schedule(const ExperimentConfig& config, bool ideal) {
  const auto& s = config.schedule;
  const auto pattern = control::parse_pattern(s.pattern);
  if (config.experiment == Experiment::Udd) return control::udd_schedule(s.pulses, s.total, s.tau, pattern, ideal);
  return control::cpmg_schedule(s.pulses, pattern, s.tau, s.delta_t, s.t1, ideal);
}

EchoResult run_echo(const ExperimentConfig& config) {
  EchoResult r;
  r.ideal = make_schedule(config, true);
  r.finite = make_schedule(config, false);
  const double total = r.finite.total_time;
  r.noise = build_noise(config, 1, total);
  const auto samples = sample_grid(0.0, total, config.output.sample_step);
  r.ideal_trajectory = evolve(config, r.noise, plus_state(), control::schedule_hamiltonian(r.ideal), 0.0, total,
                              control::schedule_plan(r.ideal, samples));
  r.finite_trajectory = evolve(config, r.noise, plus_state(), control::schedule_hamiltonian(r.finite), 0.0, total,
                               control::schedule_plan(r.finite, samples));
  if (r.finite.segments.empty()) return r;
  const auto ideal_peaks = analytics::echo_peaks(r.ideal_trajectory, r.ideal);
  r.echoes = analytics::echo_errors(ideal_peaks, analytics::echo_peaks(r.finite_trajectory, r.finite));
  for (const auto& p : ideal_peaks) r.ideal_peaks.push_back(p.peak);
  r.population_errors = analytics::population_errors(r.finite_trajectory, r.echoes);
  const auto abscissa = config.experiment == Experiment::Udd ? analytics::Abscissa::Time : analytics::Abscissa::PulseIndex;
  auto fit = [&](EchoResult::Fits& f, analytics::Parity parity, std::size_t needed) {
    if (r.echoes.size() < needed) return;
    f.linear = analytics::fit_error_scaling(r.echoes, analytics::ScalingModel::Linear, abscissa, parity);
    f.quadratic = analytics::fit_error_scaling(r.echoes, analytics::ScalingModel::Quadratic, abscissa, parity);
  };
  fit(r.all, analytics::Parity::All, 5);
  fit(r.odd, analytics::Parity::Odd, 9);
  fit(r.even, analytics::Parity::Even, 10);
  return r;
}

TnlResult run_tnl_compare(const ExperimentConfig& config) {
  TnlResult r;
  if (!hierarchical(config.bath.noise)) throw ConfigError("bath.noise", "tnl_compare needs full_1f or cutoff_plus_static");
  const double t_end = config.output.t_end;
  r.noise = build_noise(config, 1, t_end);
  heom::PropagationPlan plan;
  plan.sample_times = sample_grid(0.0, t_end, config.output.sample_step);
  const auto zero = [](double) { return CMatrix::Zero(2, 2).eval(); };
  const auto converged = evolve(config, r.noise, plus_state(), zero, 0.0, t_end, plan);
  for (const auto& s : converged) r.times.push_back(s.t);
  r.converged = coherence(converged);
  r.exact = dephasing_reference(config, r.noise, r.times);
  for (std::size_t i = 0; i < r.times.size(); ++i) r.converged_error = std::max(r.converged_error, std::abs(r.converged[i] - r.exact[i]));
  for (std::size_t depth : config.solver.tnl_depths) {
    const auto p = heom::perturbative_truncation(config.propagator(), depth);
    r.truncated.push_back(coherence(heom::simulate(plus_state(), zero, r.noise.channels, 0.0, t_end, plan, p)));
  }
  return r;
}

namespace {

std::vector<tomography::QuantumChannel> cr_channels(const ExperimentConfig& config, const NoiseSetup& noise,
                                                    const std::vector<double>& times) {
  const auto& p = config.cr;
  const CMatrix pre = crgate::pre_rotation(p), post = crgate::post_rotation(p);
  const auto hamiltonian = [p](double t) { return crgate::cr_hamiltonian(t, p); };
  heom::PropagationPlan plan;
  plan.sample_times = times;
  return tomography::channels_from_propagation(
      [&](const CMatrix& input) {
        const auto tr = evolve(config, noise, pre * input * pre.adjoint(), hamiltonian, 0.0, p.duration, plan);
        if (tr.size() != times.size()) throw heom::PropagationError("missing samples in CR propagation", p.duration);
        std::vector<CMatrix> out;
        for (const auto& s : tr) out.push_back(post * s.rho * post.adjoint());
        return out;
      },
      4);
}

CMatrix calibrated_choi(const crgate::CrParams& p, double t) {
  return tomography::choi(tomography::channel_from_unitary(crgate::calibrated_propagator(p, t)));
}

}  // namespace

FidelityResult run_cr_fidelity(const ExperimentConfig& config) {
  FidelityResult r;
  const auto& p = config.cr;
  r.noise = build_noise(config, 2, p.duration);
  r.times = sample_grid(0.0, p.duration, config.output.sample_step);
  r.channels = cr_channels(config, r.noise, r.times);
  for (std::size_t i = 0; i < r.times.size(); ++i)
    r.fidelity.push_back(tomography::gate_fidelity(tomography::choi(r.channels[i]), calibrated_choi(p, r.times[i])));
  std::vector<double> xq, yq, x, y;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    x.push_back(r.times[i]);
    y.push_back(1.0 - r.fidelity[i]);
    if (r.times[i] <= 0.25 * p.duration + 1e-9) xq.push_back(x.back()), yq.push_back(y.back());
  }
  r.early = analytics::fit_powers(xq, yq, {1, 2});
  r.pure_quadratic = analytics::fit_powers(x, y, {2});
  r.exponential = analytics::fit_saturating_exponential(x, y);
  return r;
}

TomographyResult run_cr_tomography(const ExperimentConfig& config) {
  TomographyResult r;
  const auto& p = config.cr;
  r.noise = build_noise(config, 2, p.duration);
  const auto channel = cr_channels(config, r.noise, {p.duration}).front();
  r.choi = tomography::choi(channel);
  r.ptm = tomography::ptm(channel);
  r.calibrated_ptm = tomography::ptm(tomography::channel_from_unitary(crgate::calibrated_propagator(p, p.duration)));
  r.ideal_ptm = tomography::ptm(tomography::channel_from_unitary(crgate::ideal_unitary()));
  r.error_ptm = tomography::error_ptm(r.ptm, r.calibrated_ptm);
  r.coherent_ptm = tomography::error_ptm(r.calibrated_ptm, r.ideal_ptm);
  r.diagnostics = tomography::cp_tp_checks(r.choi);
  r.fidelity = tomography::gate_fidelity(r.choi, calibrated_choi(p, p.duration));
  return r;
}

DecomposeResult run_decompose(const ExperimentConfig& config) {
  DecomposeResult r;
  const auto& b = config.bath;
  r.horizon = b.fit_horizon.value_or(config.output.t_end);
  bath::FitConfig fc;
  fc.max_terms = b.max_terms;
  r.fit = bath::fit_exponentials(b.model, r.horizon, b.fit_tolerance, fc);
  const auto sp = bath::make_spectrum(b.model, fc.quad);
  r.total_power = bath::total_power(sp, fc.quad);
  r.positive_power = bath::band_variance(b.model, 0.0, INFINITY, fc.quad);
  r.low_band = bath::band_variance(b.model, 0.0, b.model.omega_lc, fc.quad);
  r.t_phi = bath::t_phi_estimate(b.model, fc.quad);
  r.times = sample_grid(0.0, r.horizon, config.output.sample_step);
  for (double t : r.times) {
    r.exact.push_back(bath::correlation_function(t, sp, fc.quad));
    r.fitted.push_back(bath::reconstruct(r.fit.series, t));
  }
  return r;
}

crgate::Calibration run_calibrate(const ExperimentConfig& config) { return crgate::calibrate(config.cr, config.search); }

std::string schedule_csv(const control::PulseSchedule& schedule) {
  std::string out = "index,start_ns,duration_ns,axis\n";
  for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
    const auto& s = schedule.segments[i];
    out += join({std::to_string(i + 1), num(s.start), num(s.duration), std::string(1, control::axis_label(s.axis))});
  }
  return out;
}

namespace {

std::string trajectory_csv(const heom::Trajectory& tr, const std::vector<double>* reference) {
  std::string out = reference ? "t_ns,rho00,rho11,re_rho01,im_rho01,abs_rho01,reference_abs_rho01\n"
                              : "t_ns,rho00,rho11,re_rho01,im_rho01,abs_rho01\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& s = tr[i];
    std::vector<std::string> row{num(s.t), num(s.rho(0, 0).real()), num(s.rho(1, 1).real()), num(s.rho(0, 1).real()),
                                 num(s.rho(0, 1).imag()), num(std::abs(s.rho(0, 1)))};
    if (reference) row.push_back(num((*reference)[i]));
    out += join(row);
  }
  return out;
}

std::string real_matrix_csv(const RMatrix& m, const std::vector<std::string>& labels) {
  std::vector<std::string> head{"row"};
  head.insert(head.end(), labels.begin(), labels.end());
  std::string out = join(head);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{labels[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    out += join(row);
  }
  return out;
}

std::string choi_csv(const CMatrix& chi) {
  // Basis |a b> of input (x) output, written as "ab" in base d.
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(chi.rows()))));
  std::vector<std::string> labels;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) labels.push_back(std::to_string(a) + ":" + std::to_string(b));
  std::vector<std::string> head{"row"};
  for (const auto& l : labels) head.push_back("re_" + l), head.push_back("im_" + l);
  std::string out = join(head);
  for (Eigen::Index i = 0; i < chi.rows(); ++i) {
    std::vector<std::string> row{labels[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < chi.cols(); ++j) row.push_back(num(chi(i, j).real())), row.push_back(num(chi(i, j).imag()));
    out += join(row);
  }
  return out;
}

std::string fit_line(const std::string& name, const analytics::ScalingFit& f) {
  std::string out = name + ".coefficients =";
  for (double c : f.coefficients) out += " " + num(c);
  out += "\n" + name + ".r_squared = " + num(f.r_squared) + "\n" + name + ".residual = " + num(f.residual) + "\n";
  return out;
}

std::string noise_lines(const NoiseSetup& n) {
  std::string out = "noise = " + noise_name(n.mode) + "\n";
  out += "hierarchy_size = " + std::to_string(n.hierarchy_size) + "\n";
  if (n.static_variance > 0.0) out += "static_variance = " + num(n.static_variance) + "\n";
  if (n.fit) {
    out += "decomposition.terms = " + std::to_string(n.fit->series.terms.size()) + "\n";
    out += "decomposition.relative_error = " + num(n.fit->relative_error) + "\n";
  }
  return out;
}

std::string top_entries_text(const RMatrix& r, std::size_t k) {
  std::string out = "rank,row,column,value\n";
  const auto top = tomography::top_entries(r, k);
  for (std::size_t i = 0; i < top.size(); ++i)
    out += join({std::to_string(i + 1), top[i].row, top[i].column, num(top[i].value)});
  return out;
}

}  // namespace

RunOutput run(const ExperimentConfig& config) {
  RunOutput out;
  auto certify = [&](const NoiseSetup& n) {
    out.hierarchy_size = n.hierarchy_size;
    if (n.fit) out.certified_error = n.fit->relative_error;
  };
  switch (config.experiment) {
    case Experiment::FreeDephasing: {
      const auto r = run_free_dephasing(config);
      certify(r.noise);
      out.files.push_back({"trajectory.csv", trajectory_csv(r.trajectory, &r.reference)});
      out.files.push_back({"report.txt", noise_lines(r.noise) + "max_abs_deviation = " + num(r.max_deviation) + "\n"});
      break;
    }
    case Experiment::Cpmg:
    case Experiment::Udd: {
      const auto r = run_echo(config);
      certify(r.noise);
      std::string echo = "index,time_ns,ideal_peak,finite_peak,delta,population_error\n";
      for (std::size_t i = 0; i < r.echoes.size(); ++i) {
        const auto& e = r.echoes[i];
        echo += join({std::to_string(e.index), num(e.time), num(r.ideal_peaks[i]), num(e.peak), num(e.delta),
                      num(r.population_errors[i])});
      }
      std::string report = noise_lines(r.noise) + "pattern = " + config.schedule.pattern + "\n";
      report += "pulses = " + std::to_string(config.schedule.pulses) + "\n";
      report += "total_time_ns = " + num(r.finite.total_time) + "\n";
      report += std::string("abscissa = ") + (config.experiment == Experiment::Udd ? "time_ns" : "pulse_index") + "\n";
      for (const auto& [name, f] : {std::pair{"all", &r.all}, std::pair{"odd", &r.odd}, std::pair{"even", &r.even}})
        if (f->linear)
          report += fit_line(std::string(name) + ".linear", *f->linear) + fit_line(std::string(name) + ".quadratic", *f->quadratic);
      out.files.push_back({"echo.csv", echo});
      out.files.push_back({"fit.txt", report});
      out.files.push_back({"schedule.csv", schedule_csv(r.finite)});
      out.files.push_back({"trajectory_ideal.csv", trajectory_csv(r.ideal_trajectory, nullptr)});
      out.files.push_back({"trajectory_finite.csv", trajectory_csv(r.finite_trajectory, nullptr)});
      break;
    }
    case Experiment::TnlCompare: {
      const auto r = run_tnl_compare(config);
      certify(r.noise);
      std::vector<std::string> head{"t_ns", "exact", "converged"};
      for (std::size_t L : config.solver.tnl_depths) head.push_back("tier_" + std::to_string(L));
      std::string csv = join(head);
      for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::vector<std::string> row{num(r.times[i]), num(r.exact[i]), num(r.converged[i])};
        for (const auto& c : r.truncated) row.push_back(num(c[i]));
        csv += join(row);
      }
      std::string report = noise_lines(r.noise) + "converged_max_error = " + num(r.converged_error) + "\n";
      for (std::size_t k = 0; k < r.truncated.size(); ++k) {
        double dev = 0.0;
        for (std::size_t i = 0; i < r.times.size(); ++i) dev = std::max(dev, std::abs(r.truncated[k][i] - r.converged[i]));
        report += "tier_" + std::to_string(config.solver.tnl_depths[k]) + ".max_deviation = " + num(dev) + "\n";
      }
      out.files.push_back({"tnl.csv", csv});
      out.files.push_back({"report.txt", report});
      break;
    }
    case Experiment::CrFidelity: {
      const auto r = run_cr_fidelity(config);
      certify(r.noise);
      std::string csv = "t_ns,fidelity\n";
      for (std::size_t i = 0; i < r.times.size(); ++i) csv += join({num(r.times[i]), num(r.fidelity[i])});
      std::string report = noise_lines(r.noise) + fit_line("early", r.early) + fit_line("pure_quadratic", r.pure_quadratic);
      report += "exponential.amplitude = " + num(r.exponential.amplitude) + "\nexponential.scale_ns = " +
                num(r.exponential.scale) + "\nexponential.residual = " + num(r.exponential.residual) + "\n";
      out.files.push_back({"fidelity.csv", csv});
      out.files.push_back({"fit.txt", report});
      break;
    }
    case Experiment::CrTomography: {
      const auto r = run_cr_tomography(config);
      certify(r.noise);
      const auto labels = pauli::labels(2);
      out.files.push_back({"choi.csv", choi_csv(r.choi)});
      out.files.push_back({"ptm.csv", real_matrix_csv(r.ptm, labels)});
      out.files.push_back({"ptm_calibrated.csv", real_matrix_csv(r.calibrated_ptm, labels)});
      out.files.push_back({"ptm_ideal.csv", real_matrix_csv(r.ideal_ptm, labels)});
      out.files.push_back({"error_ptm.csv", real_matrix_csv(r.error_ptm, labels)});
      out.files.push_back({"coherent_error_ptm.csv", real_matrix_csv(r.coherent_ptm, labels)});
      out.files.push_back({"error_ptm_top.csv", top_entries_text(r.error_ptm, config.output.top_k)});
      const auto& d = r.diagnostics;
      out.files.push_back({"report.txt", noise_lines(r.noise) + "fidelity = " + num(r.fidelity) + "\nchoi.hermiticity = " +
                                             num(d.hermiticity) + "\nchoi.trace_defect = " + num(d.trace) +
                                             "\nchoi.min_eigenvalue = " + num(d.min_eigenvalue) +
                                             "\nchoi.tp_defect = " + num(d.tp_defect) + "\n"});
      break;
    }
    case Experiment::Decompose: {
      const auto r = run_decompose(config);
      out.certified_error = r.fit.relative_error;
      std::string terms = "k,re_amplitude,im_amplitude,re_rate,im_rate\n";
      for (std::size_t k = 0; k < r.fit.series.terms.size(); ++k) {
        const auto& t = r.fit.series.terms[k];
        terms += join({std::to_string(k), num(t.amplitude.real()), num(t.amplitude.imag()), num(t.rate.real()), num(t.rate.imag())});
      }
      std::string corr = "t_ns,re_exact,im_exact,re_fit,im_fit\n";
      for (std::size_t i = 0; i < r.times.size(); ++i)
        corr += join({num(r.times[i]), num(r.exact[i].real()), num(r.exact[i].imag()), num(r.fitted[i].real()), num(r.fitted[i].imag())});
      std::string report = "horizon_ns = " + num(r.horizon) + "\nterms = " + std::to_string(r.fit.series.terms.size()) +
                           "\nstatic_variance = " + num(r.fit.series.static_variance) + "\nrelative_error = " +
                           num(r.fit.relative_error) + "\nmax_abs_error = " + num(r.fit.max_abs_error) +
                           "\nc0_abs = " + num(r.fit.c0_abs) + "\ntotal_power = " + num(r.total_power) +
                           "\npositive_power = " + num(r.positive_power) + "\nlow_band_variance = " + num(r.low_band) +
                           "\nt_phi_ns = " + (r.t_phi ? num(*r.t_phi) : std::string("inf")) + "\n";
      out.files.push_back({"terms.csv", terms});
      out.files.push_back({"correlation.csv", corr});
      out.files.push_back({"report.txt", report});
      break;
    }
    case Experiment::CalibrateCr: {
      const auto c = run_calibrate(config);
      const auto& p = c.params;
      std::string report = "fidelity = " + num(c.report.fidelity) + "\niterations = " + std::to_string(c.report.iterations) +
                           "\nconverged = " + (c.report.converged ? "true" : "false") + "\ndetuning = " + num(p.detuning) +
                           "\ncoupling = " + num(p.coupling) + "\nduration_ns = " + num(p.duration) +
                           "\namplitude = " + num(p.amplitude) + "\nrz_pre_1_over_pi = " + num(p.rz_pre_1 / kPi) +
                           "\nrz_post_1_over_pi = " + num(p.rz_post_1 / kPi) + "\nrz_pre_2_over_pi = " + num(p.rz_pre_2 / kPi) +
                           "\nrz_post_2_over_pi = " + num(p.rz_post_2 / kPi) + "\n";
      std::string residuals = "pauli,hermitian,anti_hermitian\n";
      const auto& res = c.report.residuals;
      for (std::size_t i = 0; i < res.labels.size(); ++i)
        residuals += join({res.labels[i], num(res.hermitian[i]), num(res.anti_hermitian[i])});
      out.files.push_back({"calibration.txt", report});
      out.files.push_back({"residuals.csv", residuals});
      break;
    }
  }
  return out;
}

}  // namespace qheom::cli
