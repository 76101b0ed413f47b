#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qheom/control.hpp"
#include "qheom/units.hpp"

namespace qheom::cli {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(field(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }

  std::optional<std::size_t> count(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer() || v->get<long long>() < 0) throw ConfigError(field(key), "must be a non-negative integer");
    return static_cast<std::size_t>(v->get<long long>());
  }

  std::optional<std::string> text(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(field(key), "must be a string");
    return v->get<std::string>();
  }

  template <class Parse>
  std::optional<double> quantity(const std::string& key, Parse parse) {
    auto s = text(key);
    if (!s) return std::nullopt;
    try {
      return parse(*s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  std::optional<double> frequency(const std::string& key) { return quantity(key, units::parse_frequency); }
  std::optional<double> time(const std::string& key) { return quantity(key, units::parse_time_ns); }
  std::optional<double> angle(const std::string& key) { return quantity(key, parse_angle); }

  std::optional<Section> child(const std::string& key) {
    const json* v = raw(key);
    if (!v) return std::nullopt;
    return Section(*v, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

  static double parse_angle(const std::string& s) {
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double v = 0.0;
    std::string unit;
    if (!(in >> v)) throw std::invalid_argument("expected '<number> rad' or '<number> pi'");
    in >> unit;
    std::string rest;
    if (in >> rest) throw std::invalid_argument("trailing text in angle");
    if (unit == "rad") return v;
    if (unit == "pi") return v * kPi;
    throw std::invalid_argument("angle needs a 'rad' or 'pi' suffix");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
void set_if(std::optional<T> v, T& target) {
  if (v) target = *v;
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

Experiment parse_experiment(const std::string& s, const std::string& path) {
  static const std::pair<const char*, Experiment> table[] = {
      {"free_dephasing", Experiment::FreeDephasing}, {"cpmg", Experiment::Cpmg},
      {"udd", Experiment::Udd},                       {"cr_fidelity", Experiment::CrFidelity},
      {"cr_tomography", Experiment::CrTomography},   {"decompose", Experiment::Decompose},
      {"calibrate_cr", Experiment::CalibrateCr},     {"tnl_compare", Experiment::TnlCompare}};
  for (const auto& [name, e] : table)
    if (s == name) return e;
  throw ConfigError(path, "unknown experiment '" + s + "'");
}

NoiseMode parse_noise(const std::string& s, const std::string& path) {
  static const std::pair<const char*, NoiseMode> table[] = {{"none", NoiseMode::None},
                                                            {"full_1f", NoiseMode::Full1f},
                                                            {"cutoff_plus_static", NoiseMode::CutoffPlusStatic},
                                                            {"total_static", NoiseMode::TotalStatic},
                                                            {"lindblad", NoiseMode::Lindblad}};
  for (const auto& [name, n] : table)
    if (s == name) return n;
  throw ConfigError(path, "unknown noise mode '" + s + "'");
}

void read_bath(Section& s, BathSection& b) {
  if (auto n = s.text("noise")) b.noise = parse_noise(*n, s.field("noise"));
  auto& m = b.model;
  set_if(s.number("eta"), m.eta);
  set_if(s.number("s"), m.s);
  set_if(s.frequency("omega_q"), m.omega_q);
  set_if(s.frequency("omega_hc"), m.omega_hc);
  if (auto lc = s.frequency("omega_lc")) m = m.with_low_cutoff(*lc);
  set_if(s.frequency("phi"), m.phi_width);
  if (auto t = s.quantity("temperature", units::parse_temperature_kelvin)) {
    require(*t > 0.0, s.field("temperature"), "must be > 0");
    m.beta = units::beta_ns(*t);
  }
  set_if(s.time("t_phi"), b.t_phi);
  if (auto v = s.number("static_variance")) b.static_variance = *v;
  set_if(s.number("fit_tolerance"), b.fit_tolerance);
  set_if(s.count("max_terms"), b.max_terms);
  if (auto h = s.time("fit_horizon")) b.fit_horizon = *h;
  s.finish();

  require(m.eta >= 0.0, s.field("eta"), "must be >= 0");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    // Messages lead with the offending field, e.g. "bath.omega_hc must ...".
    const std::string what = e.what();
    const auto space = what.find(' ');
    throw ConfigError(what.substr(0, space), what.substr(space + 1));
  }
  require(b.t_phi > 0.0, s.field("t_phi"), "must be > 0");
  require(!b.static_variance || *b.static_variance >= 0.0, s.field("static_variance"), "must be >= 0");
  require(b.fit_tolerance > 0.0 && b.fit_tolerance < 1.0, s.field("fit_tolerance"), "must be in (0, 1)");
  require(b.max_terms > 0, s.field("max_terms"), "must be > 0");
  require(!b.fit_horizon || *b.fit_horizon > 0.0, s.field("fit_horizon"), "must be > 0");
}

void read_schedule(Section& s, ScheduleSection& p) {
  set_if(s.count("pulses"), p.pulses);
  set_if(s.text("pattern"), p.pattern);
  set_if(s.time("tau"), p.tau);
  set_if(s.time("delta_t"), p.delta_t);
  set_if(s.time("t1"), p.t1);
  set_if(s.time("total"), p.total);
  s.finish();
  require(p.tau > 0.0, s.field("tau"), "must be > 0");
  require(p.delta_t >= 0.0, s.field("delta_t"), "must be >= 0");
  require(p.t1 >= 0.0, s.field("t1"), "must be >= 0");
  require(p.total > 0.0, s.field("total"), "must be > 0");
  try {
    control::parse_pattern(p.pattern);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.field("pattern"), e.what());
  }
}

void read_cr(Section& s, crgate::CrParams& p) {
  set_if(s.frequency("detuning"), p.detuning);
  set_if(s.frequency("coupling"), p.coupling);
  set_if(s.time("duration"), p.duration);
  set_if(s.frequency("amplitude"), p.amplitude);
  set_if(s.angle("rz_pre_1"), p.rz_pre_1);
  set_if(s.angle("rz_post_1"), p.rz_post_1);
  set_if(s.angle("rz_pre_2"), p.rz_pre_2);
  set_if(s.angle("rz_post_2"), p.rz_post_2);
  s.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.field("duration"), e.what());
  }
}

void read_search(Section& s, crgate::SearchConfig& c) {
  set_if(s.angle("theta"), c.theta);
  set_if(s.count("max_iterations"), c.max_iterations);
  set_if(s.number("target_fidelity"), c.target_fidelity);
  set_if(s.count("rz_grid"), c.rz_grid);
  set_if(s.number("amplitude_step"), c.amplitude_step);
  set_if(s.number("duration_step"), c.duration_step);
  set_if(s.number("detuning_step"), c.detuning_step);
  set_if(s.number("shrink"), c.shrink);
  s.finish();
  require(c.target_fidelity > 0.0 && c.target_fidelity <= 1.0, s.field("target_fidelity"), "must be in (0, 1]");
  require(c.rz_grid >= 4, s.field("rz_grid"), "must be >= 4");
  require(c.amplitude_step >= 0.0, s.field("amplitude_step"), "must be >= 0");
  require(c.duration_step >= 0.0, s.field("duration_step"), "must be >= 0");
  require(c.detuning_step >= 0.0, s.field("detuning_step"), "must be >= 0");
  require(c.shrink > 0.0 && c.shrink < 1.0, s.field("shrink"), "must be in (0, 1)");
}

void read_solver(Section& s, SolverSection& v) {
  set_if(s.count("depth"), v.depth);
  set_if(s.time("dt"), v.dt);
  if (auto st = s.text("stepper")) {
    if (*st == "rk4")
      v.stepper = heom::Stepper::Rk4;
    else if (*st == "if_rk4")
      v.stepper = heom::Stepper::IntegratingFactorRk4;
    else
      throw ConfigError(s.field("stepper"), "expected 'rk4' or 'if_rk4'");
  }
  if (auto l = s.text("layout")) {
    if (*l == "merged")
      v.layout = heom::Layout::Merged;
    else if (*l == "paired")
      v.layout = heom::Layout::Paired;
    else
      throw ConfigError(s.field("layout"), "expected 'merged' or 'paired'");
  }
  set_if(s.number("importance_threshold"), v.importance_threshold);
  set_if(s.count("max_ados"), v.max_ados);
  if (const auto* t = s.raw("tnl_depths")) {
    if (!t->is_array() || t->empty()) throw ConfigError(s.field("tnl_depths"), "must be a non-empty array");
    v.tnl_depths.clear();
    for (const auto& x : *t) {
      if (!x.is_number_integer() || x.get<long long>() < 1) throw ConfigError(s.field("tnl_depths"), "entries must be integers >= 1");
      v.tnl_depths.push_back(static_cast<std::size_t>(x.get<long long>()));
    }
  }
  set_if(s.count("static_depth"), v.static_depth);
  s.finish();
  require(v.depth >= 1 && v.depth <= 60, s.field("depth"), "must be in [1, 60]");
  require(v.static_depth >= 1 && v.static_depth <= 120, s.field("static_depth"), "must be in [1, 120]");
  require(v.dt > 0.0, s.field("dt"), "must be > 0");
  require(v.importance_threshold >= 0.0, s.field("importance_threshold"), "must be >= 0");
  require(v.max_ados > 0, s.field("max_ados"), "must be > 0");
}

void read_output(Section& s, OutputSection& o) {
  set_if(s.time("t_end"), o.t_end);
  set_if(s.time("sample_step"), o.sample_step);
  set_if(s.count("top_k"), o.top_k);
  s.finish();
  require(o.t_end > 0.0, s.field("t_end"), "must be > 0");
  require(o.sample_step > 0.0, s.field("sample_step"), "must be > 0");
  require(o.top_k > 0, s.field("top_k"), "must be > 0");
}

}  // namespace

heom::PropagatorConfig ExperimentConfig::propagator() const {
  heom::PropagatorConfig c;
  c.dt = solver.dt;
  c.stepper = solver.stepper;
  c.depth = solver.depth;
  c.layout = solver.layout;
  c.importance_threshold = solver.importance_threshold;
  c.max_size = solver.max_ados;
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  Section root(j, "");
  ExperimentConfig c;
  auto name = root.text("experiment");
  if (!name) throw ConfigError("experiment", "required");
  c.experiment = parse_experiment(*name, "experiment");
  if (auto s = root.child("bath")) read_bath(*s, c.bath);
  if (auto s = root.child("schedule")) read_schedule(*s, c.schedule);
  if (auto s = root.child("cr")) read_cr(*s, c.cr);
  if (auto s = root.child("search")) read_search(*s, c.search);
  if (auto s = root.child("solver")) read_solver(*s, c.solver);
  if (auto s = root.child("output")) read_output(*s, c.output);
  root.finish();

  if (c.experiment == Experiment::Udd) {
    try {
      control::udd_schedule(c.schedule.pulses, c.schedule.total, c.schedule.tau, control::parse_pattern(c.schedule.pattern), false);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("schedule.total", e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::FreeDephasing: return "free_dephasing";
    case Experiment::Cpmg: return "cpmg";
    case Experiment::Udd: return "udd";
    case Experiment::CrFidelity: return "cr_fidelity";
    case Experiment::CrTomography: return "cr_tomography";
    case Experiment::Decompose: return "decompose";
    case Experiment::CalibrateCr: return "calibrate_cr";
    case Experiment::TnlCompare: return "tnl_compare";
  }
  return "?";
}

std::string noise_name(NoiseMode n) {
  switch (n) {
    case NoiseMode::None: return "none";
    case NoiseMode::Full1f: return "full_1f";
    case NoiseMode::CutoffPlusStatic: return "cutoff_plus_static";
    case NoiseMode::TotalStatic: return "total_static";
    case NoiseMode::Lindblad: return "lindblad";
  }
  return "?";
}

std::vector<std::string> advisories(const ExperimentConfig& c) {
  std::vector<std::string> out;
  const bool cr = c.experiment == Experiment::CrFidelity || c.experiment == Experiment::CrTomography ||
                  c.experiment == Experiment::CalibrateCr;
  if (cr && c.cr.dispersive_advisory())
    out.push_back("cr: |detuning| is not well above coupling and amplitude (dispersive regime assumed)");
  const bool hierarchy = c.bath.noise == NoiseMode::Full1f || c.bath.noise == NoiseMode::CutoffPlusStatic;
  if (hierarchy && c.solver.stepper == heom::Stepper::Rk4) {
    const double rate = c.bath.model.omega_hc;
    if (c.solver.dt * rate >= 2.5) {
      std::ostringstream s;
      s.imbue(std::locale::classic());
      s << "solver.dt: dt * gamma_max = " << c.solver.dt * rate << " >= 2.5, explicit RK4 is likely unstable";
      out.push_back(s.str());
    }
  }
  return out;
}

}  // namespace qheom::cli
